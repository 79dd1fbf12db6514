#include "mpbo/design_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "mpbo/errors.hpp"
#include "mpbo/text.hpp"

namespace mpbo {

namespace {

constexpr const char* kNativeHeader = "mpdesign 1";

int column_of(const std::string& line, const std::string& token) {
  const auto at = line.find(token);
  return at == std::string::npos ? 1 : static_cast<int>(at) + 1;
}

double parse_double(const std::string& line, int line_no,
                    const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == nullptr || *end != '\0')
    throw ParseError("expected a number, got '" + token + "'", line_no,
                     column_of(line, token));
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void project_pads_to_outline(Design& design) {
  for (IoPad& pad : design.pads) {
    pad.x = std::clamp(pad.x, 0.0, design.outline.width);
    pad.y = std::clamp(pad.y, 0.0, design.outline.height);
  }
}

struct LineReader {
  std::istringstream in;
  std::string line;
  int line_no = 0;

  explicit LineReader(const std::string& text) : in(text) {}

  // Next non-empty, non-comment line; false at end of input.
  bool next() {
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (line[first] == '#') continue;
      if (line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  }
};

}  // namespace

Design design_from_native(const std::string& text) {
  LineReader reader(text);
  if (!reader.next() || split_ws(reader.line) != split_ws(kNativeHeader))
    throw ParseError("missing 'mpdesign 1' header", 1, 1);

  Design design;
  std::unordered_map<std::string, int> macro_index;
  std::unordered_map<std::string, int> pad_index;
  bool saw_outline = false;
  bool saw_end = false;

  while (reader.next()) {
    const std::vector<std::string> tok = split_ws(reader.line);
    const std::string& kind = tok[0];
    auto want = [&](std::size_t count) {
      if (tok.size() != count)
        throw ParseError("'" + kind + "' expects " + std::to_string(count - 1) +
                             " fields",
                         reader.line_no, 1);
    };
    if (kind == "outline") {
      want(3);
      design.outline = {parse_double(reader.line, reader.line_no, tok[1]),
                        parse_double(reader.line, reader.line_no, tok[2])};
      saw_outline = true;
    } else if (kind == "macro") {
      want(4);
      if (macro_index.count(tok[1]))
        throw ParseError("duplicate macro " + tok[1], reader.line_no,
                         column_of(reader.line, tok[1]));
      macro_index[tok[1]] = design.num_macros();
      design.macro_names.push_back(tok[1]);
      design.macros.push_back(
          {parse_double(reader.line, reader.line_no, tok[2]),
           parse_double(reader.line, reader.line_no, tok[3])});
    } else if (kind == "pad") {
      want(4);
      if (pad_index.count(tok[1]))
        throw ParseError("duplicate pad " + tok[1], reader.line_no,
                         column_of(reader.line, tok[1]));
      pad_index[tok[1]] = static_cast<int>(design.pads.size());
      design.pads.push_back(
          {tok[1], parse_double(reader.line, reader.line_no, tok[2]),
           parse_double(reader.line, reader.line_no, tok[3])});
    } else if (kind == "pinmode") {
      want(2);
      if (tok[1] == "offsets")
        design.pin_mode = PinTerminalMode::kOffsets;
      else if (tok[1] == "centers")
        design.pin_mode = PinTerminalMode::kCenters;
      else
        throw ParseError("pinmode must be offsets or centers", reader.line_no,
                         column_of(reader.line, tok[1]));
    } else if (kind == "net") {
      if (tok.size() < 2)
        throw ParseError("'net' expects a name", reader.line_no, 1);
      Net net;
      net.name = tok[1];
      std::size_t at = 2;
      while (at < tok.size()) {
        if (tok[at] == "pin") {
          if (at + 3 >= tok.size())
            throw ParseError("'pin' expects macro dx dy", reader.line_no,
                             column_of(reader.line, tok[at]));
          const auto it = macro_index.find(tok[at + 1]);
          if (it == macro_index.end())
            throw ParseError("net references undefined macro " + tok[at + 1],
                             reader.line_no,
                             column_of(reader.line, tok[at + 1]));
          net.pins.push_back(
              {it->second,
               parse_double(reader.line, reader.line_no, tok[at + 2]),
               parse_double(reader.line, reader.line_no, tok[at + 3])});
          at += 4;
        } else if (tok[at] == "pad") {
          if (at + 1 >= tok.size())
            throw ParseError("'pad' expects a name", reader.line_no,
                             column_of(reader.line, tok[at]));
          const auto it = pad_index.find(tok[at + 1]);
          if (it == pad_index.end())
            throw ParseError("net references undefined pad " + tok[at + 1],
                             reader.line_no,
                             column_of(reader.line, tok[at + 1]));
          net.pad_ids.push_back(it->second);
          at += 2;
        } else {
          throw ParseError("unexpected token '" + tok[at] + "' in net",
                           reader.line_no, column_of(reader.line, tok[at]));
        }
      }
      design.nets.push_back(std::move(net));
    } else if (kind == "end") {
      saw_end = true;
      break;
    } else {
      throw ParseError("unknown directive '" + kind + "'", reader.line_no, 1);
    }
  }
  if (!saw_outline) throw ParseError("missing outline", reader.line_no, 1);
  if (!saw_end) throw ParseError("missing 'end'", reader.line_no, 1);
  return design;
}

std::string design_to_native(const Design& design) {
  auto check_name = [](const std::string& name) {
    if (name.empty() || name.find_first_of(" \t\r\n#") != std::string::npos)
      throw DataError("name '" + name + "' is not serializable");
  };
  std::ostringstream out;
  out << kNativeHeader << "\n";
  out << "outline " << format_number(design.outline.width) << " "
      << format_number(design.outline.height) << "\n";
  if (design.pin_mode == PinTerminalMode::kCenters) out << "pinmode centers\n";
  for (int i = 0; i < design.num_macros(); ++i) {
    check_name(design.macro_names[i]);
    out << "macro " << design.macro_names[i] << " "
        << format_number(design.macros[i].width) << " "
        << format_number(design.macros[i].height) << "\n";
  }
  for (const IoPad& pad : design.pads) {
    check_name(pad.name);
    out << "pad " << pad.name << " " << format_number(pad.x) << " "
        << format_number(pad.y) << "\n";
  }
  for (const Net& net : design.nets) {
    check_name(net.name);
    out << "net " << net.name;
    for (const Pin& pin : net.pins)
      out << " pin " << design.macro_names[pin.macro_id] << " "
          << format_number(pin.dx) << " " << format_number(pin.dy);
    for (int pad_id : net.pad_ids) out << " pad " << design.pads[pad_id].name;
    out << "\n";
  }
  out << "end\n";
  return out.str();
}

namespace {

// ---- bookshelf (blocks / nets / pl triple) ----

struct BookshelfPaths {
  std::string blocks, nets, pl;
};

BookshelfPaths resolve_bookshelf(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path p(path);
  const std::string ext = p.extension().string();
  if (ext == ".blocks" || ext == ".nets" || ext == ".pl") p.replace_extension();
  BookshelfPaths out{p.string() + ".blocks", p.string() + ".nets",
                     p.string() + ".pl"};
  for (const std::string& f : {out.blocks, out.nets, out.pl})
    if (!fs::exists(f)) throw DataError("bookshelf file missing: " + f);
  return out;
}

bool is_counter_line(const std::vector<std::string>& tok) {
  return tok.size() >= 3 && tok[1] == ":";
}

void parse_blocks(const std::string& path, Design& design,
                  std::unordered_map<std::string, int>& macro_index,
                  std::unordered_map<std::string, int>& pad_index) {
  LineReader reader(read_file(path));
  bool saw_header = false;
  while (reader.next()) {
    std::vector<std::string> tok = split_ws(reader.line);
    if (!saw_header) {
      // e.g. "UCSC blocks 1.0"
      if (tok.size() < 2 || tok[1] != "blocks")
        throw ParseError("expected blocks header", reader.line_no, 1);
      saw_header = true;
      continue;
    }
    if (is_counter_line(tok)) continue;  // Num* counters are advisory
    if (tok.size() >= 2 && tok[1] == "terminal") {
      if (pad_index.count(tok[0]))
        throw ParseError("duplicate terminal " + tok[0], reader.line_no, 1);
      pad_index[tok[0]] = static_cast<int>(design.pads.size());
      design.pads.push_back({tok[0], 0, 0});
      continue;
    }
    if (tok.size() >= 3 && tok[1] == "hardrectilinear") {
      const int vertices = static_cast<int>(
          parse_double(reader.line, reader.line_no, tok[2]));
      if (vertices != 4)
        throw ParseError("only 4-vertex rectangles are supported",
                         reader.line_no, column_of(reader.line, tok[2]));
      // vertices follow as (x, y) pairs, possibly split across tokens
      std::string rest;
      for (std::size_t i = 3; i < tok.size(); ++i) rest += tok[i] + " ";
      for (char& c : rest)
        if (c == '(' || c == ')' || c == ',') c = ' ';
      const std::vector<std::string> nums = split_ws(rest);
      if (nums.size() != 8)
        throw ParseError("expected 4 vertices", reader.line_no, 1);
      double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
      for (int v = 0; v < 4; ++v) {
        const double x = parse_double(reader.line, reader.line_no, nums[2 * v]);
        const double y =
            parse_double(reader.line, reader.line_no, nums[2 * v + 1]);
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
      }
      if (macro_index.count(tok[0]))
        throw ParseError("duplicate block " + tok[0], reader.line_no, 1);
      macro_index[tok[0]] = design.num_macros();
      design.macro_names.push_back(tok[0]);
      design.macros.push_back({max_x - min_x, max_y - min_y});
      continue;
    }
    if (tok.size() >= 2 && tok[1] == "softrectangular")
      throw ParseError("soft blocks are not supported", reader.line_no, 1);
    throw ParseError("unrecognized blocks line", reader.line_no, 1);
  }
  if (!saw_header) throw ParseError("empty blocks file", 1, 1);
}

void parse_nets(const std::string& path, Design& design,
                const std::unordered_map<std::string, int>& macro_index,
                const std::unordered_map<std::string, int>& pad_index,
                bool& any_offset_pin) {
  LineReader reader(read_file(path));
  bool saw_header = false;
  Net current;
  int remaining = 0;
  bool in_net = false;
  int net_counter = 0;
  any_offset_pin = false;

  auto flush = [&]() {
    if (!in_net) return;
    if (remaining != 0)
      throw ParseError("net " + current.name + " has fewer terminals than its degree",
                       reader.line_no, 1);
    design.nets.push_back(current);
    in_net = false;
  };

  while (reader.next()) {
    std::vector<std::string> tok = split_ws(reader.line);
    if (!saw_header) {
      if (tok.size() < 2 || tok[1] != "nets")
        throw ParseError("expected nets header", reader.line_no, 1);
      saw_header = true;
      continue;
    }
    if (tok[0] == "NetDegree") {
      flush();
      if (tok.size() < 3 || tok[1] != ":")
        throw ParseError("malformed NetDegree", reader.line_no, 1);
      current = Net{};
      current.name = tok.size() >= 4 ? tok[3] : "n" + std::to_string(net_counter);
      ++net_counter;
      remaining = static_cast<int>(
          parse_double(reader.line, reader.line_no, tok[2]));
      in_net = true;
      continue;
    }
    if (is_counter_line(tok)) continue;
    if (!in_net)
      throw ParseError("terminal outside a net group", reader.line_no, 1);
    if (remaining <= 0)
      throw ParseError("net " + current.name + " has more terminals than its degree",
                       reader.line_no, 1);
    const std::string& name = tok[0];
    // "<name> [B] [: %x %y]" where offsets are percent of the block
    // dimension measured from its center.
    double px = 0, py = 0;
    bool has_offset = false;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      if (tok[i] != ":") continue;
      if (i + 2 < tok.size() && tok[i + 1].size() > 1 && tok[i + 1][0] == '%' &&
          tok[i + 2].size() > 1 && tok[i + 2][0] == '%') {
        px = parse_double(reader.line, reader.line_no, tok[i + 1].substr(1));
        py = parse_double(reader.line, reader.line_no, tok[i + 2].substr(1));
        has_offset = true;
      }
      break;
    }
    const auto macro_it = macro_index.find(name);
    if (macro_it != macro_index.end()) {
      const MacroShape& m = design.macros[macro_it->second];
      Pin pin;
      pin.macro_id = macro_it->second;
      pin.dx = m.width / 2 + (has_offset ? px / 100.0 * m.width : 0.0);
      pin.dy = m.height / 2 + (has_offset ? py / 100.0 * m.height : 0.0);
      if (has_offset) any_offset_pin = true;
      current.pins.push_back(pin);
    } else {
      const auto pad_it = pad_index.find(name);
      if (pad_it == pad_index.end())
        throw ParseError("net references unknown object " + name,
                         reader.line_no, 1);
      current.pad_ids.push_back(pad_it->second);
    }
    --remaining;
  }
  flush();
  if (!saw_header) throw ParseError("empty nets file", 1, 1);
}

void parse_pl(const std::string& path, Design& design,
              const std::unordered_map<std::string, int>& pad_index) {
  LineReader reader(read_file(path));
  bool saw_header = false;
  std::vector<bool> placed(design.pads.size(), false);
  while (reader.next()) {
    const std::vector<std::string> tok = split_ws(reader.line);
    if (!saw_header) {
      if (tok.size() < 2 || tok[1] != "pl")
        throw ParseError("expected pl header", reader.line_no, 1);
      saw_header = true;
      continue;
    }
    if (is_counter_line(tok)) continue;
    if (tok.size() < 3) continue;  // block placements without coords etc.
    const auto it = pad_index.find(tok[0]);
    if (it == pad_index.end()) continue;  // block initial positions are ignored
    design.pads[it->second].x = parse_double(reader.line, reader.line_no, tok[1]);
    design.pads[it->second].y = parse_double(reader.line, reader.line_no, tok[2]);
    placed[it->second] = true;
  }
  if (!saw_header) throw ParseError("empty pl file", 1, 1);
  for (std::size_t i = 0; i < placed.size(); ++i)
    if (!placed[i])
      throw DataError("terminal " + design.pads[i].name +
                      " has no position in the pl file");
}

Design load_bookshelf(const std::string& path, const LoadOptions& options) {
  const BookshelfPaths files = resolve_bookshelf(path);
  Design design;
  std::unordered_map<std::string, int> macro_index, pad_index;
  parse_blocks(files.blocks, design, macro_index, pad_index);
  bool any_offset_pin = false;
  parse_nets(files.nets, design, macro_index, pad_index, any_offset_pin);
  parse_pl(files.pl, design, pad_index);
  design.pin_mode =
      any_offset_pin ? PinTerminalMode::kOffsets : PinTerminalMode::kCenters;

  if (options.outline) {
    design.outline = *options.outline;
  } else {
    double area = 0;
    for (const MacroShape& m : design.macros) area += m.width * m.height;
    const double side = std::sqrt((1.0 + options.whitespace) * area);
    design.outline = {side, side};
  }
  return design;
}

}  // namespace

DesignFormat parse_format(const std::string& name) {
  if (name == "native") return DesignFormat::kNative;
  if (name == "bookshelf") return DesignFormat::kBookshelf;
  throw DataError("unknown design format '" + name + "'");
}

Design load_design(const std::string& path, DesignFormat format,
                   const LoadOptions& options) {
  Design design;
  if (format == DesignFormat::kNative) {
    design = design_from_native(read_file(path));
    if (options.outline) design.outline = *options.outline;
  } else {
    design = load_bookshelf(path, options);
  }
  if (options.project_pads) project_pads_to_outline(design);
  require_valid(design);
  return design;
}

void save_design(const Design& design, const std::string& path) {
  require_valid(design);
  const std::string text = design_to_native(design);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace mpbo
