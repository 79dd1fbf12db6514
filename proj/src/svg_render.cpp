#include "mpbo/svg_render.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mpbo/text.hpp"

namespace mpbo {

namespace {

const char* kMacroFills[] = {"#9ecae1", "#a1d99b", "#fdae6b", "#bcbddc",
                             "#fdd0a2", "#c7e9c0", "#9e9ac8", "#fee6ce",
                             "#c6dbef", "#e5f5e0"};

}  // namespace

std::string render_svg(const Design& design, const Placement& placement) {
  if (static_cast<int>(placement.positions.size()) != design.num_macros())
    throw std::invalid_argument("placement length does not match design");

  const double w = design.outline.width;
  const double h = design.outline.height;
  const double margin = 0.03 * std::max(w, h);
  auto fy = [&](double y) { return h - y; };  // y up -> svg y down
  auto num = [](double v) { return format_number(v); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      << "viewBox=\"" << num(-margin) << " " << num(-margin) << " "
      << num(w + 2 * margin) << " " << num(h + 2 * margin) << "\">\n";
  out << "  <rect class=\"outline\" x=\"0\" y=\"0\" width=\"" << num(w)
      << "\" height=\"" << num(h)
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\""
      << num(0.004 * std::max(w, h)) << "\"/>\n";

  for (int i = 0; i < design.num_macros(); ++i) {
    const Point& p = placement.positions[i];
    const MacroShape& m = design.macros[i];
    out << "  <rect class=\"macro\" x=\"" << num(p.x) << "\" y=\""
        << num(fy(p.y + m.height)) << "\" width=\"" << num(m.width)
        << "\" height=\"" << num(m.height) << "\" fill=\""
        << kMacroFills[i % 10]
        << "\" stroke=\"#333333\" stroke-width=\""
        << num(0.002 * std::max(w, h)) << "\"/>\n";
    out << "  <text x=\"" << num(p.x + m.width / 2) << "\" y=\""
        << num(fy(p.y + m.height / 2)) << "\" font-size=\""
        << num(0.3 * std::min(m.width, m.height))
        << "\" text-anchor=\"middle\" dominant-baseline=\"middle\">"
        << design.macro_names[i] << "</text>\n";
  }

  const double pad_r = 0.006 * std::max(w, h);
  for (const IoPad& pad : design.pads) {
    out << "  <rect class=\"pad\" x=\"" << num(pad.x - pad_r) << "\" y=\""
        << num(fy(pad.y) - pad_r) << "\" width=\"" << num(2 * pad_r)
        << "\" height=\"" << num(2 * pad_r) << "\" fill=\"#2c2c2c\"/>\n";
  }

  const double pin_r = 0.004 * std::max(w, h);
  for (const Net& net : design.nets) {
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = std::numeric_limits<double>::infinity(), max_y = -min_y;
    auto visit = [&](double x, double y) {
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    };
    for (const Pin& pin : net.pins) {
      const double x = placement.positions[pin.macro_id].x + pin.dx;
      const double y = placement.positions[pin.macro_id].y + pin.dy;
      visit(x, y);
      out << "  <circle class=\"pin\" cx=\"" << num(x) << "\" cy=\""
          << num(fy(y)) << "\" r=\"" << num(pin_r) << "\" fill=\"#d62728\"/>\n";
    }
    for (int pad_id : net.pad_ids)
      visit(design.pads[pad_id].x, design.pads[pad_id].y);
    if (net.pins.empty() && net.pad_ids.empty()) continue;
    out << "  <rect class=\"netbox\" x=\"" << num(min_x) << "\" y=\""
        << num(fy(max_y)) << "\" width=\"" << num(max_x - min_x)
        << "\" height=\"" << num(max_y - min_y)
        << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\""
        << num(0.0015 * std::max(w, h)) << "\" stroke-dasharray=\""
        << num(0.01 * std::max(w, h)) << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace mpbo
