#include "mpbo/design.hpp"

#include <sstream>
#include <unordered_set>

#include "mpbo/errors.hpp"

namespace mpbo {

std::vector<Violation> validate(const Design& design) {
  std::vector<Violation> out;
  auto add = [&](const std::string& message) { out.push_back({message}); };

  const int n = design.num_macros();
  if (n < 1) add("design has no macros");
  if (design.macro_names.size() != design.macros.size())
    add("macro name count does not match macro count");
  if (design.outline.width <= 0 || design.outline.height <= 0)
    add("outline dimensions must be positive");

  double total_area = 0;
  for (int i = 0; i < n; ++i) {
    const MacroShape& m = design.macros[i];
    if (m.width <= 0 || m.height <= 0)
      add("macro " + std::to_string(i) + " has non-positive dimensions");
    else
      total_area += m.width * m.height;
  }
  if (total_area > design.outline.width * design.outline.height)
    add("total macro area exceeds outline area");

  std::unordered_set<std::string> seen_names;
  for (const std::string& name : design.macro_names) {
    if (!seen_names.insert(name).second)
      add("macro name " + name + " is not unique");
  }
  seen_names.clear();
  for (std::size_t p = 0; p < design.pads.size(); ++p) {
    const IoPad& pad = design.pads[p];
    if (!seen_names.insert(pad.name).second)
      add("pad name " + pad.name + " is not unique");
    if (pad.x < 0 || pad.x > design.outline.width || pad.y < 0 ||
        pad.y > design.outline.height)
      add("pad " + pad.name + " lies outside the outline");
  }

  for (std::size_t k = 0; k < design.nets.size(); ++k) {
    const Net& net = design.nets[k];
    const std::string label = net.name.empty() ? std::to_string(k) : net.name;
    if (net.pins.empty() && net.pad_ids.empty())
      add("net " + label + " has no terminals");
    for (const Pin& pin : net.pins) {
      if (pin.macro_id < 0 || pin.macro_id >= n) {
        add("net " + label + " references macro index " +
            std::to_string(pin.macro_id));
        continue;
      }
      const MacroShape& m = design.macros[pin.macro_id];
      if (pin.dx < 0 || pin.dx > m.width || pin.dy < 0 || pin.dy > m.height)
        add("net " + label + " pin offset (" + std::to_string(pin.dx) + ", " +
            std::to_string(pin.dy) + ") outside macro " +
            design.macro_names[pin.macro_id]);
    }
    for (int pad_id : net.pad_ids) {
      if (pad_id < 0 || pad_id >= static_cast<int>(design.pads.size()))
        add("net " + label + " references pad index " + std::to_string(pad_id));
    }
  }
  return out;
}

void require_valid(const Design& design) {
  const std::vector<Violation> violations = validate(design);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "design validation failed (" << violations.size() << " violations):";
  for (const Violation& v : violations) msg << "\n  - " << v.message;
  throw DataError(msg.str());
}

}  // namespace mpbo
