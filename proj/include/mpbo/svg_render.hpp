#pragma once

#include <string>

#include "mpbo/design.hpp"
#include "mpbo/wirelength.hpp"

namespace mpbo {

// SVG 1.1 rendering of a placement: outline, macro rectangles with pins,
// pads, and per-net bounding boxes. Deterministic output for equal inputs.
// The y axis is flipped so that y grows upward like the placement space.
std::string render_svg(const Design& design, const Placement& placement);

}  // namespace mpbo
