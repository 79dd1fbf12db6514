#pragma once

#include <string>
#include <vector>

#include "mpbo/packing.hpp"

namespace mpbo {

// Terminal attached to a macro, with offset from its lower-left corner.
struct Pin {
  int macro_id = -1;
  double dx = 0;
  double dy = 0;

  friend bool operator==(const Pin&, const Pin&) = default;
};

// Terminal fixed in outline coordinates.
struct IoPad {
  std::string name;
  double x = 0;
  double y = 0;

  friend bool operator==(const IoPad&, const IoPad&) = default;
};

struct Net {
  std::string name;
  std::vector<Pin> pins;
  std::vector<int> pad_ids;  // indices into Design::pads

  friend bool operator==(const Net&, const Net&) = default;
};

// Where net terminals on macros came from. Bookshelf nets without explicit
// offsets fall back to macro centers.
enum class PinTerminalMode { kOffsets, kCenters };

struct Design {
  std::vector<std::string> macro_names;
  std::vector<MacroShape> macros;
  std::vector<IoPad> pads;
  std::vector<Net> nets;
  Outline outline;
  PinTerminalMode pin_mode = PinTerminalMode::kOffsets;

  int num_macros() const { return static_cast<int>(macros.size()); }

  friend bool operator==(const Design&, const Design&) = default;
};

struct Violation {
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Checks every structural invariant and returns the complete list of
// violations; an empty result means the design is safe to pack and evaluate.
std::vector<Violation> validate(const Design& design);

// Throws DataError listing all violations if validate() is non-empty.
void require_valid(const Design& design);

}  // namespace mpbo
