#pragma once

#include <optional>
#include <string>

#include "mpbo/design.hpp"

namespace mpbo {

enum class DesignFormat { kNative, kBookshelf };

struct LoadOptions {
  // Pads outside the outline are rejected unless this is set, in which case
  // they are moved to the nearest point of the outline rectangle.
  bool project_pads = false;
  // Bookshelf files carry no outline. Exactly one of these choices applies:
  // an explicit outline, or a square outline with the given whitespace
  // fraction relative to total macro area.
  std::optional<Outline> outline;
  double whitespace = 0.15;
};

// Parses and fully validates a design. The native format is the line-based
// text file written by save_design; bookshelf reads the blocks/nets/pl
// triple given any one of the three filenames (or their common stem).
Design load_design(const std::string& path, DesignFormat format,
                   const LoadOptions& options = {});

DesignFormat parse_format(const std::string& name);

// Writes the native format with deterministic field ordering; two saves of
// equal designs produce byte-identical files.
void save_design(const Design& design, const std::string& path);

std::string design_to_native(const Design& design);
Design design_from_native(const std::string& text);

}  // namespace mpbo
