#pragma once

#include <span>
#include <vector>

#include "mpbo/seq_pair.hpp"

namespace mpbo {

struct MacroShape {
  double width = 0;
  double height = 0;

  friend bool operator==(const MacroShape&, const MacroShape&) = default;
};

struct Outline {
  double width = 0;
  double height = 0;

  friend bool operator==(const Outline&, const Outline&) = default;
};

struct Point {
  double x = 0;
  double y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct PackResult {
  std::vector<Point> positions;  // lower-left corner per macro
  double packed_width = 0;
  double packed_height = 0;
};

// Minimal packing of a sequence pair: every coordinate is the longest
// weighted chain of predecessors under the pairwise relations, evaluated in
// O(N log N) with an indexed prefix-maximum structure. y grows upward.
// Integer-valued shapes yield exactly integer-valued coordinates.
PackResult pack(const SequencePair& sp, std::span<const MacroShape> shapes);

// True iff the packed placement fits the outline (inclusive comparisons).
bool is_feasible(const SequencePair& sp, std::span<const MacroShape> shapes,
                 const Outline& outline);

}  // namespace mpbo
