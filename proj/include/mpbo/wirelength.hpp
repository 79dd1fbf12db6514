#pragma once

#include <utility>
#include <vector>

#include "mpbo/design.hpp"
#include "mpbo/seq_pair.hpp"

namespace mpbo {

struct Placement {
  std::vector<Point> positions;  // lower-left per macro

  friend bool operator==(const Placement&, const Placement&) = default;
};

enum class Axis { kX, kY };

// v_before + gap <= v_after, from a pairwise relation on this axis.
struct OrderingConstraint {
  int before = 0;
  int after = 0;
  double gap = 0;
};

// L_net <= coord(macro) + offset and coord(macro) + offset <= U_net.
struct BracketTerm {
  int net_id = 0;
  int macro_id = 0;
  double offset = 0;
};

// L_net <= coord and U_net >= coord for a fixed terminal.
struct PadTerm {
  int net_id = 0;
  double coord = 0;
};

// One axis of the wirelength program: macro coordinates plus per-net interval
// variables (L_k, U_k), ordering and box constraints, terminal bracketing,
// objective sum(U_k - L_k). The x and y programs share no variables.
struct AxisLp {
  Axis axis = Axis::kX;
  int num_macros = 0;
  int num_nets = 0;
  double outline_extent = 0;
  std::vector<double> macro_extent;  // width (x axis) or height (y axis)
  std::vector<OrderingConstraint> orderings;
  std::vector<BracketTerm> pin_terms;
  std::vector<PadTerm> pad_terms;
};

struct AxisSolution {
  std::vector<double> coords;  // per macro
  double objective = 0;        // sum of net extents on this axis
};

struct ObjectiveValue {
  double hpwl = 0;
  Placement placement;
};

std::pair<AxisLp, AxisLp> build_axis_lps(const Design& design,
                                         const SequencePair& sp);

// Solves one axis program to optimality. Throws InfeasibleError when the
// program is infeasible, which indicates the caller skipped the feasibility
// gate, and NumericalFailure if the solver gives up.
AxisSolution solve_axis_lp(const AxisLp& lp);

double hpwl_of(const Design& design, const Placement& placement);

// The expensive objective: minimal total HPWL over placements consistent
// with the sequence pair, inside the outline. Requires is_feasible(sp).
ObjectiveValue evaluate_sp(const Design& design, const SequencePair& sp);

}  // namespace mpbo
