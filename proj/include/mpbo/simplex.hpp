#pragma once

#include <limits>
#include <vector>

namespace mpbo::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Term {
  int var = 0;
  double coef = 0;
};

// sum(coef * v) <= rhs
struct Row {
  std::vector<Term> terms;
  double rhs = 0;
};

// Minimize objective . v subject to rows and per-variable bounds.
// Lower bounds must be finite; upper bounds may be +inf.
struct Problem {
  int num_vars = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> objective;
  std::vector<Row> rows;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

struct Solution {
  SolveStatus status = SolveStatus::kIterLimit;
  std::vector<double> x;
  double objective = 0;
};

// Dense two-phase primal simplex with explicit variable bounds.
// Deterministic: Dantzig pricing with index tie-breaks, switching to Bland's
// rule after a run of degenerate pivots.
Solution solve(const Problem& problem);

}  // namespace mpbo::lp
