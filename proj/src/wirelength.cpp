#include "mpbo/wirelength.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mpbo/errors.hpp"
#include "mpbo/packing.hpp"
#include "mpbo/simplex.hpp"

namespace mpbo {

std::pair<AxisLp, AxisLp> build_axis_lps(const Design& design,
                                         const SequencePair& sp) {
  const int n = design.num_macros();
  if (sp.size() != n)
    throw std::invalid_argument("sequence pair length does not match design");

  AxisLp x_lp, y_lp;
  x_lp.axis = Axis::kX;
  y_lp.axis = Axis::kY;
  x_lp.num_macros = y_lp.num_macros = n;
  x_lp.num_nets = y_lp.num_nets = static_cast<int>(design.nets.size());
  x_lp.outline_extent = design.outline.width;
  y_lp.outline_extent = design.outline.height;
  x_lp.macro_extent.resize(n);
  y_lp.macro_extent.resize(n);
  for (int i = 0; i < n; ++i) {
    x_lp.macro_extent[i] = design.macros[i].width;
    y_lp.macro_extent[i] = design.macros[i].height;
  }

  // One ordering constraint per unordered pair, on the axis its relation
  // names; no transitive reduction.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      switch (relation(sp, i, j)) {
        case Relation::kLeftOf:
          x_lp.orderings.push_back({i, j, design.macros[i].width});
          break;
        case Relation::kRightOf:
          x_lp.orderings.push_back({j, i, design.macros[j].width});
          break;
        case Relation::kBelow:
          y_lp.orderings.push_back({i, j, design.macros[i].height});
          break;
        case Relation::kAbove:
          y_lp.orderings.push_back({j, i, design.macros[j].height});
          break;
      }
    }
  }

  for (int k = 0; k < static_cast<int>(design.nets.size()); ++k) {
    const Net& net = design.nets[k];
    for (const Pin& pin : net.pins) {
      x_lp.pin_terms.push_back({k, pin.macro_id, pin.dx});
      y_lp.pin_terms.push_back({k, pin.macro_id, pin.dy});
    }
    for (int pad_id : net.pad_ids) {
      x_lp.pad_terms.push_back({k, design.pads[pad_id].x});
      y_lp.pad_terms.push_back({k, design.pads[pad_id].y});
    }
  }
  return {std::move(x_lp), std::move(y_lp)};
}

AxisSolution solve_axis_lp(const AxisLp& lp) {
  const int n = lp.num_macros;
  const int k = lp.num_nets;
  // Variable layout: macros 0..n-1, then (L_j, U_j) per net.
  lp::Problem p;
  p.num_vars = n + 2 * k;
  p.lower.assign(p.num_vars, 0.0);
  p.upper.assign(p.num_vars, lp.outline_extent);
  p.objective.assign(p.num_vars, 0.0);
  const auto l_var = [&](int net) { return n + 2 * net; };
  const auto u_var = [&](int net) { return n + 2 * net + 1; };

  for (int i = 0; i < n; ++i) {
    p.upper[i] = lp.outline_extent - lp.macro_extent[i];  // box constraint
    if (p.upper[i] < 0)
      throw InfeasibleError("macro wider than the outline on this axis");
  }
  for (int j = 0; j < k; ++j) {
    p.objective[l_var(j)] = -1.0;
    p.objective[u_var(j)] = 1.0;
  }

  // Fixed terminals tighten the interval variable bounds directly.
  for (const PadTerm& t : lp.pad_terms) {
    p.upper[l_var(t.net_id)] = std::min(p.upper[l_var(t.net_id)], t.coord);
    p.lower[u_var(t.net_id)] = std::max(p.lower[u_var(t.net_id)], t.coord);
  }

  for (const OrderingConstraint& c : lp.orderings)
    p.rows.push_back({{{c.before, 1.0}, {c.after, -1.0}}, -c.gap});

  // Per (net, macro) only the extreme offsets can bind; keep those two rows.
  std::map<std::pair<int, int>, std::pair<double, double>> extremes;
  for (const BracketTerm& t : lp.pin_terms) {
    auto [it, fresh] =
        extremes.try_emplace({t.net_id, t.macro_id}, t.offset, t.offset);
    if (!fresh) {
      it->second.first = std::min(it->second.first, t.offset);
      it->second.second = std::max(it->second.second, t.offset);
    }
  }
  for (const auto& [key, offs] : extremes) {
    const auto [net, macro] = key;
    // L_net - coord <= min offset ; coord - U_net <= -max offset
    p.rows.push_back({{{l_var(net), 1.0}, {macro, -1.0}}, offs.first});
    p.rows.push_back({{{macro, 1.0}, {u_var(net), -1.0}}, -offs.second});
  }

  const lp::Solution sol = lp::solve(p);
  switch (sol.status) {
    case lp::SolveStatus::kOptimal:
      break;
    case lp::SolveStatus::kInfeasible:
      throw InfeasibleError(
          "axis program infeasible; sequence pair was not feasibility-checked");
    case lp::SolveStatus::kUnbounded:
      throw NumericalFailure("axis program unbounded");  // cannot happen: bounded vars
    default:
      throw NumericalFailure("simplex iteration limit reached");
  }

  AxisSolution out;
  out.coords.assign(sol.x.begin(), sol.x.begin() + n);
  out.objective = sol.objective;
  return out;
}

double hpwl_of(const Design& design, const Placement& placement) {
  if (static_cast<int>(placement.positions.size()) != design.num_macros())
    throw std::invalid_argument("placement length does not match design");
  double total = 0;
  for (const Net& net : design.nets) {
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = std::numeric_limits<double>::infinity(), max_y = -min_y;
    auto visit = [&](double x, double y) {
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    };
    for (const Pin& pin : net.pins)
      visit(placement.positions[pin.macro_id].x + pin.dx,
            placement.positions[pin.macro_id].y + pin.dy);
    for (int pad_id : net.pad_ids)
      visit(design.pads[pad_id].x, design.pads[pad_id].y);
    if (net.pins.empty() && net.pad_ids.empty()) continue;
    total += (max_x - min_x) + (max_y - min_y);
  }
  return total;
}

ObjectiveValue evaluate_sp(const Design& design, const SequencePair& sp) {
  if (!is_feasible(sp, design.macros, design.outline))
    throw InfeasibleError("sequence pair does not fit the outline");
  auto [x_lp, y_lp] = build_axis_lps(design, sp);
  const AxisSolution xs = solve_axis_lp(x_lp);
  const AxisSolution ys = solve_axis_lp(y_lp);

  ObjectiveValue out;
  out.placement.positions.resize(design.num_macros());
  for (int i = 0; i < design.num_macros(); ++i)
    out.placement.positions[i] = {xs.coords[i], ys.coords[i]};
  // Report the recomputed value, not the solver objective.
  out.hpwl = hpwl_of(design, out.placement);
  return out;
}

}  // namespace mpbo
