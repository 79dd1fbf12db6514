#pragma once

#include <cstdint>
#include <string>

#include "mpbo/design.hpp"
#include "mpbo/run_record.hpp"

namespace mpbo {

enum class Schedule { kLinear, kExponential, kStepdown };

Schedule parse_schedule(const std::string& name);
const char* to_string(Schedule schedule);

struct SaConfig {
  double t0 = 1e3;
  Schedule schedule = Schedule::kExponential;
  int budget = 520;          // objective evaluations, the chain start included
  double t_final = 1.0;      // exponential only
  int steps_per_stage = 0;   // stepdown only; 0 = ceil(budget / 5)
  int max_proposal_retries = 50;
  long rejection_budget = 100000;
};

// Temperature at step t in [0, budget):
//   linear:      t0 * (1 - t/budget), floored at t0 * 1e-6
//   exponential: t0 * alpha^t with alpha solved so T(budget-1) = t_final
//   stepdown:    t0 * 10^-floor(t / steps_per_stage)
double temperature(const SaConfig& cfg, int step);

// Accepts improving moves always, worsening moves with probability
// exp(-delta / t). delta is raw (positive-is-worse) HPWL difference.
bool metropolis_accept(double delta, double t, RngStream& rng);

// Metropolis chain over feasible sequence pairs with uniform adjacent-swap
// proposals; infeasible proposals retry without consuming budget. Exactly
// cfg.budget objective evaluations (fewer only if the chain gets stuck, which
// the record notes).
RunRecord run_sa(const Design& design, const SaConfig& cfg, std::uint64_t seed);

}  // namespace mpbo
