#include "mpbo/sa.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mpbo/errors.hpp"
#include "mpbo/packing.hpp"
#include "mpbo/wirelength.hpp"

namespace mpbo {

Schedule parse_schedule(const std::string& name) {
  if (name == "linear") return Schedule::kLinear;
  if (name == "exponential") return Schedule::kExponential;
  if (name == "stepdown") return Schedule::kStepdown;
  throw std::invalid_argument("unknown schedule '" + name + "'");
}

const char* to_string(Schedule schedule) {
  switch (schedule) {
    case Schedule::kLinear: return "linear";
    case Schedule::kExponential: return "exponential";
    case Schedule::kStepdown: return "stepdown";
  }
  return "?";
}

static int resolved_steps_per_stage(const SaConfig& cfg) {
  if (cfg.steps_per_stage > 0) return cfg.steps_per_stage;
  return (cfg.budget + 4) / 5;
}

double temperature(const SaConfig& cfg, int step) {
  if (cfg.t0 <= 0 || cfg.budget < 1)
    throw std::invalid_argument("invalid SA configuration");
  if (step < 0 || step >= cfg.budget)
    throw std::invalid_argument("step index out of range");
  switch (cfg.schedule) {
    case Schedule::kLinear: {
      const double t =
          cfg.t0 * (1.0 - static_cast<double>(step) / cfg.budget);
      return std::max(t, cfg.t0 * 1e-6);
    }
    case Schedule::kExponential: {
      if (cfg.budget == 1) return cfg.t0;
      const double alpha =
          std::pow(cfg.t_final / cfg.t0, 1.0 / (cfg.budget - 1));
      // solve T(budget-1) = t_final exactly even under pow round-off
      if (step == cfg.budget - 1) return cfg.t_final;
      return cfg.t0 * std::pow(alpha, step);
    }
    case Schedule::kStepdown: {
      const int stage = step / resolved_steps_per_stage(cfg);
      return cfg.t0 * std::pow(10.0, -stage);
    }
  }
  throw std::logic_error("bad schedule");
}

bool metropolis_accept(double delta, double t, RngStream& rng) {
  if (delta <= 0) return true;
  return rng.uniform() < std::exp(-delta / t);
}

RunRecord run_sa(const Design& design, const SaConfig& cfg, std::uint64_t seed) {
  if (cfg.budget < 1) throw std::invalid_argument("budget must be >= 1");
  require_valid(design);
  const auto run_start = std::chrono::steady_clock::now();
  RngStream rng(seed);
  const int n = design.num_macros();

  RunRecord record;
  record.config = {
      {"algo", "sa"},
      {"seed", seed},
      {"t0", cfg.t0},
      {"schedule", to_string(cfg.schedule)},
      {"budget", cfg.budget},
      {"t_final", cfg.t_final},
      {"steps_per_stage", resolved_steps_per_stage(cfg)},
      {"max_proposal_retries", cfg.max_proposal_retries},
      {"design",
       {{"n_macros", n},
        {"n_nets", design.nets.size()},
        {"n_pads", design.pads.size()},
        {"outline", {design.outline.width, design.outline.height}},
        {"pin_mode", design.pin_mode == PinTerminalMode::kOffsets
                         ? "offsets"
                         : "centers"}}}};
  record.best_hpwl = std::numeric_limits<double>::infinity();

  auto record_eval = [&](const SequencePair& sp, const ObjectiveValue& value,
                         int step, double wall_ms) {
    EvalRow row;
    row.index = static_cast<int>(record.rows.size());
    row.round = step;
    row.sp = sp;
    row.hpwl = value.hpwl;
    if (value.hpwl < record.best_hpwl) {
      record.best_hpwl = value.hpwl;
      record.best_sp = sp;
      record.best_placement = value.placement;
    }
    row.best_so_far = record.best_hpwl;
    record.rows.push_back(std::move(row));
    record.wall_ms.push_back(wall_ms);
  };

  auto timed_evaluate = [&](const SequencePair& sp) {
    const auto start = std::chrono::steady_clock::now();
    ObjectiveValue v = evaluate_sp(design, sp);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    return std::pair<ObjectiveValue, double>(std::move(v), ms);
  };

  // Feasible chain start, rejection-sampled like the BO initial design.
  SequencePair current{Permutation::identity(1), Permutation::identity(1)};
  bool found = false;
  for (long draw = 0; draw < cfg.rejection_budget; ++draw) {
    SequencePair sp = random_sequence_pair(n, rng);
    if (is_feasible(sp, design.macros, design.outline)) {
      current = std::move(sp);
      found = true;
      break;
    }
  }
  if (!found)
    throw InfeasibleError(
        "no feasible sequence pair found in " +
        std::to_string(cfg.rejection_budget) +
        " draws; the outline is likely too tight for this design");

  auto [current_value, start_ms] = timed_evaluate(current);
  record_eval(current, current_value, 0, start_ms);

  int evals = 1;
  int stuck_steps = 0;
  constexpr int kStuckLimit = 1000;
  while (evals < cfg.budget) {
    // Uniform adjacent transposition in one uniformly chosen permutation;
    // infeasible proposals retry without consuming an objective evaluation.
    SequencePair proposal = current;
    bool have_proposal = false;
    for (int retry = 0; n >= 2 && retry < cfg.max_proposal_retries; ++retry) {
      const bool swap_pi = rng.below(2) == 0;
      const int pos = static_cast<int>(rng.below(n - 1));
      SequencePair cand = current;
      if (swap_pi)
        cand.pi = cand.pi.with_adjacent_swap(pos);
      else
        cand.pi_prime = cand.pi_prime.with_adjacent_swap(pos);
      if (is_feasible(cand, design.macros, design.outline)) {
        proposal = std::move(cand);
        have_proposal = true;
        break;
      }
    }
    if (!have_proposal) {
      if (n < 2 || ++stuck_steps >= kStuckLimit) {
        record.note = "chain stuck at an isolated feasible point after " +
                      std::to_string(evals) + " evaluations";
        record.complete = false;
        break;
      }
      continue;  // counted as a rejection, no budget consumed
    }
    stuck_steps = 0;

    auto [value, ms] = timed_evaluate(proposal);
    record_eval(proposal, value, evals, ms);
    const double delta = value.hpwl - current_value.hpwl;
    const double t = temperature(cfg, evals);
    ++evals;
    if (metropolis_accept(delta, t, rng)) {
      current = proposal;
      current_value = value;
    }
  }

  record.total_wall_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - run_start)
                            .count();
  return record;
}

}  // namespace mpbo
