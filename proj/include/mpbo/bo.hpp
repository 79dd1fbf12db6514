#pragma once

#include <cstdint>

#include "mpbo/batch_opt.hpp"
#include "mpbo/design.hpp"
#include "mpbo/run_record.hpp"

namespace mpbo {

struct BoConfig {
  int n_init = 20;
  int rounds = 50;
  BatchAcqConfig batch{10, 1.0};
  AcqKind acq_kind = AcqKind::kEi;
  double ucb_beta = 4.0;
  FitOptions fit;
  BatchOptOptions batch_opt;
  long rejection_budget = 100000;
  int threads = 0;  // 0 = hardware concurrency; affects speed, not results
};

struct InitialDesign {
  Dataset data;  // internal objective values (negated HPWL)
  FeasibleSet feasible;
  long draws = 0;
  long feasible_draws = 0;

  double acceptance_rate() const {
    return draws > 0 ? static_cast<double>(feasible_draws) / draws : 0.0;
  }
};

// Rejection-samples uniform sequence pairs until n_init distinct feasible
// ones are evaluated; every feasible draw joins the feasible set. Throws
// InfeasibleError when the draw budget passes without a single feasible
// point; if the budget runs out after at least one, the dataset clamps to
// what was found.
InitialDesign initial_design(const Design& design, int n_init, RngStream& rng,
                             long rejection_budget = 100000);

// Full batch loop: fit -> propose -> evaluate -> expand, recorded per
// evaluation. Deterministic given the seed; batch evaluations may run on
// several threads without affecting results.
RunRecord run_bo(const Design& design, const BoConfig& cfg, std::uint64_t seed);

}  // namespace mpbo
