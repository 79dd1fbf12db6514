#include "mpbo/bo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "mpbo/errors.hpp"
#include "mpbo/packing.hpp"
#include "mpbo/wirelength.hpp"

namespace mpbo {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

// Evaluates a batch of feasible points, optionally on worker threads.
// Results land by index; the first failure wins and is rethrown.
struct BatchEvaluation {
  std::vector<ObjectiveValue> values;
  std::vector<double> wall_ms;
};

BatchEvaluation evaluate_all(const Design& design,
                             const std::vector<SequencePair>& points,
                             int threads) {
  const int count = static_cast<int>(points.size());
  BatchEvaluation out;
  out.values.resize(count);
  out.wall_ms.resize(count, 0.0);
  if (count == 0) return out;

  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, count);

  std::exception_ptr first_error;
  if (workers == 1) {
    for (int i = 0; i < count; ++i) {
      const auto start = Clock::now();
      out.values[i] = evaluate_sp(design, points[i]);
      out.wall_ms[i] = ms_since(start);
    }
    return out;
  }

  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          const auto start = Clock::now();
          out.values[i] = evaluate_sp(design, points[i]);
          out.wall_ms[i] = ms_since(start);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace

InitialDesign initial_design(const Design& design, int n_init, RngStream& rng,
                             long rejection_budget) {
  if (n_init < 1) throw std::invalid_argument("n_init must be >= 1");
  require_valid(design);
  const int n = design.num_macros();

  InitialDesign out;
  std::vector<SequencePair> to_evaluate;
  while (static_cast<int>(to_evaluate.size()) < n_init &&
         out.draws < rejection_budget) {
    SequencePair sp = random_sequence_pair(n, rng);
    ++out.draws;
    if (!is_feasible(sp, design.macros, design.outline)) continue;
    ++out.feasible_draws;
    if (out.feasible.insert(sp)) to_evaluate.push_back(std::move(sp));
  }
  if (to_evaluate.empty())
    throw InfeasibleError(
        "no feasible sequence pair found in " +
        std::to_string(rejection_budget) +
        " draws; the outline is likely too tight for this design");

  for (SequencePair& sp : to_evaluate) {
    const ObjectiveValue value = evaluate_sp(design, sp);
    out.data.add(std::move(sp), -value.hpwl);
  }
  return out;
}

RunRecord run_bo(const Design& design, const BoConfig& cfg, std::uint64_t seed) {
  if (cfg.rounds < 0 || cfg.batch.batch_size < 1 || cfg.n_init < 1)
    throw std::invalid_argument("invalid BO configuration");
  require_valid(design);
  const auto run_start = Clock::now();
  RngStream rng(seed);

  RunRecord record;
  record.config = {
      {"algo", "bo"},
      {"seed", seed},
      {"n_init", cfg.n_init},
      {"rounds", cfg.rounds},
      {"batch_size", cfg.batch.batch_size},
      {"rho_scale", cfg.batch.rho_scale},
      {"acq", to_string(cfg.acq_kind)},
      {"ucb_beta", cfg.ucb_beta},
      {"s_max", cfg.batch_opt.s_max},
      {"fit_max_iters", cfg.fit.max_iters},
      {"rejection_budget", cfg.rejection_budget},
      {"design",
       {{"n_macros", design.num_macros()},
        {"n_nets", design.nets.size()},
        {"n_pads", design.pads.size()},
        {"outline", {design.outline.width, design.outline.height}},
        {"pin_mode", design.pin_mode == PinTerminalMode::kOffsets
                         ? "offsets"
                         : "centers"}}}};

  record.best_hpwl = std::numeric_limits<double>::infinity();
  auto note_append = [&](const std::string& text) {
    if (!record.note.empty()) record.note += "; ";
    record.note += text;
  };

  // Initial design (round 0).
  InitialDesign init;
  try {
    init = initial_design(design, cfg.n_init, rng, cfg.rejection_budget);
  } catch (const InfeasibleError&) {
    throw;  // nothing to record yet
  }
  record.config["initial_acceptance_rate"] = init.acceptance_rate();
  record.config["initial_draws"] = init.draws;
  if (init.data.size() < cfg.n_init)
    note_append("initial design clamped to " + std::to_string(init.data.size()) +
                " points (draw budget)");

  Dataset dataset;
  FeasibleSet feasible = std::move(init.feasible);
  auto record_eval = [&](const SequencePair& sp, double hpwl, int round,
                         double wall, const Placement* placement) {
    EvalRow row;
    row.index = static_cast<int>(record.rows.size());
    row.round = round;
    row.sp = sp;
    row.hpwl = hpwl;
    if (hpwl < record.best_hpwl) {
      record.best_hpwl = hpwl;
      record.best_sp = sp;
      if (placement != nullptr) record.best_placement = *placement;
    }
    row.best_so_far = record.best_hpwl;
    record.rows.push_back(std::move(row));
    record.wall_ms.push_back(wall);
  };

  // The initial evaluations were already performed inside initial_design;
  // replay them into the record and re-derive their placements lazily at the
  // end (only the best placement is kept).
  for (int i = 0; i < init.data.size(); ++i)
    record_eval(init.data.x(i), -init.data.y(i), 0, 0.0, nullptr);
  dataset = std::move(init.data);

  const FeasibleFn feasible_fn = [&](const SequencePair& sp) {
    return is_feasible(sp, design.macros, design.outline);
  };

  for (int round = 1; round <= cfg.rounds; ++round) {
    // Fit from the same fixed initialization every round.
    auto [std_data, transform] = standardized(dataset);
    const GpHyper hyper = fit(std_data, default_init(std_data), cfg.fit);
    const GpPosterior post(hyper, std_data, transform);

    AcqConfig acq_cfg;
    acq_cfg.kind = cfg.acq_kind;
    acq_cfg.ucb_beta = cfg.ucb_beta;
    acq_cfg.incumbent =
        *std::max_element(std_data.targets().begin(), std_data.targets().end());

    BatchProposal proposal = optimize_batch(post, acq_cfg, cfg.batch, feasible,
                                            rng, feasible_fn, cfg.batch_opt);

    // Never evaluate a sequence pair twice: replace already-evaluated
    // proposals with unevaluated feasible members.
    std::vector<SequencePair> batch;
    std::vector<std::string> batch_keys;
    auto try_add = [&](const SequencePair& sp) {
      std::string key = canonical_key(sp);
      if (dataset.contains(key)) return false;
      if (std::find(batch_keys.begin(), batch_keys.end(), key) !=
          batch_keys.end())
        return false;
      batch.push_back(sp);
      batch_keys.push_back(std::move(key));
      return true;
    };
    for (const SequencePair& sp : proposal.points) try_add(sp);
    int attempts = 0;
    while (static_cast<int>(batch.size()) < cfg.batch.batch_size &&
           attempts < 256) {
      try_add(feasible.sample(rng));
      ++attempts;
    }
    if (static_cast<int>(batch.size()) < cfg.batch.batch_size) {
      for (std::size_t i = 0;
           i < feasible.size() &&
           static_cast<int>(batch.size()) < cfg.batch.batch_size;
           ++i)
        try_add(feasible.at(i));
    }
    if (batch.empty()) {
      note_append("stopped after round " + std::to_string(round - 1) +
                  ": no unevaluated feasible points remain");
      break;
    }

    BatchEvaluation evaluation;
    try {
      evaluation = evaluate_all(design, batch, cfg.threads);
    } catch (const std::exception& e) {
      record.complete = false;
      note_append(std::string("aborted in round ") + std::to_string(round) +
                  ": " + e.what());
      break;
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      record_eval(batch[i], evaluation.values[i].hpwl, round,
                  evaluation.wall_ms[i], &evaluation.values[i].placement);
      dataset.add(batch[i], -evaluation.values[i].hpwl);
      feasible.insert(batch[i]);
    }
  }

  // The initial-design evaluations kept no placements; recover the best one.
  if (!record.rows.empty() &&
      record.best_placement.positions.empty()) {
    record.best_placement = evaluate_sp(design, record.best_sp).placement;
  }
  record.total_wall_s =
      std::chrono::duration<double>(Clock::now() - run_start).count();
  return record;
}

}  // namespace mpbo
