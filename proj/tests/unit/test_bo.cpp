#include <doctest.h>

#include <set>

#include "mpbo/bo.hpp"
#include "mpbo/errors.hpp"
#include "mpbo/packing.hpp"
#include "support/oracles.hpp"

using namespace mpbo;

namespace {

Design toy_design(int n_macros, RngStream& rng) {
  Design d = oracle::random_design(n_macros, 4, 4, rng);
  d.outline = {26, 26};  // roomy enough for healthy acceptance rates
  return d;
}

}  // namespace

TEST_CASE("initial_design clamps to the unique point for N=1") {
  Design d;
  d.outline = {10, 10};
  d.macro_names = {"m0"};
  d.macros = {{2, 2}};
  RngStream rng(3);
  const InitialDesign init = initial_design(d, 5, rng, 2000);
  CHECK(init.data.size() == 1);
  CHECK(init.feasible.size() == 1);
}

TEST_CASE("a loose outline accepts every draw") {
  RngStream gen(11);
  Design d = toy_design(5, gen);
  double w = 0, h = 0;
  for (const auto& m : d.macros) {
    w += m.width;
    h += m.height;
  }
  d.outline = {w, h};  // any packing fits
  for (auto& pad : d.pads) {
    pad.x = std::min(pad.x, w);
    pad.y = std::min(pad.y, h);
  }
  RngStream rng(5);
  const InitialDesign init = initial_design(d, 6, rng);
  CHECK(init.feasible_draws == init.draws);
  CHECK(init.acceptance_rate() == doctest::Approx(1.0));
  CHECK(init.data.size() == 6);
}

TEST_CASE("initial_design re-verifies feasible and reports the rate") {
  RngStream gen(13);
  Design d = toy_design(6, gen);
  d.outline = {16, 16};  // tighter: rejections expected
  for (auto& pad : d.pads) {
    pad.x = std::min(pad.x, 16.0);
    pad.y = std::min(pad.y, 16.0);
  }
  RngStream rng(7);
  const InitialDesign init = initial_design(d, 8, rng);
  CHECK(init.acceptance_rate() > 0.0);
  CHECK(init.acceptance_rate() <= 1.0);
  for (std::size_t i = 0; i < init.feasible.size(); ++i)
    CHECK(is_feasible(init.feasible.at(i), d.macros, d.outline));
}

TEST_CASE("initial_design reports impossible outlines") {
  Design d;
  d.outline = {10.5, 10.5};
  d.macro_names = {"a", "b"};
  d.macros = {{1, 10}, {10, 1}};  // no sequence pair fits
  RngStream rng(9);
  CHECK_THROWS_AS(initial_design(d, 3, rng, 500), InfeasibleError);
}

TEST_CASE("run_bo with zero rounds is exactly the initial design") {
  RngStream gen(17);
  const Design d = toy_design(4, gen);
  BoConfig cfg;
  cfg.n_init = 5;
  cfg.rounds = 0;
  const RunRecord record = run_bo(d, cfg, 42);
  CHECK(record.rows.size() == 5);
  for (const EvalRow& row : record.rows) CHECK(row.round == 0);
  CHECK(record.complete);
}

TEST_CASE("run_bo row count, dedup, monotone best, determinism") {
  RngStream gen(19);
  const Design d = toy_design(4, gen);
  BoConfig cfg;
  cfg.n_init = 5;
  cfg.rounds = 3;
  cfg.batch.batch_size = 4;
  cfg.fit.max_iters = 10;  // keep the test quick
  cfg.threads = 2;

  const RunRecord a = run_bo(d, cfg, 7);
  CHECK(a.complete);
  CHECK(a.rows.size() == 5 + 3 * 4);

  std::set<std::string> keys;
  double best = std::numeric_limits<double>::infinity();
  for (const EvalRow& row : a.rows) {
    CHECK(keys.insert(canonical_key(row.sp)).second);  // never re-evaluated
    best = std::min(best, row.hpwl);
    CHECK(row.best_so_far == doctest::Approx(best));
    CHECK(is_feasible(row.sp, d.macros, d.outline));
  }
  CHECK(a.best_hpwl == doctest::Approx(best));
  CHECK(hpwl_of(d, a.best_placement) == doctest::Approx(a.best_hpwl));

  const RunRecord b = run_bo(d, cfg, 7);
  REQUIRE(b.rows.size() == a.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].sp == b.rows[i].sp);
    CHECK(a.rows[i].hpwl == b.rows[i].hpwl);
    CHECK(a.rows[i].round == b.rows[i].round);
  }
  CHECK(a.config == b.config);

  const RunRecord c = run_bo(d, cfg, 8);
  bool differs = c.rows.size() != a.rows.size();
  for (std::size_t i = 0; !differs && i < a.rows.size(); ++i)
    differs = !(a.rows[i].sp == c.rows[i].sp);
  CHECK(differs);  // different seed explores differently
}

TEST_CASE("run_bo exhausts tiny search spaces gracefully") {
  Design d;
  d.outline = {10, 10};
  d.macro_names = {"a", "b"};
  d.macros = {{2, 2}, {3, 3}};  // 4 sequence pairs exist
  BoConfig cfg;
  cfg.n_init = 2;
  cfg.rounds = 5;
  cfg.batch.batch_size = 2;
  cfg.fit.max_iters = 5;
  const RunRecord record = run_bo(d, cfg, 3);
  CHECK(record.rows.size() <= 4);
  CHECK(!record.note.empty());
  std::set<std::string> keys;
  for (const EvalRow& row : record.rows)
    CHECK(keys.insert(canonical_key(row.sp)).second);
}
