#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mpbo/run_record.hpp"
#include "support/oracles.hpp"

using namespace mpbo;
namespace fs = std::filesystem;

namespace {

RunRecord sample_record() {
  RunRecord r;
  r.config = {{"algo", "sa"}, {"seed", 9}, {"budget", 3}};
  RngStream rng(1);
  double best = 1e30;
  for (int i = 0; i < 3; ++i) {
    EvalRow row;
    row.index = i;
    row.round = i;
    row.sp = random_sequence_pair(4, rng);
    row.hpwl = 100.0 - 7.0 * i;
    best = std::min(best, row.hpwl);
    row.best_so_far = best;
    r.rows.push_back(row);
    r.wall_ms.push_back(1.25 * (i + 1));
  }
  r.best_hpwl = best;
  r.best_sp = r.rows.back().sp;
  r.best_placement.positions = {{0, 0}, {2, 0}, {0, 3}, {5.5, 1}};
  r.total_wall_s = 0.5;
  return r;
}

}  // namespace

TEST_CASE("run records round-trip through disk") {
  const fs::path dir = fs::temp_directory_path() / "mpbo_record_tests";
  fs::create_directories(dir);
  const std::string path = (dir / "run.jsonl").string();

  const RunRecord r = sample_record();
  write_run_record(r, path);
  const RunRecord back = read_run_record(path);

  CHECK(back.config == r.config);
  REQUIRE(back.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(back.rows[i].sp == r.rows[i].sp);
    CHECK(back.rows[i].hpwl == r.rows[i].hpwl);
    CHECK(back.rows[i].best_so_far == r.rows[i].best_so_far);
    CHECK(back.rows[i].index == r.rows[i].index);
    CHECK(back.rows[i].round == r.rows[i].round);
  }
  CHECK(back.best_hpwl == r.best_hpwl);
  CHECK(back.best_sp == r.best_sp);
  CHECK(back.best_placement == r.best_placement);
  CHECK(back.complete == r.complete);
}

TEST_CASE("record bytes exclude timing; the sidecar carries it") {
  const fs::path dir = fs::temp_directory_path() / "mpbo_record_tests";
  fs::create_directories(dir);
  const std::string path = (dir / "deterministic.jsonl").string();

  RunRecord r = sample_record();
  write_run_record(r, path);
  std::ifstream first_in(path, std::ios::binary);
  const std::string first((std::istreambuf_iterator<char>(first_in)),
                          std::istreambuf_iterator<char>());

  // same run, different wall clock
  r.wall_ms = {99.0, 98.0, 97.0};
  r.total_wall_s = 123.0;
  write_run_record(r, path);
  std::ifstream second_in(path, std::ios::binary);
  const std::string second((std::istreambuf_iterator<char>(second_in)),
                           std::istreambuf_iterator<char>());
  CHECK(first == second);

  std::ifstream timing(timing_sidecar_path(path));
  REQUIRE(timing.good());
  nlohmann::json t;
  timing >> t;
  CHECK(t.at("total_s").get<double>() == 123.0);
  CHECK(t.at("per_eval_ms").size() == 3);
}

TEST_CASE("truncated records are rejected") {
  const fs::path dir = fs::temp_directory_path() / "mpbo_record_tests";
  fs::create_directories(dir);
  const std::string path = (dir / "truncated.jsonl").string();
  std::ofstream out(path);
  out << R"({"type":"header","version":1,"config":{}})" << "\n";
  out.close();
  CHECK_THROWS(read_run_record(path));
}
