#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "mpbo/seq_pair.hpp"
#include "mpbo/wirelength.hpp"

namespace mpbo {

struct EvalRow {
  int index = 0;  // evaluation counter, 0-based
  int round = 0;  // 0 for the initial design / chain start, then 1, 2, ...
  SequencePair sp;
  double hpwl = 0;
  double best_so_far = 0;
};

// Time-ordered evaluations of one run plus the final best placement. The
// serialized record holds only seed-determined content; wall-clock timings
// go to a sidecar file so reruns with equal seeds are byte-identical.
struct RunRecord {
  nlohmann::json config;  // full configuration + design metadata snapshot
  std::vector<EvalRow> rows;
  std::vector<double> wall_ms;  // per evaluation, sidecar only
  double total_wall_s = 0;
  double best_hpwl = 0;
  SequencePair best_sp;
  Placement best_placement;
  bool complete = true;
  std::string note;

  double final_best() const { return best_hpwl; }
};

std::string timing_sidecar_path(const std::string& record_path);

// JSON-lines: one header object, one object per evaluation, one final object.
void write_run_record(const RunRecord& record, const std::string& path);
RunRecord read_run_record(const std::string& path);

nlohmann::json sp_to_json(const SequencePair& sp);
SequencePair sp_from_json(const nlohmann::json& j);

}  // namespace mpbo
