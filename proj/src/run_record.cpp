#include "mpbo/run_record.hpp"

#include <fstream>
#include <sstream>

#include "mpbo/errors.hpp"

namespace mpbo {

using nlohmann::json;

json sp_to_json(const SequencePair& sp) {
  return json{{"pi", sp.pi.order()}, {"pi_prime", sp.pi_prime.order()}};
}

SequencePair sp_from_json(const json& j) {
  return {Permutation(j.at("pi").get<std::vector<int>>()),
          Permutation(j.at("pi_prime").get<std::vector<int>>())};
}

std::string timing_sidecar_path(const std::string& record_path) {
  return record_path + ".timing.json";
}

void write_run_record(const RunRecord& record, const std::string& path) {
  std::ostringstream out;
  json header{{"type", "header"}, {"version", 1}, {"config", record.config}};
  out << header.dump() << "\n";
  for (const EvalRow& row : record.rows) {
    json r = sp_to_json(row.sp);
    r["type"] = "eval";
    r["index"] = row.index;
    r["round"] = row.round;
    r["hpwl"] = row.hpwl;
    r["best"] = row.best_so_far;
    out << r.dump() << "\n";
  }
  json footer = sp_to_json(record.best_sp);
  footer["type"] = "final";
  footer["best_hpwl"] = record.best_hpwl;
  footer["complete"] = record.complete;
  footer["note"] = record.note;
  json placement = json::array();
  for (const Point& p : record.best_placement.positions)
    placement.push_back(json::array({p.x, p.y}));
  footer["placement"] = placement;
  out << footer.dump() << "\n";

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path);
  f << out.str();
  if (!f) throw DataError("write failed for " + path);

  json timing{{"per_eval_ms", record.wall_ms},
              {"total_s", record.total_wall_s}};
  std::ofstream t(timing_sidecar_path(path), std::ios::binary | std::ios::trunc);
  if (!t) throw DataError("cannot write " + timing_sidecar_path(path));
  t << timing.dump() << "\n";
}

RunRecord read_run_record(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  RunRecord record;
  std::string line;
  bool saw_header = false, saw_final = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad run record line: ") + e.what(),
                       line_no, 1);
    }
    const std::string type = j.value("type", "");
    if (type == "header") {
      record.config = j.at("config");
      saw_header = true;
    } else if (type == "eval") {
      EvalRow row;
      row.index = j.at("index").get<int>();
      row.round = j.at("round").get<int>();
      row.sp = sp_from_json(j);
      row.hpwl = j.at("hpwl").get<double>();
      row.best_so_far = j.at("best").get<double>();
      record.rows.push_back(std::move(row));
    } else if (type == "final") {
      record.best_hpwl = j.at("best_hpwl").get<double>();
      record.best_sp = sp_from_json(j);
      record.complete = j.at("complete").get<bool>();
      record.note = j.value("note", "");
      for (const json& p : j.at("placement"))
        record.best_placement.positions.push_back(
            {p.at(0).get<double>(), p.at(1).get<double>()});
      saw_final = true;
    } else {
      throw ParseError("unknown record line type", line_no, 1);
    }
  }
  if (!saw_header || !saw_final)
    throw DataError("truncated run record: " + path);
  return record;
}

}  // namespace mpbo
