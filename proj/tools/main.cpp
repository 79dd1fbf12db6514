// Command line driver: run experiments, pack/evaluate single sequence pairs,
// and aggregate run records into CSV tables.

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "mpbo/bo.hpp"
#include "mpbo/design_io.hpp"
#include "mpbo/errors.hpp"
#include "mpbo/sa.hpp"
#include "mpbo/svg_render.hpp"
#include "mpbo/text.hpp"

namespace fs = std::filesystem;
using namespace mpbo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct DesignArgs {
  std::string path;
  std::string format = "native";
  std::string outline;      // "WxH"
  double whitespace = 0.15;
  bool project_pads = false;
};

void add_design_options(CLI::App* cmd, DesignArgs& args) {
  cmd->add_option("--design", args.path, "design file (native or bookshelf)")
      ->required();
  cmd->add_option("--format", args.format, "design format: native|bookshelf")
      ->check(CLI::IsMember({"native", "bookshelf"}));
  cmd->add_option("--outline", args.outline,
                  "outline override as WIDTHxHEIGHT, e.g. 6000x6000");
  cmd->add_option("--whitespace", args.whitespace,
                  "square outline whitespace fraction when no outline is "
                  "given (bookshelf only)");
  cmd->add_flag("--project-pads", args.project_pads,
                "move pads outside the outline onto its boundary");
}

Outline parse_outline(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos)
    throw DataError("outline must be WIDTHxHEIGHT, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, x)), std::stod(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw DataError("outline must be WIDTHxHEIGHT, got '" + text + "'");
  }
}

Design load(const DesignArgs& args) {
  LoadOptions options;
  options.project_pads = args.project_pads;
  options.whitespace = args.whitespace;
  if (!args.outline.empty()) options.outline = parse_outline(args.outline);
  return load_design(args.path, parse_format(args.format), options);
}

// "0,1,2;2,0,1" -> sequence pair
SequencePair parse_sp(const std::string& text) {
  const auto semi = text.find(';');
  if (semi == std::string::npos)
    throw DataError("sequence pair literal must be 'pi;pi_prime'");
  auto parse_perm = [](const std::string& part) {
    std::vector<int> order;
    std::stringstream in(part);
    std::string tok;
    while (std::getline(in, tok, ',')) order.push_back(std::stoi(tok));
    return Permutation(order);
  };
  try {
    return {parse_perm(text.substr(0, semi)),
            parse_perm(text.substr(semi + 1))};
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("bad sequence pair literal: ") + e.what());
  }
}

SequencePair resolve_sp(const Design& design, const std::string& literal,
                        std::optional<std::uint64_t> sp_seed) {
  if (!literal.empty() && sp_seed)
    throw DataError("--sp and --sp-seed are mutually exclusive");
  if (!literal.empty()) {
    SequencePair sp = parse_sp(literal);
    if (sp.size() != design.num_macros())
      throw DataError("sequence pair length does not match the design");
    return sp;
  }
  if (sp_seed) {
    RngStream rng(*sp_seed);
    return random_sequence_pair(design.num_macros(), rng);
  }
  throw DataError("one of --sp or --sp-seed is required");
}

void atomic_write(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

std::string json_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- run ----

struct RunArgs {
  DesignArgs design;
  std::string algo = "bo";
  int budget = 520;
  int batch_size = 10;
  int n_init = 20;
  int rounds = -1;  // derived from budget unless given
  std::string acq = "ei";
  double ucb_beta = 4.0;
  double rho_scale = 1.0;
  int s_max = 20;
  int fit_iters = 100;
  double t0 = 1e3;
  std::string schedule = "exponential";
  double t_final = 1.0;
  int steps_per_stage = 0;
  std::uint64_t seed = 0;
  int repeats = 5;
  int jobs = 1;
  std::string out_dir = ".";
  std::string tag;
};

std::string run_variant(const RunArgs& args) {
  if (args.algo == "bo") return args.acq;
  return format_number(args.t0) + "/" + args.schedule;
}

std::string record_name(const RunArgs& args, std::uint64_t seed) {
  const std::string stem = fs::path(args.design.path).stem().string();
  std::string variant = run_variant(args);
  std::replace(variant.begin(), variant.end(), '/', '-');
  std::string name = stem + "_" + args.algo + "_" + variant + "_b" +
                     std::to_string(args.budget) + "_s" + std::to_string(seed);
  if (!args.tag.empty()) name = args.tag + "_" + name;
  return name + ".jsonl";
}

int cmd_run(const RunArgs& args) {
  const Design design = load(args.design);
  fs::create_directories(args.out_dir);

  int rounds = args.rounds;
  if (args.algo == "bo" && rounds < 0) {
    rounds = (args.budget - args.n_init) / args.batch_size;
    if (rounds < 0)
      throw DataError("budget smaller than the initial design size");
    const int covered = args.n_init + rounds * args.batch_size;
    if (covered != args.budget)
      std::cerr << "note: budget " << args.budget << " is not n_init + k*B; "
                << "running " << covered << " evaluations\n";
  }

  std::vector<RunRecord> records(args.repeats);
  std::vector<std::string> errors(args.repeats);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= args.repeats) return;
      const std::uint64_t seed = args.seed + static_cast<std::uint64_t>(i);
      try {
        if (args.algo == "bo") {
          BoConfig cfg;
          cfg.n_init = args.n_init;
          cfg.rounds = rounds;
          cfg.batch.batch_size = args.batch_size;
          cfg.batch.rho_scale = args.rho_scale;
          cfg.acq_kind = parse_acq_kind(args.acq);
          cfg.ucb_beta = args.ucb_beta;
          cfg.batch_opt.s_max = args.s_max;
          cfg.fit.max_iters = args.fit_iters;
          cfg.threads = 1;  // repeats already run concurrently
          records[i] = run_bo(design, cfg, seed);
        } else {
          SaConfig cfg;
          cfg.t0 = args.t0;
          cfg.schedule = parse_schedule(args.schedule);
          cfg.budget = args.budget;
          cfg.t_final = args.t_final;
          cfg.steps_per_stage = args.steps_per_stage;
          records[i] = run_sa(design, cfg, seed);
        }
      } catch (const std::exception& e) {
        errors[i] = "seed " + std::to_string(seed) + ": " + e.what();
      }
    }
  };
  const int jobs = std::clamp(args.jobs, 1, args.repeats);
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (int i = 0; i < args.repeats; ++i)
    if (!errors[i].empty()) throw DataError("run failed: " + errors[i]);

  double sum = 0, sum_sq = 0, wall = 0;
  bool all_complete = true;
  for (int i = 0; i < args.repeats; ++i) {
    const RunRecord& r = records[i];
    const fs::path path =
        fs::path(args.out_dir) / record_name(args, args.seed + i);
    write_run_record(r, path.string());
    std::cout << path.string() << " best=" << format_number(r.final_best())
              << " rows=" << r.rows.size() << (r.complete ? "" : " INCOMPLETE")
              << "\n";
    sum += r.final_best();
    sum_sq += r.final_best() * r.final_best();
    wall += r.total_wall_s;
    all_complete = all_complete && r.complete;
  }

  const double mean = sum / args.repeats;
  std::string stderr_text;
  if (args.repeats > 1) {
    const double var = std::max(
        0.0, (sum_sq - args.repeats * mean * mean) / (args.repeats - 1));
    stderr_text = format_number(std::sqrt(var / args.repeats));
  }

  const fs::path summary = fs::path(args.out_dir) / "summary.csv";
  const bool fresh = !fs::exists(summary);
  std::ofstream out(summary, std::ios::app);
  if (!out) throw DataError("cannot write " + summary.string());
  if (fresh)
    out << "design,algo,variant,budget,mean_hpwl,stderr_hpwl,repeats,"
           "wall_time_s\n";
  out << fs::path(args.design.path).stem().string() << "," << args.algo << ","
      << run_variant(args) << "," << args.budget << "," << format_number(mean)
      << "," << stderr_text << "," << args.repeats << ","
      << format_number(wall) << "\n";
  std::cout << "summary: mean=" << format_number(mean)
            << " stderr=" << (stderr_text.empty() ? "NA" : stderr_text)
            << "\n";

  if (!all_complete)
    throw NumericalFailure("one or more runs were incomplete");
  return kExitOk;
}

// --------------------------------------------------------------- pack ----

int cmd_pack(const DesignArgs& design_args, const std::string& sp_literal,
             std::optional<std::uint64_t> sp_seed, const std::string& svg_path,
             bool as_json) {
  const Design design = load(design_args);
  const SequencePair sp = resolve_sp(design, sp_literal, sp_seed);
  const PackResult packed = pack(sp, design.macros);
  const bool fits = packed.packed_width <= design.outline.width &&
                    packed.packed_height <= design.outline.height;

  if (as_json) {
    nlohmann::json j{{"packed_width", packed.packed_width},
                     {"packed_height", packed.packed_height},
                     {"fits_outline", fits}};
    for (int i = 0; i < design.num_macros(); ++i)
      j["positions"].push_back({{"name", design.macro_names[i]},
                                {"x", packed.positions[i].x},
                                {"y", packed.positions[i].y}});
    std::cout << json_dump(j);
  } else {
    std::cout << "packed " << format_number(packed.packed_width) << " x "
              << format_number(packed.packed_height) << " (outline "
              << format_number(design.outline.width) << " x "
              << format_number(design.outline.height) << ", "
              << (fits ? "fits" : "does not fit") << ")\n";
    for (int i = 0; i < design.num_macros(); ++i)
      std::cout << design.macro_names[i] << " "
                << format_number(packed.positions[i].x) << " "
                << format_number(packed.positions[i].y) << "\n";
  }

  if (!svg_path.empty()) {
    const Placement placement{packed.positions};
    atomic_write(svg_path, render_svg(design, placement));
  }
  return kExitOk;
}

// ----------------------------------------------------------- evaluate ----

int cmd_evaluate(const DesignArgs& design_args, const std::string& sp_literal,
                 std::optional<std::uint64_t> sp_seed,
                 const std::string& json_path, const std::string& csv_path,
                 const std::string& svg_path) {
  const Design design = load(design_args);
  const SequencePair sp = resolve_sp(design, sp_literal, sp_seed);
  if (!is_feasible(sp, design.macros, design.outline))
    throw InfeasibleError("sequence pair does not fit the outline");
  const ObjectiveValue value = evaluate_sp(design, sp);

  std::cout << "hpwl " << format_number(value.hpwl) << "\n";
  for (int i = 0; i < design.num_macros(); ++i)
    std::cout << design.macro_names[i] << " "
              << format_number(value.placement.positions[i].x) << " "
              << format_number(value.placement.positions[i].y) << "\n";

  if (!json_path.empty()) {
    nlohmann::json j{{"hpwl", value.hpwl}};
    for (int i = 0; i < design.num_macros(); ++i)
      j["positions"].push_back({{"name", design.macro_names[i]},
                                {"x", value.placement.positions[i].x},
                                {"y", value.placement.positions[i].y}});
    atomic_write(json_path, json_dump(j));
  }
  if (!csv_path.empty()) {
    std::ostringstream out;
    out << "name,x,y\n";
    for (int i = 0; i < design.num_macros(); ++i)
      out << design.macro_names[i] << ","
          << format_number(value.placement.positions[i].x) << ","
          << format_number(value.placement.positions[i].y) << "\n";
    atomic_write(csv_path, out.str());
  }
  if (!svg_path.empty())
    atomic_write(svg_path, render_svg(design, value.placement));
  return kExitOk;
}

// ------------------------------------------------------------- report ----

int cmd_report(const std::vector<std::string>& files,
               const std::string& trace_path,
               const std::string& summary_path) {
  if (files.empty()) throw DataError("no run record files given");
  std::vector<RunRecord> records;
  for (const std::string& f : files) records.push_back(read_run_record(f));

  std::size_t min_rows = records.front().rows.size();
  for (const RunRecord& r : records)
    min_rows = std::min(min_rows, r.rows.size());

  std::ostringstream trace;
  trace << "iteration,mean_best,stderr_best,runs\n";
  for (std::size_t i = 0; i < min_rows; ++i) {
    double sum = 0, sum_sq = 0;
    for (const RunRecord& r : records) {
      sum += r.rows[i].best_so_far;
      sum_sq += r.rows[i].best_so_far * r.rows[i].best_so_far;
    }
    const double n = static_cast<double>(records.size());
    const double mean = sum / n;
    std::string se;
    if (records.size() > 1) {
      const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
      se = format_number(std::sqrt(var / n));
    }
    trace << i << "," << format_number(mean) << "," << se << ","
          << records.size() << "\n";
  }
  atomic_write(trace_path, trace.str());

  double sum = 0, sum_sq = 0;
  double best = std::numeric_limits<double>::infinity(), worst = -best;
  for (const RunRecord& r : records) {
    sum += r.final_best();
    sum_sq += r.final_best() * r.final_best();
    best = std::min(best, r.final_best());
    worst = std::max(worst, r.final_best());
  }
  const double n = static_cast<double>(records.size());
  const double mean = sum / n;
  std::ostringstream summary;
  summary << "records,mean_final,stderr_final,min_final,max_final\n";
  std::string se;
  if (records.size() > 1) {
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
    se = format_number(std::sqrt(var / n));
  }
  summary << records.size() << "," << format_number(mean) << "," << se << ","
          << format_number(best) << "," << format_number(worst) << "\n";
  atomic_write(summary_path, summary.str());

  std::cout << "wrote " << trace_path << " and " << summary_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sequence-pair macro placement: batch BO and SA over an LP "
               "wirelength objective"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run seeded experiments");
  add_design_options(run, run_args.design);
  run->add_option("--algo", run_args.algo, "bo|sa")
      ->check(CLI::IsMember({"bo", "sa"}));
  run->add_option("--budget", run_args.budget, "objective evaluations per run");
  run->add_option("--batch-size", run_args.batch_size, "BO batch size B");
  run->add_option("--n-init", run_args.n_init, "BO initial design size");
  run->add_option("--rounds", run_args.rounds, "BO rounds (overrides --budget)");
  run->add_option("--acq", run_args.acq, "BO acquisition: ei|ucb")
      ->check(CLI::IsMember({"ei", "ucb"}));
  run->add_option("--ucb-beta", run_args.ucb_beta, "UCB exploration weight");
  run->add_option("--rho-scale", run_args.rho_scale,
                  "batch quality weight temperature");
  run->add_option("--s-max", run_args.s_max, "max coordinate rounds");
  run->add_option("--fit-iters", run_args.fit_iters,
                  "GP hyperparameter ascent iterations");
  run->add_option("--t0", run_args.t0, "SA initial temperature");
  run->add_option("--schedule", run_args.schedule,
                  "SA schedule: linear|exponential|stepdown")
      ->check(CLI::IsMember({"linear", "exponential", "stepdown"}));
  run->add_option("--t-final", run_args.t_final,
                  "SA final temperature (exponential)");
  run->add_option("--steps-per-stage", run_args.steps_per_stage,
                  "SA stepdown stage length (0 = budget/5)");
  run->add_option("--seed", run_args.seed, "base seed; repeat i uses seed+i");
  run->add_option("--repeats", run_args.repeats, "independent runs")
      ->check(CLI::PositiveNumber);
  run->add_option("--jobs", run_args.jobs, "concurrent repeats");
  run->add_option("--out-dir", run_args.out_dir, "output directory");
  run->add_option("--tag", run_args.tag, "filename prefix for this experiment");

  DesignArgs pack_design;
  std::string pack_sp, pack_svg;
  std::optional<std::uint64_t> pack_seed;
  bool pack_json = false;
  CLI::App* pack_cmd =
      app.add_subcommand("pack", "pack a sequence pair and report coordinates");
  add_design_options(pack_cmd, pack_design);
  pack_cmd->add_option("--sp", pack_sp, "sequence pair literal 'pi;pi_prime'");
  pack_cmd->add_option("--sp-seed", pack_seed, "derive the pair from a seed");
  pack_cmd->add_option("--svg", pack_svg, "write an SVG rendering here");
  pack_cmd->add_flag("--json", pack_json, "emit JSON instead of text");

  DesignArgs eval_design;
  std::string eval_sp, eval_json, eval_csv, eval_svg;
  std::optional<std::uint64_t> eval_seed;
  CLI::App* eval_cmd = app.add_subcommand(
      "evaluate", "solve the wirelength program for one sequence pair");
  add_design_options(eval_cmd, eval_design);
  eval_cmd->add_option("--sp", eval_sp, "sequence pair literal 'pi;pi_prime'");
  eval_cmd->add_option("--sp-seed", eval_seed, "derive the pair from a seed");
  eval_cmd->add_option("--json", eval_json, "write placement JSON here");
  eval_cmd->add_option("--csv", eval_csv, "write placement CSV here");
  eval_cmd->add_option("--svg", eval_svg, "write an SVG rendering here");

  std::vector<std::string> report_files;
  std::string report_trace = "trace.csv", report_summary = "aggregate.csv";
  CLI::App* report_cmd =
      app.add_subcommand("report", "aggregate run records into CSV tables");
  report_cmd->add_option("files", report_files, "run record files")->required();
  report_cmd->add_option("--trace-csv", report_trace,
                         "per-iteration best-so-far output");
  report_cmd->add_option("--summary-csv", report_summary,
                         "final statistics output");

  try {
    app.parse(argc, argv);
    if (*run) return cmd_run(run_args);
    if (*pack_cmd)
      return cmd_pack(pack_design, pack_sp, pack_seed, pack_svg, pack_json);
    if (*eval_cmd)
      return cmd_evaluate(eval_design, eval_sp, eval_seed, eval_json, eval_csv,
                          eval_svg);
    if (*report_cmd)
      return cmd_report(report_files, report_trace, report_summary);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
