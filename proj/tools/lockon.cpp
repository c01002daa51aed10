// lockon: simulate frame logs, run the localization methods on them, score
// estimate files and sweep tunables.
//
// Exit codes: 0 success, 1 internal failure, 2 bad input or usage.

#include "lockon/frame_log.hpp"
#include "lockon/pipeline.hpp"
#include "lockon/results.hpp"
#include "lockon/simulator.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace lockon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

fs::path default_out_dir() {
  if (const char* env = std::getenv("LOCKON_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return ".";
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw InputError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  body(os);
  os.flush();
  if (!os) throw InputError("failed writing " + path.string());
}

FrameLog load_log(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot read " + path.string());
  return read_frame_log(is);
}

std::vector<RecallBin> parse_bins(const std::string& spec) {
  std::vector<RecallBin> bins;
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InputError("bin '" + item + "' must look like METRES:DEGREES");
    const RecallBin b{detail::parse_double(item.substr(0, colon)), detail::parse_double(item.substr(colon + 1))};
    if (!(b.trans > 0.0) || !(b.rot > 0.0)) throw InputError("bin thresholds must be positive");
    bins.push_back(b);
  }
  if (bins.empty()) throw InputError("no recall bins given");
  return bins;
}

/// Tunable flags shared by run and sweep. Values stay unset unless given so
/// that defaults live in RunConfig only.
struct TunableFlags {
  std::map<std::string, double> values;
  std::string bins = "0.25:2,0.5:5,5:10";
  bool no_constraint = false;
  std::string warmup_speed = "median";
  bool plain_when_unconstrained = false;

  void add_to(CLI::App* cmd) {
    for (const std::string& name : tunable_parameters()) {
      std::string flag = "--" + name;
      for (char& c : flag) c = c == '_' ? '-' : c;
      cmd->add_option_function<double>(
          flag, [this, name](double v) { values[name] = v; }, "override " + name);
    }
    cmd->add_option("--bins", bins, "recall bins as METRES:DEGREES,...")->capture_default_str();
    cmd->add_flag("--no-constraint-detection", no_constraint, "never tighten the gate (ours)");
    cmd->add_flag("--plain-when-unconstrained", plain_when_unconstrained,
                  "use the constant variance on frames without lock-on (ours)");
    cmd->add_option("--warmup-speed", warmup_speed, "warmup speed estimator")
        ->check(CLI::IsMember({"mean", "median"}))
        ->capture_default_str();
  }

  RunConfig config(Method method) const {
    RunConfig cfg;
    cfg.method = method;
    for (const auto& [name, v] : values) set_parameter(cfg, name, v);
    cfg.constraint_detection = !no_constraint;
    cfg.rbf_when_unconstrained = !plain_when_unconstrained;
    cfg.filter.warmup_speed = warmup_speed == "mean" ? WarmupSpeed::Mean : WarmupSpeed::Median;
    cfg.validate();
    return cfg;
  }
};

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const std::string& n : names) out.push_back(method_from_string(n));
  return out;
}

void report_warnings(const RunResult& r) {
  for (const std::string& w : r.warnings) std::cerr << "warning: " << to_string(r.method) << ": " << w << '\n';
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string preset_name;
  std::string scenario_file;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::string output;
  std::string out_dir;
};

int cmd_simulate(const SimulateArgs& a) {
  Scenario sc;
  if (!a.scenario_file.empty()) {
    std::ifstream is(a.scenario_file);
    if (!is) throw InputError("cannot read " + a.scenario_file);
    json j;
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw InputError("scenario file: " + std::string(e.what()));
    }
    try {
      sc = scenario_from_json(j);
    } catch (const json::exception& e) {
      throw InputError("scenario file: " + std::string(e.what()));
    }
  } else {
    sc = preset(a.preset_name, 1);
  }
  if (a.seed) sc.seed = *a.seed;
  if (a.duration) sc.duration = *a.duration;
  sc.validate();

  const SimulatedLog sim = simulate(sc);
  const fs::path out = !a.output.empty()
                           ? fs::path(a.output)
                           : fs::path(a.out_dir.empty() ? default_out_dir() : fs::path(a.out_dir)) /
                                 (sc.name + "-s" + std::to_string(sc.seed) + ".jsonl");
  write_file(out, [&](std::ostream& os) { write_frame_log(os, to_frame_log(sim)); });

  std::size_t measured = 0;
  for (const FrameRecord& f : sim.frames) measured += f.meas ? 1 : 0;
  std::cout << "wrote " << out.string() << '\n'
            << "  frames " << sim.frames.size() << ", measured " << measured << ", truly constrained "
            << fmt_fixed(truth_constraint_fraction(sim.frames), 3) << '\n';
  return kExitOk;
}

// --- run -------------------------------------------------------------------

struct RunArgs {
  std::string log;
  std::vector<std::string> methods{"pnp", "ekf", "ours"};
  std::string out_dir;
  TunableFlags tunables;
};

fs::path out_base(const std::string& out_dir, const std::string& log) {
  const fs::path dir = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
  return dir / fs::path(log).stem();
}

int cmd_run(const RunArgs& a) {
  const FrameLog log = load_log(a.log);
  const auto bins = parse_bins(a.tunables.bins);
  const fs::path base = out_base(a.out_dir, a.log);

  std::vector<Summary> summaries;
  for (Method m : parse_methods(a.methods)) {
    const RunConfig cfg = a.tunables.config(m);
    const RunResult r = run_method(log.frames, log.camera, cfg);
    report_warnings(r);
    const fs::path est = base.string() + "." + to_string(m) + ".estimates.csv";
    write_file(est, [&](std::ostream& os) { write_estimates(os, m, r.estimates); });
    std::cout << "wrote " << est.string() << '\n';
    if (r.reports.empty()) continue;
    summaries.push_back(aggregate(r.reports, bins));
  }
  if (summaries.empty()) throw InputError("log too short for a single evaluation segment");

  const fs::path res = base.string() + ".results.csv";
  write_file(res, [&](std::ostream& os) { write_results(os, summaries); });
  std::cout << "wrote " << res.string() << "\n\n";
  print_summary_table(std::cout, summaries);
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string log;
  std::vector<std::string> estimates;
  std::string bins = "0.25:2,0.5:5,5:10";
  std::string output;
  std::string out_dir;
};

int cmd_eval(const EvalArgs& a) {
  const FrameLog log = load_log(a.log);
  const auto bins = parse_bins(a.bins);
  std::vector<Summary> summaries;
  for (const std::string& path : a.estimates) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot read " + path);
    try {
      summaries.push_back(evaluate_estimates(read_estimates(is), log.frames, bins));
    } catch (const InputError& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  const fs::path out = !a.output.empty() ? fs::path(a.output)
                                         : fs::path(out_base(a.out_dir, a.log).string() + ".eval.csv");
  write_file(out, [&](std::ostream& os) { write_results(os, summaries); });
  std::cout << "wrote " << out.string() << "\n\n";
  print_summary_table(std::cout, summaries);
  return kExitOk;
}

// --- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string log;
  std::string preset_name;
  std::uint64_t seed = 1;
  std::string parameter;
  std::vector<double> values;
  std::string method = "ours";
  std::string out_dir;
  TunableFlags tunables;
};

int cmd_sweep(const SweepArgs& a) {
  {
    RunConfig probe;
    set_parameter(probe, a.parameter, a.values.front());  // rejects unknown names before any work
  }
  FrameLog log;
  std::string stem;
  if (!a.log.empty()) {
    log = load_log(a.log);
    stem = fs::path(a.log).stem().string();
  } else {
    log = to_frame_log(simulate(preset(a.preset_name, a.seed)));
    stem = a.preset_name + "-s" + std::to_string(a.seed);
  }
  const auto bins = parse_bins(a.tunables.bins);
  const Method method = method_from_string(a.method);

  std::vector<SweepRow> rows;
  for (double v : a.values) {
    RunConfig cfg = a.tunables.config(method);
    set_parameter(cfg, a.parameter, v);
    cfg.validate();
    const RunResult r = run_method(log.frames, log.camera, cfg);
    report_warnings(r);
    if (r.reports.empty()) throw InputError("log too short for a single evaluation segment");
    rows.push_back({a.parameter, v, aggregate(r.reports, bins)});
  }
  const fs::path dir = a.out_dir.empty() ? default_out_dir() : fs::path(a.out_dir);
  const fs::path out = dir / (stem + ".sweep-" + a.parameter + "." + a.method + ".csv");
  write_file(out, [&](std::ostream& os) { write_sweep(os, rows); });
  std::cout << "wrote " << out.string() << "\n\n";
  print_sweep_table(std::cout, rows);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pose filtering with dynamic-vehicle lock-on: simulation, runs and evaluation"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "generate a frame log from a preset or scenario file");
  auto* preset_opt = simulate_cmd->add_option("--preset", sim.preset_name, "preset scenario name")
                         ->check(CLI::IsMember(preset_names()));
  auto* scenario_opt = simulate_cmd->add_option("--scenario", sim.scenario_file, "scenario JSON file");
  preset_opt->excludes(scenario_opt);
  simulate_cmd->add_option("--seed", sim.seed, "random seed");
  simulate_cmd->add_option("--duration", sim.duration, "override duration, s");
  simulate_cmd->add_option("-o,--output", sim.output, "output frame log path");
  simulate_cmd->add_option("--out-dir", sim.out_dir, "output directory (default $LOCKON_OUT_DIR or .)");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run localization methods over a frame log");
  run_cmd->add_option("--log", run.log, "frame log")->required();
  run_cmd->add_option("-m,--method", run.methods, "pnp, ekf and/or ours")
      ->delimiter(',')
      ->check(CLI::IsMember({"pnp", "ekf", "ours"}))
      ->capture_default_str();
  run_cmd->add_option("--out-dir", run.out_dir, "output directory (default $LOCKON_OUT_DIR or .)");
  run.tunables.add_to(run_cmd);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "score estimate files against a frame log");
  eval_cmd->add_option("--log", ev.log, "frame log with ground truth")->required();
  eval_cmd->add_option("--estimates", ev.estimates, "estimate CSV files")->required();
  eval_cmd->add_option("--bins", ev.bins, "recall bins as METRES:DEGREES,...")->capture_default_str();
  eval_cmd->add_option("-o,--output", ev.output, "results CSV path");
  eval_cmd->add_option("--out-dir", ev.out_dir, "output directory (default $LOCKON_OUT_DIR or .)");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate one method over values of a tunable");
  auto* log_opt = sweep_cmd->add_option("--log", sw.log, "frame log");
  auto* sweep_preset = sweep_cmd->add_option("--preset", sw.preset_name, "simulate this preset instead of a log")
                           ->check(CLI::IsMember(preset_names()));
  log_opt->excludes(sweep_preset);
  sweep_cmd->add_option("--seed", sw.seed, "seed for --preset")->capture_default_str();
  sweep_cmd->add_option("--param", sw.parameter, "tunable name")->required();
  sweep_cmd->add_option("--values", sw.values, "comma-separated values")->required()->delimiter(',');
  sweep_cmd->add_option("-m,--method", sw.method, "method")
      ->check(CLI::IsMember({"pnp", "ekf", "ours"}))
      ->capture_default_str();
  sweep_cmd->add_option("--out-dir", sw.out_dir, "output directory (default $LOCKON_OUT_DIR or .)");
  sw.tunables.add_to(sweep_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*simulate_cmd) {
      if (sim.preset_name.empty() && sim.scenario_file.empty()) throw InputError("simulate needs --preset or --scenario");
      return cmd_simulate(sim);
    }
    if (*run_cmd) return cmd_run(run);
    if (*eval_cmd) return cmd_eval(ev);
    if (*sweep_cmd) {
      if (sw.log.empty() && sw.preset_name.empty()) throw InputError("sweep needs --log or --preset");
      return cmd_sweep(sw);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InitializationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const UndefinedResult& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
