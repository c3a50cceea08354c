// dart: run, sweep, replay and validate delay-aware routing experiments.
//
// Exit codes: 0 ok, 1 validation error, 2 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "dart/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kRuntimeFailure = 2;

struct ScenarioArgs {
  std::string scenario_path;
  std::vector<std::string> overrides;
};

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& args) {
  cmd->add_option("--scenario", args.scenario_path, "Scenario file (key = value)");
  cmd->add_option("--set", args.overrides, "Override one key, e.g. --set nodes=100")
      ->take_all()
      ->allow_extra_args(false);
}

dart::Scenario resolve(const ScenarioArgs& args) {
  dart::Scenario s = args.scenario_path.empty() ? dart::parse_scenario("")
                                                : dart::load_scenario(args.scenario_path);
  for (const auto& o : args.overrides) dart::apply_override(s, o);
  dart::validate(s);
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-aware WSN routing simulator"};
  app.require_subcommand(1);

  ScenarioArgs run_args;
  std::string run_out;
  bool run_trace = false;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment and print its CSV row");
  add_scenario_flags(run_cmd, run_args);
  run_cmd->add_option("--out", run_out, "Directory for run.csv (and trace.csv with --trace)");
  run_cmd->add_flag("--trace", run_trace, "Write the full event trace");

  ScenarioArgs sweep_args;
  std::vector<std::string> axes;
  std::string seeds;
  std::string sweep_out;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the cartesian product of axes x seeds");
  add_scenario_flags(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--axis", axes, "Sweep axis key=v1,v2,... (repeatable)");
  sweep_cmd->add_option("--seeds", seeds, "Comma separated seeds");
  sweep_cmd->add_option("--out", sweep_out, "Directory for runs.csv and summary.csv");
  sweep_cmd->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  std::string trace_path;
  auto* replay_cmd = app.add_subcommand("replay", "Recompute metrics from a trace file");
  replay_cmd->add_option("trace", trace_path, "Trace written by `run --trace`")->required();

  ScenarioArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario and print it resolved");
  add_scenario_flags(validate_cmd, validate_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (*validate_cmd) {
      std::cout << dart::describe(resolve(validate_args));
      return kOk;
    }

    if (*run_cmd) {
      const dart::Scenario s = resolve(run_args);
      const dart::RunOutput out = dart::run_scenario(s, run_trace);
      for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
      const std::string csv =
          std::string(dart::kRunCsvHeader) + '\n' + dart::csv_row(out.info, out.metrics) + '\n';
      std::cout << csv;
      if (!run_out.empty() || run_trace) {
        const fs::path dir = run_out.empty() ? fs::path(".") : fs::path(run_out);
        fs::create_directories(dir);
        write_file(dir / "run.csv", csv);
        if (run_trace) {
          std::ofstream t(dir / "trace.csv");
          if (!t) throw std::runtime_error("cannot write " + (dir / "trace.csv").string());
          dart::write_trace(t, out.trace);
        }
      }
      return kOk;
    }

    if (*sweep_cmd) {
      const dart::Scenario base = resolve(sweep_args);
      dart::SweepOptions opts;
      for (const auto& a : axes) opts.axes.push_back(dart::parse_axis(a));
      if (!seeds.empty()) opts.seeds = dart::parse_seeds(seeds);
      opts.jobs = jobs;
      const dart::SweepResult r = dart::run_sweep(base, opts);
      const std::string summary = dart::sweep_summary_csv(r);
      std::cout << summary;
      if (!sweep_out.empty()) {
        fs::create_directories(sweep_out);
        write_file(fs::path(sweep_out) / "runs.csv", dart::sweep_runs_csv(r));
        write_file(fs::path(sweep_out) / "summary.csv", summary);
      }
      for (const auto& e : r.errors) std::cerr << "error: " << e << '\n';
      return r.complete() ? kOk : kRuntimeFailure;
    }

    if (*replay_cmd) {
      const dart::ReplayOutput r = dart::replay(fs::path(trace_path));
      std::cout << dart::kRunCsvHeader << '\n' << dart::csv_row(r.info, r.metrics) << '\n';
      return kOk;
    }
  } catch (const dart::ScenarioError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return kValidationError;
  } catch (const dart::TraceParseError& e) {
    std::cerr << "bad trace: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}
