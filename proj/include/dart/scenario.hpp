#pragma once

// Scenario files, single runs, parameter sweeps and trace replay. The CLI in
// tools/ is a thin shell over these functions.
//
// Scenario grammar: one `key = value` per line, `#` starts a comment, and
// optional `[section]` headers (topology, traffic, mac, protocol, run). A key
// under a header must belong to that section; keys before any header may be
// from any section. Lists are comma separated; explicit positions are
// `x:y` pairs. Every key has a default, so an empty file is valid.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dart/metrics.hpp"
#include "dart/simkernel.hpp"

namespace dart {

struct Scenario {
  // [topology]
  std::uint32_t nodes = 50;
  Meters area_width = 600.0;
  Meters area_height = 400.0;
  Placement placement = Placement::kUniform;
  std::vector<NodePos> positions;
  Meters tx_range = 250.0;
  std::uint32_t sink_id = 0;
  Meters sink_x = 0.0;
  Meters sink_y = 0.0;

  // [traffic]
  std::uint32_t sources = 5;
  std::vector<std::uint32_t> source_ids;  // overrides `sources` when set
  Seconds interval_s = 1.0;
  double deadline_ms = 6.0;
  Seconds cbr_start = 1.0;
  std::optional<Seconds> cbr_stop;

  // [mac]
  MacDelayModel mac;
  double loss = 0.05;

  // [protocol]
  ProtocolTiming timing;

  // [run]
  Seconds sim_time = 100.0;
  std::uint64_t seed = 1;
  Seconds snapshot_period = 0.0;
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string key, std::size_t line, const std::string& message);

  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }  // 0 when not from a file line

 private:
  std::string key_;
  std::size_t line_;
};

/// Defaults, with the seed taken from DART_SEED when it is set.
Scenario default_scenario();
std::optional<std::uint64_t> seed_from_env();

/// Parses scenario text on top of `base`. Throws ScenarioError.
Scenario parse_scenario(std::string_view text, Scenario base = default_scenario());
Scenario load_scenario(const std::filesystem::path& path, Scenario base = default_scenario());
/// Applies one `key=value` override. Throws ScenarioError.
void apply_override(Scenario& s, std::string_view assignment);
void set_value(Scenario& s, std::string_view key, std::string_view value);
/// Cross-field checks. Throws ScenarioError naming the offending key.
void validate(const Scenario& s);

/// Resolved `key = value` lines, grouped by section.
std::string describe(const Scenario& s);
std::vector<std::string> scenario_keys();

SimConfig to_sim_config(const Scenario& s, bool trace_control = false);

struct RunOutput {
  RunInfo info;
  RunMetrics metrics;
  Trace trace;
  std::vector<std::string> warnings;
};

RunOutput run_scenario(const Scenario& s, bool trace_control = false);

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Parses `key=v1,v2,...`.
SweepAxis parse_axis(std::string_view spec);
std::vector<std::uint64_t> parse_seeds(std::string_view list);

struct SweepOptions {
  std::vector<SweepAxis> axes;
  std::vector<std::uint64_t> seeds;  // empty: the scenario's own seed
  unsigned jobs = 1;
};

struct SweepResult {
  std::vector<std::string> key_columns;
  std::vector<GroupedRun> runs;     // cartesian order, seeds innermost
  std::vector<RunInfo> run_infos;   // parallel to `runs`
  std::vector<AggregateRow> rows;
  std::size_t total_runs = 0;
  std::vector<std::string> errors;  // one per failed run

  bool complete() const { return errors.empty(); }
};

/// Runs the cartesian product of the axes for every seed. Output order does
/// not depend on `jobs`.
SweepResult run_sweep(const Scenario& base, const SweepOptions& options);

std::string sweep_runs_csv(const SweepResult& r);
std::string sweep_summary_csv(const SweepResult& r);

struct ReplayOutput {
  RunInfo info;
  RunMetrics metrics;
};

/// Recomputes metrics from a trace file. Throws TraceParseError on a
/// malformed or truncated file.
ReplayOutput replay(const std::filesystem::path& trace_path);
ReplayOutput replay(std::istream& is);

}  // namespace dart
