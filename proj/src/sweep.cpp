#include <algorithm>
#include <atomic>
#include <thread>

#include "dart/scenario.hpp"

namespace dart {
namespace {

constexpr std::string_view kFixedKeys[] = {"nodes", "sim_time", "deadline_ms", "interval_s"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

struct Job {
  Scenario scenario;
  std::vector<std::string> key;
};

}  // namespace

SweepAxis parse_axis(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) {
    throw ScenarioError(std::string(trim(spec)), 0, "axis must look like key=v1,v2,...");
  }
  SweepAxis axis;
  axis.key = std::string(trim(spec.substr(0, eq)));
  std::string_view rest = spec.substr(eq + 1);
  while (true) {
    const auto comma = rest.find(',');
    const auto v = trim(rest.substr(0, comma));
    if (v.empty()) throw ScenarioError(axis.key, 0, "empty axis value");
    axis.values.emplace_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  // Fail early on unknown keys or bad values.
  Scenario probe;
  for (const auto& v : axis.values) set_value(probe, axis.key, v);
  return axis;
}

std::vector<std::uint64_t> parse_seeds(std::string_view list) {
  std::vector<std::uint64_t> seeds;
  Scenario probe;
  std::string_view rest = list;
  while (true) {
    const auto comma = rest.find(',');
    set_value(probe, "seed", rest.substr(0, comma));
    seeds.push_back(probe.seed);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return seeds;
}

SweepResult run_sweep(const Scenario& base, const SweepOptions& options) {
  SweepResult result;
  for (auto k : kFixedKeys) result.key_columns.emplace_back(k);
  for (const auto& axis : options.axes) {
    if (axis.values.empty()) throw ScenarioError(axis.key, 0, "axis has no values");
    if (std::find(result.key_columns.begin(), result.key_columns.end(), axis.key) ==
        result.key_columns.end()) {
      result.key_columns.push_back(axis.key);
    }
  }
  const std::vector<std::uint64_t> seeds =
      options.seeds.empty() ? std::vector<std::uint64_t>{base.seed} : options.seeds;

  // Cartesian product, first axis outermost, seeds innermost.
  std::size_t points = 1;
  for (const auto& axis : options.axes) points *= axis.values.size();
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < points; ++p) {
    std::vector<std::size_t> idx(options.axes.size());
    for (std::size_t a = options.axes.size(), rest = p; a-- > 0;) {
      idx[a] = rest % options.axes[a].values.size();
      rest /= options.axes[a].values.size();
    }
    Scenario point = base;
    for (std::size_t a = 0; a < options.axes.size(); ++a) {
      set_value(point, options.axes[a].key, options.axes[a].values[idx[a]]);
    }
    std::vector<std::string> key = {std::to_string(point.nodes), format_number(point.sim_time),
                                    format_number(point.deadline_ms),
                                    format_number(point.interval_s)};
    for (std::size_t c = std::size(kFixedKeys); c < result.key_columns.size(); ++c) {
      for (std::size_t a = 0; a < options.axes.size(); ++a) {
        if (options.axes[a].key == result.key_columns[c]) {
          key.push_back(options.axes[a].values[idx[a]]);
          break;
        }
      }
    }
    validate(point);
    for (auto seed : seeds) {
      Scenario run = point;
      run.seed = seed;
      jobs.push_back({std::move(run), key});
    }
  }

  result.total_runs = jobs.size();
  std::vector<std::optional<RunOutput>> outputs(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        RunOutput out = run_scenario(jobs[i].scenario);
        out.trace.clear();
        out.trace.shrink_to_fit();
        outputs[i] = std::move(out);
      } catch (const std::exception& e) {
        errors[i] = "run " + std::to_string(i) + " (seed " + std::to_string(jobs[i].scenario.seed) +
                    "): " + e.what();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(options.jobs, jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (outputs[i]) {
      result.runs.push_back({jobs[i].key, outputs[i]->metrics});
      result.run_infos.push_back(outputs[i]->info);
    } else {
      result.errors.push_back(errors[i]);
    }
  }
  result.rows = aggregate(result.runs);
  return result;
}

std::string sweep_runs_csv(const SweepResult& r) {
  std::string out = std::string(kRunCsvHeader) + '\n';
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    out += csv_row(r.run_infos[i], r.runs[i].metrics) + '\n';
  }
  return out;
}

std::string sweep_summary_csv(const SweepResult& r) {
  std::string out = aggregate_csv_header(r.key_columns) + '\n';
  for (const auto& row : r.rows) out += aggregate_csv_row(row) + '\n';
  if (!r.complete()) {
    out += "# incomplete: " + std::to_string(r.errors.size()) + " of " +
           std::to_string(r.total_runs) + " runs failed\n";
  }
  return out;
}

}  // namespace dart
