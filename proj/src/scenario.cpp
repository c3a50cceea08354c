#include "dart/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace dart {

ScenarioError::ScenarioError(std::string key, std::size_t line, const std::string& message)
    : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string()) +
                         (key.empty() ? "" : key + ": ") + message),
      key_(std::move(key)),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

// Setters throw std::invalid_argument with a short reason; the caller adds
// the key and line.
double to_real(std::string_view v) {
  const auto d = parse_number(trim(v));
  if (!d || std::isnan(*d)) throw std::invalid_argument("expected a number, got '" + std::string(v) + "'");
  return *d;
}

std::uint64_t to_uint(std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint32_t to_u32(std::string_view v) {
  const auto x = to_uint(v);
  if (x > 0xffffffffULL) throw std::invalid_argument("value too large");
  return static_cast<std::uint32_t>(x);
}

std::string fmt(double v) { return format_number(v); }

std::string fmt_ids(const std::vector<std::uint32_t>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
  return s;
}

struct KeySpec {
  std::string_view name;
  std::string_view section;
  std::function<void(Scenario&, std::string_view)> set;
  std::function<std::string(const Scenario&)> get;
};

// Shorthands for fields held in seconds but configured in milliseconds.
KeySpec ms_key(std::string_view name, std::string_view section, Seconds MacDelayModel::*field) {
  return {name, section, [field](Scenario& s, std::string_view v) { s.mac.*field = to_real(v) * 1e-3; },
          [field](const Scenario& s) {
            // Trim the conversion noise (0.26e-3 * 1e3 is not exactly 0.26).
            const double ms = s.mac.*field * 1e3;
            return fmt(std::round(ms * 1e9) / 1e9);
          }};
}

KeySpec timing_key(std::string_view name, double ProtocolTiming::*field) {
  return {name, "protocol",
          [field](Scenario& s, std::string_view v) { s.timing.*field = to_real(v); },
          [field](const Scenario& s) { return fmt(s.timing.*field); }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"nodes", "topology", [](Scenario& s, std::string_view v) { s.nodes = to_u32(v); },
       [](const Scenario& s) { return std::to_string(s.nodes); }},
      {"area_width", "topology", [](Scenario& s, std::string_view v) { s.area_width = to_real(v); },
       [](const Scenario& s) { return fmt(s.area_width); }},
      {"area_height", "topology",
       [](Scenario& s, std::string_view v) { s.area_height = to_real(v); },
       [](const Scenario& s) { return fmt(s.area_height); }},
      {"placement", "topology",
       [](Scenario& s, std::string_view v) {
         v = trim(v);
         if (v == "uniform") s.placement = Placement::kUniform;
         else if (v == "grid") s.placement = Placement::kGrid;
         else if (v == "explicit") s.placement = Placement::kExplicit;
         else throw std::invalid_argument("expected uniform, grid or explicit");
       },
       [](const Scenario& s) -> std::string {
         switch (s.placement) {
           case Placement::kUniform: return "uniform";
           case Placement::kGrid: return "grid";
           case Placement::kExplicit: return "explicit";
         }
         return "?";
       }},
      {"positions", "topology",
       [](Scenario& s, std::string_view v) {
         s.positions.clear();
         if (trim(v).empty()) return;
         for (auto item : split(v, ',')) {
           const auto xy = split(item, ':');
           if (xy.size() != 2) throw std::invalid_argument("positions are x:y pairs");
           s.positions.push_back({to_real(xy[0]), to_real(xy[1])});
         }
       },
       [](const Scenario& s) {
         std::string out;
         for (std::size_t i = 0; i < s.positions.size(); ++i) {
           out += (i ? ", " : "") + fmt(s.positions[i].x) + ":" + fmt(s.positions[i].y);
         }
         return out;
       }},
      {"tx_range", "topology", [](Scenario& s, std::string_view v) { s.tx_range = to_real(v); },
       [](const Scenario& s) { return fmt(s.tx_range); }},
      {"sink_id", "topology", [](Scenario& s, std::string_view v) { s.sink_id = to_u32(v); },
       [](const Scenario& s) { return std::to_string(s.sink_id); }},
      {"sink_x", "topology", [](Scenario& s, std::string_view v) { s.sink_x = to_real(v); },
       [](const Scenario& s) { return fmt(s.sink_x); }},
      {"sink_y", "topology", [](Scenario& s, std::string_view v) { s.sink_y = to_real(v); },
       [](const Scenario& s) { return fmt(s.sink_y); }},

      {"sources", "traffic", [](Scenario& s, std::string_view v) { s.sources = to_u32(v); },
       [](const Scenario& s) { return std::to_string(s.sources); }},
      {"source_ids", "traffic",
       [](Scenario& s, std::string_view v) {
         s.source_ids.clear();
         if (trim(v).empty()) return;
         for (auto item : split(v, ',')) s.source_ids.push_back(to_u32(item));
       },
       [](const Scenario& s) { return fmt_ids(s.source_ids); }},
      {"interval_s", "traffic", [](Scenario& s, std::string_view v) { s.interval_s = to_real(v); },
       [](const Scenario& s) { return fmt(s.interval_s); }},
      {"deadline_ms", "traffic", [](Scenario& s, std::string_view v) { s.deadline_ms = to_real(v); },
       [](const Scenario& s) { return fmt(s.deadline_ms); }},
      {"cbr_start", "traffic", [](Scenario& s, std::string_view v) { s.cbr_start = to_real(v); },
       [](const Scenario& s) { return fmt(s.cbr_start); }},
      {"cbr_stop", "traffic",
       [](Scenario& s, std::string_view v) {
         if (trim(v).empty()) s.cbr_stop.reset();
         else s.cbr_stop = to_real(v);
       },
       [](const Scenario& s) { return s.cbr_stop ? fmt(*s.cbr_stop) : std::string(); }},

      ms_key("base_mac_delay_ms", "mac", &MacDelayModel::base_mac_delay),
      ms_key("tx_delay_ms", "mac", &MacDelayModel::tx_delay),
      ms_key("contention_coeff_ms", "mac", &MacDelayModel::contention_coeff),
      ms_key("jitter_mean_ms", "mac", &MacDelayModel::jitter_mean),
      {"queue_service_rate", "mac",
       [](Scenario& s, std::string_view v) { s.mac.queue_service_rate = to_real(v); },
       [](const Scenario& s) { return fmt(s.mac.queue_service_rate); }},
      {"max_retries", "mac", [](Scenario& s, std::string_view v) { s.mac.max_retries = to_u32(v); },
       [](const Scenario& s) { return std::to_string(s.mac.max_retries); }},
      {"loss", "mac", [](Scenario& s, std::string_view v) { s.loss = to_real(v); },
       [](const Scenario& s) { return fmt(s.loss); }},

      timing_key("hello_period", &ProtocolTiming::hello_period),
      timing_key("hello_jitter", &ProtocolTiming::hello_jitter),
      timing_key("ack_jitter", &ProtocolTiming::ack_jitter),
      timing_key("discovery_time", &ProtocolTiming::discovery_time),
      timing_key("echo_period", &ProtocolTiming::echo_period),
      timing_key("neighbor_timeout", &ProtocolTiming::neighbor_timeout),
      timing_key("load_window", &ProtocolTiming::load_window),
      timing_key("delay_smoothing", &ProtocolTiming::delay_smoothing),
      timing_key("initial_energy", &ProtocolTiming::initial_energy),

      {"sim_time", "run", [](Scenario& s, std::string_view v) { s.sim_time = to_real(v); },
       [](const Scenario& s) { return fmt(s.sim_time); }},
      {"seed", "run", [](Scenario& s, std::string_view v) { s.seed = to_uint(v); },
       [](const Scenario& s) { return std::to_string(s.seed); }},
      {"snapshot_period", "run",
       [](Scenario& s, std::string_view v) { s.snapshot_period = to_real(v); },
       [](const Scenario& s) { return fmt(s.snapshot_period); }},
  };
  return table;
}

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : key_table()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

constexpr std::string_view kSections[] = {"topology", "traffic", "mac", "protocol", "run"};

void assign(Scenario& s, std::string_view key, std::string_view value, std::size_t line,
            std::string_view section) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ScenarioError(std::string(key), line, "unknown key");
  if (!section.empty() && spec->section != section) {
    throw ScenarioError(std::string(key), line,
                        "belongs to [" + std::string(spec->section) + "], not [" +
                            std::string(section) + "]");
  }
  try {
    spec->set(s, value);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string(key), line, e.what());
  }
}

void check(bool ok, std::string_view key, const std::string& message) {
  if (!ok) throw ScenarioError(std::string(key), 0, message);
}

}  // namespace

std::optional<std::uint64_t> seed_from_env() {
  const char* env = std::getenv("DART_SEED");
  if (!env || !*env) return std::nullopt;
  try {
    return to_uint(env);
  } catch (const std::invalid_argument&) {
    throw ScenarioError("DART_SEED", 0, "expected a non-negative integer");
  }
}

Scenario default_scenario() {
  Scenario s;
  if (const auto seed = seed_from_env()) s.seed = *seed;
  return s;
}

Scenario parse_scenario(std::string_view text, Scenario base) {
  std::string_view section;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioError("", lineno, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (std::find(std::begin(kSections), std::end(kSections), name) == std::end(kSections)) {
        throw ScenarioError("", lineno, "unknown section [" + std::string(name) + "]");
      }
      section = *std::find(std::begin(kSections), std::end(kSections), name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ScenarioError("", lineno, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ScenarioError("", lineno, "missing key before '='");
    assign(base, key, trim(line.substr(eq + 1)), lineno, section);
  }
  validate(base);
  return base;
}

Scenario load_scenario(const std::filesystem::path& path, Scenario base) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", 0, "cannot read scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), std::move(base));
}

void set_value(Scenario& s, std::string_view key, std::string_view value) {
  assign(s, trim(key), trim(value), 0, {});
}

void apply_override(Scenario& s, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ScenarioError(std::string(trim(assignment)), 0, "override must look like key=value");
  }
  set_value(s, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void validate(const Scenario& s) {
  const bool explicit_pos = s.placement == Placement::kExplicit;
  if (explicit_pos) {
    check(s.positions.size() >= 2, "positions", "explicit placement needs at least 2 positions");
  } else {
    check(s.nodes >= 2, "nodes", "must be at least 2");
  }
  const std::uint32_t n = explicit_pos ? static_cast<std::uint32_t>(s.positions.size()) : s.nodes;
  check(s.area_width > 0.0 && std::isfinite(s.area_width), "area_width", "must be positive");
  check(s.area_height > 0.0 && std::isfinite(s.area_height), "area_height", "must be positive");
  for (const auto& p : s.positions) {
    check(p.x >= 0.0 && p.x <= s.area_width && p.y >= 0.0 && p.y <= s.area_height, "positions",
          "position " + fmt(p.x) + ":" + fmt(p.y) + " lies outside the area");
  }
  check(s.tx_range > 0.0, "tx_range", "must be positive");
  check(s.sink_id < n, "sink_id", "must name one of the " + std::to_string(n) + " nodes");
  check(s.sink_x >= 0.0 && s.sink_x <= s.area_width, "sink_x", "outside the area");
  check(s.sink_y >= 0.0 && s.sink_y <= s.area_height, "sink_y", "outside the area");

  check(!s.source_ids.empty() || s.sources < n, "sources", "must be below the node count");
  std::set<std::uint32_t> seen;
  for (auto id : s.source_ids) {
    check(id < n, "source_ids", "node " + std::to_string(id) + " does not exist");
    check(id != s.sink_id, "source_ids", "the sink cannot be a source");
    check(seen.insert(id).second, "source_ids", "node " + std::to_string(id) + " listed twice");
  }
  check(s.interval_s > 0.0, "interval_s", "must be positive");
  check(s.deadline_ms > 0.0, "deadline_ms", "must be positive");
  check(s.cbr_start >= 0.0, "cbr_start", "must be non-negative");
  check(!s.cbr_stop || *s.cbr_stop > s.cbr_start, "cbr_stop", "must be after cbr_start");

  check(s.mac.base_mac_delay >= 0.0, "base_mac_delay_ms", "must be non-negative");
  check(s.mac.tx_delay >= 0.0, "tx_delay_ms", "must be non-negative");
  check(s.mac.contention_coeff >= 0.0, "contention_coeff_ms", "must be non-negative");
  check(s.mac.jitter_mean >= 0.0, "jitter_mean_ms", "must be non-negative");
  check(s.mac.queue_service_rate > 0.0, "queue_service_rate", "must be positive (inf allowed)");
  check(s.mac.max_retries <= 64, "max_retries", "must be at most 64");
  check(s.loss >= 0.0 && s.loss <= 1.0, "loss", "must be within [0, 1]");

  const auto& t = s.timing;
  check(t.hello_period > 0.0, "hello_period", "must be positive");
  check(t.hello_jitter >= 0.0, "hello_jitter", "must be non-negative");
  check(t.ack_jitter >= 0.0, "ack_jitter", "must be non-negative");
  check(t.discovery_time >= 0.0, "discovery_time", "must be non-negative");
  check(t.echo_period > 0.0, "echo_period", "must be positive");
  check(t.neighbor_timeout > 0.0, "neighbor_timeout", "must be positive");
  check(t.load_window >= 0.0, "load_window", "must be non-negative");
  check(t.delay_smoothing > 0.0 && t.delay_smoothing <= 1.0, "delay_smoothing",
        "must be within (0, 1]");
  check(t.initial_energy >= 0.0, "initial_energy", "must be non-negative");

  check(s.sim_time > 0.0 && std::isfinite(s.sim_time), "sim_time", "must be positive");
  check(s.snapshot_period >= 0.0, "snapshot_period", "must be non-negative");
}

std::string describe(const Scenario& s) {
  std::string out;
  for (auto section : kSections) {
    out += "[" + std::string(section) + "]\n";
    for (const auto& k : key_table()) {
      if (k.section == section) out += std::string(k.name) + " = " + k.get(s) + "\n";
    }
  }
  return out;
}

std::vector<std::string> scenario_keys() {
  std::vector<std::string> keys;
  for (const auto& k : key_table()) keys.emplace_back(k.name);
  return keys;
}

SimConfig to_sim_config(const Scenario& s, bool trace_control) {
  validate(s);
  TopologySpec spec;
  spec.node_count = s.nodes;
  spec.area_width = s.area_width;
  spec.area_height = s.area_height;
  spec.placement = s.placement;
  spec.positions = s.positions;
  spec.tx_range = s.tx_range;
  spec.sink = NodeId{s.sink_id};
  spec.sink_pos = {s.sink_x, s.sink_y};

  SimConfig cfg;
  cfg.topology = build_topology(spec, s.seed);
  cfg.radio = RadioModel{s.tx_range, s.loss};
  cfg.mac = s.mac;
  cfg.timing = s.timing;
  cfg.sim_time = s.sim_time;
  cfg.seed = s.seed;
  cfg.snapshot_period = s.snapshot_period;
  cfg.trace_control = trace_control;

  std::vector<NodeId> ids;
  if (!s.source_ids.empty()) {
    for (auto id : s.source_ids) ids.push_back(NodeId{id});
  } else {
    ids = farthest_from_sink(cfg.topology, s.sources);
  }
  for (NodeId id : ids) {
    CbrSource src;
    src.node = id;
    src.interval = s.interval_s;
    src.packet_deadline = s.deadline_ms * 1e-3;
    src.start_at = s.cbr_start;
    src.stop_at = s.cbr_stop;
    cfg.sources.push_back(src);
  }

  cfg.info.nodes = static_cast<std::uint32_t>(cfg.topology.size());
  cfg.info.sim_time = s.sim_time;
  cfg.info.deadline_ms = s.deadline_ms;
  cfg.info.interval_s = s.interval_s;
  cfg.info.seed = s.seed;
  return cfg;
}

RunOutput run_scenario(const Scenario& s, bool trace_control) {
  const SimConfig cfg = to_sim_config(s, trace_control);
  RunResult r = run_simulation(cfg);
  RunOutput out;
  out.info = cfg.info;
  out.metrics = compute_metrics(r.trace);
  out.trace = std::move(r.trace);
  out.warnings = std::move(r.warnings);
  return out;
}

ReplayOutput replay(std::istream& is) {
  const Trace trace = read_trace(is);
  if (trace.empty()) return ReplayOutput{};
  if (trace.front().kind != TraceKind::kRun) throw TraceParseError(2, "first record must be RUN");
  if (trace.back().kind != TraceKind::kEnd) {
    throw TraceParseError(trace.size() + 2, "missing END record (truncated trace?)");
  }
  return ReplayOutput{run_info(trace), compute_metrics(trace)};
}

ReplayOutput replay(const std::filesystem::path& trace_path) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot read trace file " + trace_path.string());
  return replay(in);
}

}  // namespace dart
