#pragma once

// The three QoS figures of a run (average end-to-end delay, packet delivery
// ratio, deadline miss ratio), computed from a trace, plus CSV helpers and
// cross-seed aggregation.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dart/simkernel.hpp"
#include "dart/trace.hpp"

namespace dart {

/// Undefined ratios and averages (nothing sent, nothing received) are empty,
/// never zero.
struct RunMetrics {
  std::uint64_t sent_events = 0;
  std::uint64_t received_events = 0;  // distinct event ids seen at the sink
  std::optional<Seconds> avg_e2e_delay;
  std::optional<double> pdr;
  std::optional<double> deadline_miss_ratio;
  std::uint64_t no_route_drops = 0;  // routing voids plus exhausted budgets
  std::uint64_t budget_drops = 0;    // the exhausted-budget share of the above
  std::uint64_t loss_drops = 0;
  std::uint64_t unfinished_copies = 0;
  std::uint64_t copies_created = 0;
  std::uint64_t copies_delivered = 0;

  bool operator==(const RunMetrics&) const = default;
};

/// Mean over distinct received events of first-copy arrival minus creation.
std::optional<Seconds> end_to_end_delay(const Trace& trace);
/// Distinct events received over events generated, deadline ignored.
std::optional<double> packet_delivery_ratio(const Trace& trace);
/// Events never received or first received after t_set, over events generated.
std::optional<double> deadline_miss_ratio(const Trace& trace);

RunMetrics compute_metrics(const Trace& trace);

/// Reads the RUN record. Throws std::runtime_error if there is none.
RunInfo run_info(const Trace& trace);

inline constexpr const char* kRunCsvHeader =
    "nodes,sim_time,deadline_ms,interval_s,seed,avg_e2e_delay_ms,pdr,deadline_miss_ratio,"
    "no_route_drops,loss_drops";

std::string csv_row(const RunInfo& info, const RunMetrics& m);

struct Stat {
  std::optional<double> mean;
  std::optional<double> stddev;  // sample standard deviation, needs >= 2 values
};

Stat summarize(std::span<const double> values);

struct GroupedRun {
  std::vector<std::string> key;  // group column values, already formatted
  RunMetrics metrics;
};

struct AggregateRow {
  std::vector<std::string> key;
  std::size_t runs = 0;
  Stat avg_e2e_delay_ms;
  Stat pdr;
  Stat deadline_miss_ratio;
  Stat no_route_drops;
  Stat loss_drops;
};

/// Groups runs by key, in order of first appearance.
std::vector<AggregateRow> aggregate(std::span<const GroupedRun> runs);

std::string aggregate_csv_header(std::span<const std::string> key_columns);
std::string aggregate_csv_row(const AggregateRow& row);

}  // namespace dart
