#include "dart/metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace dart {
namespace {

struct EventRecord {
  Seconds created_at = 0.0;
  Seconds t_set = 0.0;
  std::optional<Seconds> first_arrival;
};

// Ordered by event id so every consumer sums in the same order.
using EventBook = std::map<std::int64_t, EventRecord>;

EventBook book_events(const Trace& trace) {
  EventBook book;
  for (const auto& r : trace) {
    if (r.kind == TraceKind::kEmit) {
      EventRecord& e = book[r.event_id];
      e.created_at = r.time;
      e.t_set = r.number("t_set").value_or(0.0);
    } else if (r.kind == TraceKind::kDeliver) {
      auto it = book.find(r.event_id);
      if (it != book.end() && !it->second.first_arrival) it->second.first_arrival = r.time;
    }
  }
  return book;
}

std::optional<Seconds> mean_delay(const EventBook& book) {
  double sum = 0.0;
  std::uint64_t n = 0;
  for (const auto& [id, e] : book) {
    if (!e.first_arrival) continue;
    sum += *e.first_arrival - e.created_at;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::uint64_t received(const EventBook& book) {
  std::uint64_t n = 0;
  for (const auto& [id, e] : book) n += e.first_arrival ? 1 : 0;
  return n;
}

std::uint64_t missed(const EventBook& book) {
  std::uint64_t n = 0;
  for (const auto& [id, e] : book) {
    if (!e.first_arrival || *e.first_arrival - e.created_at > e.t_set) ++n;
  }
  return n;
}

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

std::optional<Seconds> end_to_end_delay(const Trace& trace) { return mean_delay(book_events(trace)); }

std::optional<double> packet_delivery_ratio(const Trace& trace) {
  const auto book = book_events(trace);
  return ratio(received(book), book.size());
}

std::optional<double> deadline_miss_ratio(const Trace& trace) {
  const auto book = book_events(trace);
  return ratio(missed(book), book.size());
}

RunMetrics compute_metrics(const Trace& trace) {
  const auto book = book_events(trace);
  RunMetrics m;
  m.sent_events = book.size();
  m.received_events = received(book);
  m.avg_e2e_delay = mean_delay(book);
  m.pdr = ratio(m.received_events, m.sent_events);
  m.deadline_miss_ratio = ratio(missed(book), m.sent_events);
  for (const auto& r : trace) {
    switch (r.kind) {
      case TraceKind::kEmit:
      case TraceKind::kDuplicate: ++m.copies_created; break;
      case TraceKind::kDeliver: ++m.copies_delivered; break;
      case TraceKind::kDrop: {
        const auto reason = r.field("reason").value_or("");
        if (reason == "no_route") {
          ++m.no_route_drops;
        } else if (reason == "no_budget") {
          ++m.no_route_drops;
          ++m.budget_drops;
        } else if (reason == "loss") {
          ++m.loss_drops;
        } else if (reason == "unfinished") {
          ++m.unfinished_copies;
        }
        break;
      }
      default: break;
    }
  }
  return m;
}

RunInfo run_info(const Trace& trace) {
  for (const auto& r : trace) {
    if (r.kind != TraceKind::kRun) continue;
    RunInfo info;
    info.nodes = static_cast<std::uint32_t>(r.number("nodes").value_or(0));
    info.sim_time = r.number("sim_time").value_or(0.0);
    info.deadline_ms = r.number("deadline_ms").value_or(0.0);
    info.interval_s = r.number("interval_s").value_or(0.0);
    if (const auto seed = r.field("seed")) info.seed = std::stoull(std::string(*seed));
    return info;
  }
  throw std::runtime_error("trace has no RUN record");
}

std::string csv_row(const RunInfo& info, const RunMetrics& m) {
  std::string row;
  row += std::to_string(info.nodes) + ',';
  row += format_number(info.sim_time) + ',';
  row += format_number(info.deadline_ms) + ',';
  row += format_number(info.interval_s) + ',';
  row += std::to_string(info.seed) + ',';
  row += (m.avg_e2e_delay ? format_number(*m.avg_e2e_delay * 1e3) : std::string()) + ',';
  row += cell(m.pdr) + ',';
  row += cell(m.deadline_miss_ratio) + ',';
  row += std::to_string(m.no_route_drops) + ',';
  row += std::to_string(m.loss_drops);
  return row;
}

Stat summarize(std::span<const double> values) {
  Stat s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  s.mean = mean;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<AggregateRow> aggregate(std::span<const GroupedRun> runs) {
  std::vector<std::vector<std::string>> order;
  std::map<std::vector<std::string>, std::vector<const RunMetrics*>> groups;
  for (const auto& r : runs) {
    auto [it, fresh] = groups.try_emplace(r.key);
    if (fresh) order.push_back(r.key);
    it->second.push_back(&r.metrics);
  }

  std::vector<AggregateRow> out;
  for (const auto& key : order) {
    const auto& members = groups.at(key);
    std::vector<double> delay, pdr, miss, no_route, loss;
    for (const RunMetrics* m : members) {
      if (m->avg_e2e_delay) delay.push_back(*m->avg_e2e_delay * 1e3);
      if (m->pdr) pdr.push_back(*m->pdr);
      if (m->deadline_miss_ratio) miss.push_back(*m->deadline_miss_ratio);
      no_route.push_back(static_cast<double>(m->no_route_drops));
      loss.push_back(static_cast<double>(m->loss_drops));
    }
    AggregateRow row;
    row.key = key;
    row.runs = members.size();
    row.avg_e2e_delay_ms = summarize(delay);
    row.pdr = summarize(pdr);
    row.deadline_miss_ratio = summarize(miss);
    row.no_route_drops = summarize(no_route);
    row.loss_drops = summarize(loss);
    out.push_back(std::move(row));
  }
  return out;
}

std::string aggregate_csv_header(std::span<const std::string> key_columns) {
  std::string h;
  for (const auto& k : key_columns) h += k + ',';
  h += "runs";
  for (const char* m :
       {"avg_e2e_delay_ms", "pdr", "deadline_miss_ratio", "no_route_drops", "loss_drops"}) {
    h += std::string(",") + m + "_mean," + m + "_std";
  }
  return h;
}

std::string aggregate_csv_row(const AggregateRow& row) {
  std::string s;
  for (const auto& k : row.key) s += k + ',';
  s += std::to_string(row.runs);
  for (const Stat* st : {&row.avg_e2e_delay_ms, &row.pdr, &row.deadline_miss_ratio,
                         &row.no_route_drops, &row.loss_drops}) {
    s += ',' + cell(st->mean) + ',' + cell(st->stddev);
  }
  return s;
}

}  // namespace dart
