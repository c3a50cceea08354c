#pragma once

// Simulation trace: one record per line, `time,kind,node,event_id,detail`.
// `detail` is a `key=value;key=value` list whose keys depend on the kind.
// node and event_id are -1 when not applicable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dart/core_model.hpp"

namespace dart {

enum class TraceKind {
  kRun,         // run parameters (first record)
  kNode,        // node position, sink/source flags
  kHello,       // HELLO broadcast
  kAck,         // ACK unicast
  kEchoProbe,   // echo probe sent
  kEchoReply,   // echo reply sent
  kLinkDelay,   // link delay estimate updated
  kEmit,        // data event generated at a source
  kDuplicate,   // second copy created at the source
  kForward,     // copy handed to a next hop
  kArrive,      // copy arrived at an intermediate node
  kDeliver,     // copy arrived at the sink
  kDrop,        // copy discarded (reason=...)
  kSnapshot,    // periodic counters
  kEnd,         // end of run
};

std::string_view to_string(TraceKind kind);
std::optional<TraceKind> trace_kind_from_string(std::string_view s);

struct TraceRecord {
  Seconds time = 0.0;
  TraceKind kind = TraceKind::kRun;
  std::int64_t node = -1;
  std::int64_t event_id = -1;
  std::string detail;

  /// Value of `key` inside detail, if present.
  std::optional<std::string_view> field(std::string_view key) const;
  std::optional<double> number(std::string_view key) const;
};

using Trace = std::vector<TraceRecord>;

inline constexpr std::string_view kTraceHeader = "time,kind,node,event_id,detail";

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);
std::optional<double> parse_number(std::string_view s);

/// Incremental builder for detail strings.
class Detail {
 public:
  Detail& add(std::string_view key, double v);
  Detail& add(std::string_view key, std::int64_t v);
  Detail& add(std::string_view key, std::uint64_t v) { return add(key, static_cast<std::int64_t>(v)); }
  Detail& add(std::string_view key, std::uint32_t v) { return add(key, static_cast<std::int64_t>(v)); }
  Detail& add(std::string_view key, int v) { return add(key, static_cast<std::int64_t>(v)); }
  Detail& add(std::string_view key, bool v) { return add(key, static_cast<std::int64_t>(v ? 1 : 0)); }
  Detail& add(std::string_view key, std::string_view v);
  Detail& add(std::string_view key, const char* v) { return add(key, std::string_view(v)); }
  std::string str() { return std::move(s_); }

 private:
  void key(std::string_view k);
  std::string s_;
};

std::string format_record(const TraceRecord& r);
void write_trace(std::ostream& os, const Trace& trace);

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(std::size_t line, const std::string& what)
      : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses a trace written by write_trace. Throws TraceParseError naming the
/// first malformed line.
Trace read_trace(std::istream& is);

}  // namespace dart
