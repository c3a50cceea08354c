#include "dart/trace.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <utility>

namespace dart {
namespace {

constexpr std::array<std::pair<TraceKind, std::string_view>, 15> kKindNames{{
    {TraceKind::kRun, "RUN"},
    {TraceKind::kNode, "NODE"},
    {TraceKind::kHello, "HELLO"},
    {TraceKind::kAck, "ACK"},
    {TraceKind::kEchoProbe, "ECHO_PROBE"},
    {TraceKind::kEchoReply, "ECHO_REPLY"},
    {TraceKind::kLinkDelay, "LINK_DELAY"},
    {TraceKind::kEmit, "EMIT"},
    {TraceKind::kDuplicate, "DUPLICATE"},
    {TraceKind::kForward, "FORWARD"},
    {TraceKind::kArrive, "ARRIVE"},
    {TraceKind::kDeliver, "DELIVER"},
    {TraceKind::kDrop, "DROP"},
    {TraceKind::kSnapshot, "SNAPSHOT"},
    {TraceKind::kEnd, "END"},
}};

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string_view to_string(TraceKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<TraceKind> trace_kind_from_string(std::string_view s) {
  for (const auto& [k, name] : kKindNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

std::optional<std::string_view> TraceRecord::field(std::string_view key) const {
  std::string_view rest = detail;
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const std::string_view item = rest.substr(0, semi);
    const auto eq = item.find('=');
    if (eq != std::string_view::npos && item.substr(0, eq) == key) return item.substr(eq + 1);
    if (semi == std::string_view::npos) break;
    rest.remove_prefix(semi + 1);
  }
  return std::nullopt;
}

std::optional<double> TraceRecord::number(std::string_view key) const {
  const auto f = field(key);
  if (!f) return std::nullopt;
  return parse_number(*f);
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

void Detail::key(std::string_view k) {
  if (!s_.empty()) s_ += ';';
  s_ += k;
  s_ += '=';
}

Detail& Detail::add(std::string_view k, double v) {
  key(k);
  s_ += format_number(v);
  return *this;
}

Detail& Detail::add(std::string_view k, std::int64_t v) {
  key(k);
  s_ += std::to_string(v);
  return *this;
}

Detail& Detail::add(std::string_view k, std::string_view v) {
  key(k);
  s_ += v;
  return *this;
}

std::string format_record(const TraceRecord& r) {
  std::string line = format_number(r.time);
  line += ',';
  line += to_string(r.kind);
  line += ',';
  line += std::to_string(r.node);
  line += ',';
  line += std::to_string(r.event_id);
  line += ',';
  line += r.detail;
  return line;
}

void write_trace(std::ostream& os, const Trace& trace) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace) os << format_record(r) << '\n';
}

Trace read_trace(std::istream& is) {
  Trace out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (lineno == 1 && line == kTraceHeader) continue;
    if (line.empty()) continue;

    std::array<std::string_view, 4> cols;
    std::string_view rest = line;
    for (auto& c : cols) {
      const auto comma = rest.find(',');
      if (comma == std::string_view::npos) throw TraceParseError(lineno, "expected 5 columns");
      c = rest.substr(0, comma);
      rest.remove_prefix(comma + 1);
    }

    TraceRecord r;
    const auto t = parse_number(cols[0]);
    if (!t) throw TraceParseError(lineno, "bad time '" + std::string(cols[0]) + "'");
    const auto kind = trace_kind_from_string(cols[1]);
    if (!kind) throw TraceParseError(lineno, "unknown kind '" + std::string(cols[1]) + "'");
    const auto node = parse_int(cols[2]);
    const auto ev = parse_int(cols[3]);
    if (!node || !ev) throw TraceParseError(lineno, "bad node or event id");
    if (rest.find(',') != std::string_view::npos) {
      throw TraceParseError(lineno, "too many columns");
    }
    r.time = *t;
    r.kind = *kind;
    r.node = *node;
    r.event_id = *ev;
    r.detail = std::string(rest);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dart
