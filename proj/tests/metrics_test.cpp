#include <cmath>
#include <vector>

#include "doctest.h"
#include "dart/metrics.hpp"

using namespace dart;

namespace {

struct TraceBuilder {
  Trace t;
  TraceBuilder() {
    t.push_back({0.0, TraceKind::kRun, -1, -1,
                 "nodes=50;sim_time=100;deadline_ms=6;interval_s=1;seed=3"});
  }
  TraceBuilder& emit(std::int64_t ev, double at, double t_set = 6e-3) {
    t.push_back({at, TraceKind::kEmit, 1, ev, Detail().add("t_set", t_set).str()});
    return *this;
  }
  TraceBuilder& dup(std::int64_t ev, double at) {
    t.push_back({at, TraceKind::kDuplicate, 1, ev, "next=3"});
    return *this;
  }
  TraceBuilder& deliver(std::int64_t ev, double at, bool is_dup = false) {
    t.push_back({at, TraceKind::kDeliver, 0, ev, Detail().add("dup", is_dup).str()});
    return *this;
  }
  TraceBuilder& drop(std::int64_t ev, double at, const char* reason, bool is_dup = false) {
    t.push_back({at, TraceKind::kDrop, 2, ev, Detail().add("reason", reason).add("dup", is_dup).str()});
    return *this;
  }
};

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("end to end delay") {
  TraceBuilder one;
  one.emit(0, 1.0).deliver(0, 1.002);
  CHECK(*end_to_end_delay(one.t) == doctest::Approx(2e-3).epsilon(1e-9));

  TraceBuilder twice;
  twice.emit(0, 1.0).dup(0, 1.0).deliver(0, 1.002, true).deliver(0, 1.003);
  CHECK(*end_to_end_delay(twice.t) == doctest::Approx(2e-3).epsilon(1e-9));

  TraceBuilder none;
  none.emit(0, 1.0).drop(0, 1.001, "no_route");
  CHECK_FALSE(end_to_end_delay(none.t).has_value());
}

TEST_CASE("delivery ratio credits either copy once") {
  TraceBuilder b;
  for (int i = 0; i < 10; ++i) b.emit(i, 1.0 + i);
  for (int i = 0; i < 8; ++i) b.deliver(i, 1.001 + i);
  b.dup(8, 9.0).drop(8, 9.001, "no_route").deliver(8, 9.002, true);  // only the duplicate made it
  b.drop(9, 10.001, "loss");
  CHECK(*packet_delivery_ratio(b.t) == doctest::Approx(0.9));

  TraceBuilder all, none, empty;
  all.emit(0, 1.0).deliver(0, 1.001);
  none.emit(0, 1.0).drop(0, 1.001, "loss");
  CHECK(*packet_delivery_ratio(all.t) == 1.0);
  CHECK(*packet_delivery_ratio(none.t) == 0.0);
  CHECK_FALSE(packet_delivery_ratio(empty.t).has_value());
}

TEST_CASE("deadline miss ratio") {
  TraceBuilder b;
  for (int i = 0; i < 10; ++i) b.emit(i, 1.0 + i);
  for (int i = 0; i < 8; ++i) b.deliver(i, 1.0 + i + 0.005);
  b.deliver(8, 9.0 + 0.007);
  b.drop(9, 10.002, "no_route");
  CHECK(*deadline_miss_ratio(b.t) == doctest::Approx(0.2));
  // The late packet still counts as delivered.
  CHECK(*packet_delivery_ratio(b.t) == doctest::Approx(0.9));

  TraceBuilder ok;
  ok.emit(0, 1.0).deliver(0, 1.004);
  CHECK(*deadline_miss_ratio(ok.t) == 0.0);
}

TEST_CASE("miss ratio bounds delivery from below") {
  TraceBuilder b;
  for (int i = 0; i < 40; ++i) {
    b.emit(i, i);
    if (i % 3 == 0) b.drop(i, i + 0.001, "loss");
    else b.deliver(i, i + (i % 5) * 2e-3);
  }
  const RunMetrics m = compute_metrics(b.t);
  CHECK(*m.deadline_miss_ratio >= 1.0 - *m.pdr);
  CHECK(*m.pdr >= 0.0);
  CHECK(*m.pdr <= 1.0);
  CHECK(*m.deadline_miss_ratio <= 1.0);
}

TEST_CASE("compute_metrics counters") {
  TraceBuilder b;
  b.emit(0, 1.0).dup(0, 1.0).deliver(0, 1.002).drop(0, 1.003, "loss", true);
  b.emit(1, 2.0).drop(1, 2.0, "no_route");
  b.emit(2, 3.0).drop(2, 3.001, "no_budget");
  b.emit(3, 4.0).drop(3, 4.0, "unfinished");
  const RunMetrics m = compute_metrics(b.t);
  CHECK(m.sent_events == 4);
  CHECK(m.received_events == 1);
  CHECK(m.copies_created == 5);
  CHECK(m.copies_delivered == 1);
  CHECK(m.no_route_drops == 2);
  CHECK(m.budget_drops == 1);
  CHECK(m.loss_drops == 1);
  CHECK(m.unfinished_copies == 1);
}

TEST_CASE("csv row") {
  TraceBuilder b;
  b.emit(0, 1.0).deliver(0, 1.0025);
  const RunInfo info = run_info(b.t);
  CHECK(info.nodes == 50);
  CHECK(info.seed == 3);
  const std::string row = csv_row(info, compute_metrics(b.t));
  CHECK(row.rfind("50,100,6,1,3,", 0) == 0);
  CHECK(row.substr(row.size() - 8) == ",1,0,0,0");

  TraceBuilder none;
  none.emit(0, 1.0).drop(0, 1.0, "no_route");
  CHECK(csv_row(run_info(none.t), compute_metrics(none.t)) == "50,100,6,1,3,,0,1,1,0");
  CHECK_THROWS(run_info(Trace{}));
}

TEST_CASE("summaries") {
  const std::vector<double> one{0.25};
  CHECK(*summarize(one).mean == 0.25);
  CHECK_FALSE(summarize(one).stddev.has_value());

  const std::vector<double> same{0.3, 0.3};
  CHECK(*summarize(same).stddev == 0.0);

  const std::vector<double> pair{0.2, 0.4};
  CHECK(*summarize(pair).mean == doctest::Approx(0.3));
  CHECK(*summarize(pair).stddev == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
  CHECK(*summarize(pair).stddev == doctest::Approx(0.1414213562).epsilon(1e-9));

  CHECK_FALSE(summarize(std::vector<double>{}).mean.has_value());
}

TEST_CASE("aggregation groups by key in order of appearance") {
  RunMetrics a, b, c;
  a.pdr = 0.9;
  a.deadline_miss_ratio = 0.2;
  b.pdr = 0.7;
  b.deadline_miss_ratio = 0.4;
  c.pdr = 1.0;
  c.deadline_miss_ratio = 0.0;
  const std::vector<GroupedRun> runs{{{"100"}, a}, {{"50"}, c}, {{"100"}, b}};
  const auto rows = aggregate(runs);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].key == std::vector<std::string>{"100"});
  CHECK(rows[0].runs == 2);
  CHECK(*rows[0].deadline_miss_ratio.mean == doctest::Approx(0.3));
  CHECK(*rows[0].deadline_miss_ratio.stddev == doctest::Approx(0.1414213562));
  CHECK_FALSE(rows[0].avg_e2e_delay_ms.mean.has_value());
  CHECK(rows[1].runs == 1);

  const std::vector<std::string> keys{"nodes"};
  const std::string header = aggregate_csv_header(keys);
  CHECK(header.rfind("nodes,runs,avg_e2e_delay_ms_mean,avg_e2e_delay_ms_std,pdr_mean,", 0) == 0);
  const std::string row = aggregate_csv_row(rows[1]);
  CHECK(row.rfind("50,1,,,1,,0,,", 0) == 0);
}

}
