#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "dart/protocol.hpp"
#include "forwarding_oracle.hpp"

using namespace dart;

namespace {

bool close_rel(double a, double b, double rel = 1e-12) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

// Node at `x` on the x axis with the sink at the origin.
NodeState node_at(std::uint32_t id, double x) {
  return NodeState(NodeId{id}, {x, 0.0}, NodeId{0}, {0.0, 0.0}, 10.0);
}

void add_neighbor(NodeState& s, std::uint32_t id, double x, std::optional<double> delay) {
  s.on_ack(AckPacket{NodeId{id}, {x, 0.0}, std::abs(x), 10.0}, 0.0);
  if (delay) s.record_link_delay(NodeId{id}, *delay);
}

DataPacket packet(std::uint32_t source, double t_l) {
  DataPacket p = make_data_packet(1, NodeId{source}, NodeId{0}, t_l, 0.0);
  return p;
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("hello is answered with our own ack") {
  NodeState b(NodeId{2}, {100.0, 0.0}, NodeId{0}, {300.0, 0.0}, 10.0);
  const auto hello = make_hello(NodeId{1}, {0.0, 0.0}, {300.0, 0.0});
  const AckPacket ack = b.on_hello(hello, 1.0);
  CHECK(ack.neighbor_id == NodeId{2});
  CHECK(ack.neighbor_pos.x == 100.0);
  CHECK(ack.dist_to_sink == 200.0);
  CHECK(ack.residual_energy == 10.0);
  REQUIRE(b.forwarding_table().size() == 1);
  CHECK(b.find(NodeId{1})->dist_to_sink == 300.0);

  // Same sender again: refreshed, not duplicated.
  b.on_hello(hello, 2.0);
  CHECK(b.forwarding_table().size() == 1);
  CHECK(b.find(NodeId{1})->last_heard == 2.0);

  CHECK_THROWS_AS(b.on_hello(make_hello(NodeId{2}, {100.0, 0.0}, {300.0, 0.0})), std::invalid_argument);
}

TEST_CASE("two node handshake") {
  NodeState a(NodeId{1}, {0.0, 0.0}, NodeId{0}, {300.0, 0.0}, 10.0);
  NodeState b(NodeId{2}, {100.0, 0.0}, NodeId{0}, {300.0, 0.0}, 10.0);
  const AckPacket ack = b.on_hello(make_hello(a.id(), a.pos(), a.sink_pos()));
  a.on_ack(ack);
  REQUIRE(a.find(NodeId{2}) != nullptr);
  CHECK(a.find(NodeId{2})->residual_energy == 10.0);
  CHECK(a.find(NodeId{2})->dist_to_sink == 200.0);
  CHECK_FALSE(a.find(NodeId{2})->link_delay.has_value());
}

TEST_CASE("ack updates in place and comes back after expiry") {
  NodeState a = node_at(1, 300.0);
  a.on_ack(AckPacket{NodeId{2}, {200.0, 0.0}, 200.0, 10.0}, 0.0);
  CHECK(a.forwarding_table().size() == 1);
  a.record_link_delay(NodeId{2}, 1e-3);
  a.on_ack(AckPacket{NodeId{2}, {200.0, 0.0}, 200.0, 9.0}, 1.0);
  CHECK(a.forwarding_table().size() == 1);
  CHECK(a.find(NodeId{2})->residual_energy == 9.0);
  CHECK(a.find(NodeId{2})->link_delay == 1e-3);  // untouched by the ack

  CHECK(a.expire_neighbors(200.0, 160.0) == 1);
  CHECK(a.forwarding_table().empty());
  a.on_ack(AckPacket{NodeId{2}, {200.0, 0.0}, 200.0, 9.0}, 201.0);
  CHECK(a.forwarding_table().size() == 1);
  CHECK_FALSE(a.find(NodeId{2})->link_delay.has_value());

  // An ack that claims to be from ourselves is ignored.
  a.on_ack(AckPacket{NodeId{1}, {300.0, 0.0}, 300.0, 9.0}, 202.0);
  CHECK(a.find(NodeId{1}) == nullptr);
}

TEST_CASE("estimate_link_delay") {
  CHECK(close_rel(*estimate_link_delay(4e-3), 2e-3));
  CHECK_FALSE(estimate_link_delay(0.0).has_value());
  CHECK_FALSE(estimate_link_delay(-1e-3).has_value());

  // (0.5 + 0.3 + 0.2) ms x 2 transmissions each way, then halve the round trip.
  const LinkDelayComponents c{0.5e-3, 0.3e-3, 0.2e-3, 2};
  const double rtt = 2.0 * synthesize_one_way_delay(c);
  CHECK(close_rel(*estimate_link_delay(rtt), 2e-3));
}

TEST_CASE("rejected round trips keep the previous estimate") {
  NodeState a = node_at(1, 300.0);
  add_neighbor(a, 2, 200.0, std::nullopt);
  const auto p1 = a.start_probe(NodeId{2}, 1.0);
  CHECK(close_rel(*a.on_echo_reply(p1.probe_id, 1.004), 2e-3));
  const auto p2 = a.start_probe(NodeId{2}, 5.0);
  CHECK_FALSE(a.on_echo_reply(p2.probe_id, 5.0).has_value());
  CHECK(close_rel(*a.find(NodeId{2})->link_delay, 2e-3));
  CHECK_FALSE(a.on_echo_reply(12345, 6.0).has_value());  // unknown probe
}

TEST_CASE("echo samples are smoothed, first sample taken as is") {
  NodeState a = node_at(1, 300.0);
  add_neighbor(a, 2, 200.0, 2e-3);
  CHECK(*a.find(NodeId{2})->link_delay == 2e-3);
  a.record_link_delay(NodeId{2}, 4e-3);
  CHECK(close_rel(*a.find(NodeId{2})->link_delay, 3e-3));
  CHECK_FALSE(a.record_link_delay(NodeId{9}, 1e-3));  // not a neighbor
  CHECK_FALSE(a.record_link_delay(NodeId{2}, 0.0));
}

TEST_CASE("stale probes expire") {
  NodeState a = node_at(1, 300.0);
  add_neighbor(a, 2, 200.0, std::nullopt);
  a.start_probe(NodeId{2}, 0.0);
  a.start_probe(NodeId{2}, 8.0);
  CHECK(a.outstanding_probes() == 2);
  CHECK(a.expire_probes(12.0, 10.0) == 1);
  CHECK(a.outstanding_probes() == 1);
}

TEST_CASE("synthesize_one_way_delay") {
  CHECK(synthesize_one_way_delay({0, 0, 0, 1}) == 0.0);
  CHECK(close_rel(synthesize_one_way_delay({1e-3, 2e-3, 3e-3, 1}), 6e-3));
  CHECK(close_rel(synthesize_one_way_delay({1e-3, 2e-3, 3e-3, 2}), 12e-3));
}

TEST_CASE("required_speed") {
  CHECK(close_rel(*required_speed(300.0, 6e-3), 50000.0));
  CHECK(*required_speed(0.0, 6e-3) == 0.0);
  CHECK_FALSE(required_speed(300.0, 0.0).has_value());
  CHECK_FALSE(required_speed(300.0, -1e-3).has_value());
}

TEST_CASE("provided_speed") {
  CHECK(close_rel(*provided_speed(300.0, 200.0, 2e-3), 50000.0));
  CHECK(*provided_speed(250.0, 250.0, 2e-3) == 0.0);
  CHECK(close_rel(*provided_speed(200.0, 300.0, 2e-3), -50000.0));
  CHECK_FALSE(provided_speed(300.0, 200.0, 0.0).has_value());
}

TEST_CASE("equal speeds are eligible") {
  // d = 300, t_l = 6 ms: v_req = 50 km/s; 100 m of progress in 2 ms is exactly that.
  NodeState s = node_at(1, 300.0);
  add_neighbor(s, 2, 200.0, 2e-3);
  const auto d = decide_forward(s, packet(5, 6e-3));
  CHECK(d.outcome == DecisionOutcome::kForward);
  CHECK(d.primary_next_hop == NodeId{2});
  CHECK(close_rel(d.v_req, 50000.0));
  CHECK(close_rel(d.updated_t_l, 4e-3));
}

TEST_CASE("farther neighbors never qualify, however fast") {
  NodeState s = node_at(1, 300.0);
  add_neighbor(s, 2, 250.0, 5e-3);   // closer, 10 km/s: too slow for 50 km/s
  add_neighbor(s, 3, 400.0, 1e-6);   // farther, tiny delay
  const auto d = decide_forward(s, packet(5, 6e-3));
  CHECK(d.outcome == DecisionOutcome::kNoRoute);
  CHECK_FALSE(d.primary_next_hop.has_value());
  CHECK(eligible_neighbors(s, 0.0).size() == 1);
}

TEST_CASE("unmeasured links are skipped") {
  NodeState s = node_at(1, 300.0);
  add_neighbor(s, 2, 100.0, std::nullopt);
  CHECK(decide_forward(s, packet(5, 6e-3)).outcome == DecisionOutcome::kNoRoute);
}

TEST_CASE("the source duplicates onto the runner-up") {
  // 300 m out, progress 60/55/52 m per ms.
  NodeState s = node_at(1, 300.0);
  add_neighbor(s, 4, 240.0, 1e-3);
  add_neighbor(s, 2, 245.0, 1e-3);
  add_neighbor(s, 3, 248.0, 1e-3);
  const auto at_source = decide_forward(s, packet(1, 6e-3));
  CHECK(at_source.primary_next_hop == NodeId{4});
  CHECK(at_source.duplicate_next_hop == NodeId{2});
  CHECK(close_rel(at_source.duplicate_updated_t_l, 5e-3));
  const auto ranked = eligible_neighbors(s, at_source.v_req);
  REQUIRE(ranked.size() == 3);
  CHECK(close_rel(ranked[0].provided_speed, 60000.0));
  CHECK(close_rel(ranked[1].provided_speed, 55000.0));
  CHECK(close_rel(ranked[2].provided_speed, 52000.0));

  const auto relay = decide_forward(s, packet(7, 6e-3));
  CHECK(relay.primary_next_hop == NodeId{4});
  CHECK_FALSE(relay.duplicate_next_hop.has_value());

  DataPacket dup = packet(1, 6e-3);
  dup.is_duplicate = true;
  CHECK_FALSE(decide_forward(s, dup).duplicate_next_hop.has_value());
}

TEST_CASE("ties go to the lower id") {
  NodeState s = node_at(1, 300.0);
  add_neighbor(s, 9, 200.0, 1e-3);
  add_neighbor(s, 3, 200.0, 1e-3);
  const auto d = decide_forward(s, packet(1, 6e-3));
  CHECK(d.primary_next_hop == NodeId{3});
  CHECK(d.duplicate_next_hop == NodeId{9});
}

TEST_CASE("an exhausted budget is reported as such") {
  NodeState s = node_at(1, 300.0);
  add_neighbor(s, 2, 200.0, 1e-3);
  CHECK(decide_forward(s, packet(1, 0.0)).outcome == DecisionOutcome::kNoBudget);
}

TEST_CASE("decide_forward preconditions") {
  NodeState s = node_at(1, 300.0);
  DataPacket p = packet(1, 6e-3);
  p.sink_id = NodeId{42};
  CHECK_THROWS_AS(decide_forward(s, p), std::invalid_argument);
  NodeState sink = node_at(0, 0.0);
  CHECK_THROWS(decide_forward(sink, packet(1, 6e-3)));
}

TEST_CASE("on_data_arrival_update") {
  DataPacket p = packet(1, 6e-3);
  const auto q = on_data_arrival_update(p, 2e-3);
  CHECK(close_rel(q.t_l, 4e-3));
  CHECK(q.hop_count == 1);
  CHECK(q.t_set == 6e-3);

  p.t_l = 1e-3;
  CHECK(on_data_arrival_update(p, 2e-3).t_l == 0.0);
  const auto r = on_data_arrival_update(p, 0.0);
  CHECK(r.t_l == 1e-3);
  CHECK(r.hop_count == 1);
  CHECK_THROWS(on_data_arrival_update(p, -1e-3));
}

TEST_CASE("speed-feasible line paths arrive with budget left") {
  // Nodes every `hop` meters towards the sink; each link's speed meets the
  // requirement computed at its hop, so the packet must arrive with t_l >= 0.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int hops = 1 + static_cast<int>(u(rng) * 6);
    const double hop = 50.0 + 200.0 * u(rng);
    double t_l = 1e-3 + 10e-3 * u(rng);
    double d = hops * hop;
    bool feasible = true;
    for (int h = 0; h < hops && feasible; ++h) {
      const double v_req = *required_speed(d, t_l);
      const double delay = hop / v_req * (0.2 + 0.8 * u(rng));  // at least as fast as needed
      feasible = *provided_speed(d, d - hop, delay) >= v_req;
      DataPacket p = packet(1, t_l);
      t_l = on_data_arrival_update(p, delay).t_l;
      d -= hop;
    }
    CHECK(feasible);
    CHECK(t_l >= 0.0);
  }
}

TEST_CASE("decide_forward matches the brute force on random tables") {
  std::mt19937_64 rng(2024);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto table = oracle::random_table(rng);
    bad += oracle::mismatches(table, rng);
  }
  CHECK(bad == 0);
}

TEST_CASE("node state invariants") {
  CHECK_THROWS(NodeState(NodeId{1}, {0, 0}, NodeId{0}, {0, 0}, 10.0, 0, 0.0));
  NodeState s = node_at(1, 300.0);
  CHECK(s.dist_to_sink() == 300.0);
  CHECK_FALSE(s.is_sink());
  CHECK(node_at(0, 0.0).is_sink());
}

}
