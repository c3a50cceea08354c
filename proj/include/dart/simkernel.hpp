#pragma once

// Deterministic discrete-event simulation of a static sensor field running
// the delay-aware routing protocol. Radio is a unit disk with Bernoulli loss;
// the 802.11 MAC is abstracted to a load-dependent delay model whose terms
// mirror the link-delay components of the protocol.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dart/core_model.hpp"
#include "dart/protocol.hpp"
#include "dart/trace.hpp"

namespace dart {

using Rng = std::mt19937_64;

struct RadioModel {
  Meters tx_range = 250.0;
  double loss_probability = 0.05;  // per transmission attempt

  bool in_range(Meters d) const { return d <= tx_range; }
};

struct MacDelayModel {
  Seconds base_mac_delay = 0.3e-3;
  double queue_service_rate = 2000.0;  // packets/s; infinity disables queueing delay
  Seconds tx_delay = 0.26e-3;          // ~64 bytes at 2 Mb/s
  Seconds contention_coeff = 0.1e-3;   // per concurrent local flow
  Seconds jitter_mean = 0.2e-3;        // mean of the exponential access jitter, 0 disables
  std::uint32_t max_retries = 4;

  bool valid() const;
};

/// What a sender sees of its surroundings when it grabs the channel.
struct ChannelLoad {
  double local_load = 0.0;            // concurrent local flows
  std::uint32_t queue_occupancy = 0;  // own packets still in flight
};

struct LinkSample {
  LinkDelayComponents components;
  bool delivered = true;  // false when every attempt was lost

  Seconds one_way() const { return synthesize_one_way_delay(components); }
};

/// Draws the delay terms for one transmission. tx_count counts attempts: one
/// plus a geometric number of retries at `loss_probability`, capped at
/// `max_retries`; the copy is lost when the last allowed attempt also fails.
LinkSample sample_link_delay(const MacDelayModel& mac, const ChannelLoad& load,
                             double loss_probability, Rng& rng);

struct CbrSource {
  NodeId node;
  Seconds interval = 1.0;
  Seconds packet_deadline = 6e-3;
  Seconds start_at = 1.0;
  std::optional<Seconds> stop_at;  // defaults to the end of the run

  bool valid() const { return interval > 0.0 && packet_deadline > 0.0 && start_at >= 0.0; }
};

enum class Placement { kUniform, kGrid, kExplicit };

struct TopologySpec {
  std::uint32_t node_count = 50;
  Meters area_width = 600.0;
  Meters area_height = 400.0;
  Placement placement = Placement::kUniform;
  std::vector<NodePos> positions;  // kExplicit only
  Meters tx_range = 250.0;
  NodeId sink{0};
  NodePos sink_pos{0.0, 0.0};  // where the sink is put for uniform placement
};

struct Topology {
  std::vector<NodePos> positions;
  NodeId sink;
  Meters tx_range = 0.0;
  std::vector<std::vector<NodeId>> adjacency;  // unit-disk neighbors, ascending ids

  std::size_t size() const { return positions.size(); }
  bool adjacent(NodeId a, NodeId b) const;
  /// Nodes that can reach the sink over the unit-disk graph.
  std::vector<bool> reaches_sink() const;
};

/// Places nodes and derives unit-disk adjacency. Uniform placement puts the
/// sink at `sink_pos` and draws every other node from `seed`; grid placement
/// lays nodes row-major on a lattice spanning the area.
Topology build_topology(const TopologySpec& spec, std::uint64_t seed);

/// The `count` nodes farthest from the sink (ties to the lower id).
std::vector<NodeId> farthest_from_sink(const Topology& topo, std::size_t count);

struct ProtocolTiming {
  Seconds hello_period = 50.0;
  Seconds hello_jitter = 0.5;   // HELLO send offset within a round
  Seconds ack_jitter = 0.05;    // ACK backoff after a HELLO
  Seconds discovery_time = 1.0; // first echo round
  Seconds echo_period = 10.0;
  Seconds neighbor_timeout = 160.0;
  Seconds load_window = 1.5;    // how long a data flow counts as active nearby
  double delay_smoothing = kDefaultDelaySmoothing;
  Joules initial_energy = 10.0;
};

/// Values echoed into the RUN trace record and the CSV key columns.
struct RunInfo {
  std::uint32_t nodes = 0;
  Seconds sim_time = 0.0;
  double deadline_ms = 0.0;
  double interval_s = 0.0;
  std::uint64_t seed = 0;
};

struct SimConfig {
  Topology topology;
  RadioModel radio;
  MacDelayModel mac;
  ProtocolTiming timing;
  std::vector<CbrSource> sources;
  Seconds sim_time = 100.0;
  std::uint64_t seed = 1;
  Seconds snapshot_period = 0.0;  // 0 disables SNAPSHOT records
  bool trace_control = false;     // include HELLO/ACK/ECHO records
  RunInfo info;
};

enum class EventKind {
  kHelloRound,
  kHelloSend,
  kAckSend,
  kEchoRound,
  kEchoProbe,
  kPacketArrival,  // HELLO, ACK, echo, echo reply or data reaching a receiver
  kTxEnd,
  kCbrEmit,
  kMetricSnapshot,
  kRunEnd,
};

struct SimEvent {
  Seconds fire_at = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kRunEnd;
};

struct RunResult {
  Trace trace;
  std::vector<NodeState> nodes;
  std::vector<std::string> warnings;
  std::uint64_t events_processed = 0;
};

/// Executes one run. Identical configs give bit-identical results.
RunResult run_simulation(const SimConfig& config);

}  // namespace dart
