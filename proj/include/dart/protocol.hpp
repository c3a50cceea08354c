#pragma once

// Per-node routing state: neighbor discovery over HELLO/ACK, echo-based
// link delay estimation and the deadline-driven next-hop choice.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dart/core_model.hpp"

namespace dart {

/// Weight given to the newest echo sample when smoothing link delays.
inline constexpr double kDefaultDelaySmoothing = 0.5;

struct EchoProbe {
  std::uint64_t probe_id = 0;
  NodeId neighbor_id;
  Seconds sent_at = 0.0;
};

enum class DecisionOutcome {
  kForward,
  kNoRoute,   // routing void: nobody closer and fast enough
  kNoBudget,  // t_l exhausted before the packet reached the sink
};

struct ForwardDecision {
  DecisionOutcome outcome = DecisionOutcome::kNoRoute;
  std::optional<NodeId> primary_next_hop;
  std::optional<NodeId> duplicate_next_hop;
  MetersPerSecond v_req = 0.0;
  Seconds updated_t_l = 0.0;            // budget the primary copy carries
  Seconds duplicate_updated_t_l = 0.0;  // budget the duplicate carries
  Seconds primary_link_delay = 0.0;
  Seconds duplicate_link_delay = 0.0;
};

/// One row of the ranked eligible set produced by the forwarding predicate.
struct Candidate {
  NodeId neighbor;
  MetersPerSecond provided_speed = 0.0;
  Seconds link_delay = 0.0;
};

class NodeState {
 public:
  NodeState(NodeId id, NodePos pos, NodeId sink_id, NodePos sink_pos, Joules residual_energy,
            std::uint64_t rng_stream_id = 0, double smoothing = kDefaultDelaySmoothing);

  NodeId id() const { return my_id_; }
  const NodePos& pos() const { return my_pos_; }
  NodeId sink_id() const { return sink_id_; }
  const NodePos& sink_pos() const { return sink_pos_; }
  Meters dist_to_sink() const { return dist_to_sink_; }
  bool is_sink() const { return my_id_ == sink_id_; }
  Joules residual_energy() const { return residual_energy_; }
  void set_residual_energy(Joules e) { residual_energy_ = e; }
  std::uint64_t rng_stream_id() const { return rng_stream_id_; }

  /// Learns (or refreshes) the HELLO sender and answers with our own ACK.
  AckPacket on_hello(const HelloPacket& pkt, Seconds now = 0.0);
  void on_ack(const AckPacket& pkt, Seconds now = 0.0);

  /// Registers an outstanding echo probe towards `neighbor`.
  EchoProbe start_probe(NodeId neighbor, Seconds now);
  /// Completes a probe. Returns the smoothed link delay when accepted.
  std::optional<Seconds> on_echo_reply(std::uint64_t probe_id, Seconds now);
  /// Folds one one-way delay sample into the neighbor's estimate.
  bool record_link_delay(NodeId neighbor, Seconds sample);

  /// Drops neighbors not heard from since `now - timeout`. Returns how many.
  std::size_t expire_neighbors(Seconds now, Seconds timeout);
  /// Forgets probes outstanding for longer than `max_age` (lost on the air).
  std::size_t expire_probes(Seconds now, Seconds max_age);

  std::span<const ForwardingEntry> forwarding_table() const { return table_; }
  const ForwardingEntry* find(NodeId neighbor) const;
  std::size_t outstanding_probes() const { return probes_.size(); }

 private:
  ForwardingEntry& upsert(NodeId neighbor);

  NodeId my_id_;
  NodePos my_pos_;
  NodeId sink_id_;
  NodePos sink_pos_;
  Meters dist_to_sink_;
  Joules residual_energy_;
  std::uint64_t rng_stream_id_;
  double smoothing_;
  std::vector<ForwardingEntry> table_;  // sorted by neighbor_id
  std::vector<EchoProbe> probes_;
  std::uint64_t next_probe_id_ = 0;
};

/// Half the echo round trip. Non-positive round trips are rejected.
std::optional<Seconds> estimate_link_delay(Seconds rtt);

/// (mac + queue + tx) * tx_count.
Seconds synthesize_one_way_delay(const LinkDelayComponents& c);

/// Remaining distance over remaining budget; empty when the budget is gone.
std::optional<MetersPerSecond> required_speed(Meters dist_to_sink, Seconds time_left);

/// Progress towards the sink per second of link delay. Negative when the
/// neighbor is farther away; empty for an unmeasured link.
std::optional<MetersPerSecond> provided_speed(Meters dist_current_to_sink,
                                              Meters dist_neighbor_to_sink, Seconds link_delay);

/// Neighbors that are closer to the sink and fast enough, best first
/// (provided speed descending, node id ascending).
std::vector<Candidate> eligible_neighbors(const NodeState& state, MetersPerSecond v_req);

ForwardDecision decide_forward(const NodeState& state, const DataPacket& pkt);

/// Charges the traversed link against the budget and counts the hop.
DataPacket on_data_arrival_update(DataPacket pkt, Seconds traversed_link_delay);

}  // namespace dart
