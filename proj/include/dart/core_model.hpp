#pragma once

// Shared vocabulary for the delay-aware routing stack: identities, planar
// geometry and the control/data packet records exchanged between nodes.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>

namespace dart {

using Meters = double;
using Seconds = double;
using MetersPerSecond = double;
using Joules = double;

/// Dense node identity, 0..N-1 within one scenario.
struct NodeId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const NodeId&) const = default;
};

inline constexpr std::size_t index_of(NodeId id) { return id.value; }

struct NodePos {
  Meters x = 0.0;
  Meters y = 0.0;

  constexpr bool operator==(const NodePos&) const = default;
};

/// Euclidean distance. Symmetric bit-for-bit: the squared differences do not
/// depend on argument order.
Meters distance(const NodePos& a, const NodePos& b);

struct HelloPacket {
  NodeId source_id;
  NodePos source_pos;
  Meters dist_to_sink = 0.0;
};

struct AckPacket {
  NodeId neighbor_id;
  NodePos neighbor_pos;
  Meters dist_to_sink = 0.0;
  Joules residual_energy = 0.0;
};

HelloPacket make_hello(NodeId self, const NodePos& pos, const NodePos& sink_pos);
AckPacket make_ack(NodeId self, const NodePos& pos, const NodePos& sink_pos,
                   Joules residual_energy);

/// Terms of the one-way link delay: channel access, queueing and
/// serialization, repeated once per transmission attempt.
struct LinkDelayComponents {
  Seconds mac_delay = 0.0;
  Seconds queue_delay = 0.0;
  Seconds tx_delay = 0.0;
  std::uint32_t tx_count = 1;

  bool valid() const {
    return mac_delay >= 0.0 && queue_delay >= 0.0 && tx_delay >= 0.0 && tx_count >= 1;
  }
};

using EventId = std::uint64_t;

struct DataPacket {
  EventId event_id = 0;
  NodeId source_id;
  NodeId sink_id;
  Seconds t_set = 0.0;  // deadline fixed at creation
  Seconds t_l = 0.0;    // budget left, shrinks per hop
  Seconds created_at = 0.0;
  std::uint32_t hop_count = 0;
  bool is_duplicate = false;
};

DataPacket make_data_packet(EventId event_id, NodeId source, NodeId sink, Seconds deadline,
                            Seconds now);

struct ForwardingEntry {
  NodeId neighbor_id;
  NodePos neighbor_pos;
  Meters dist_to_sink = 0.0;
  std::optional<Seconds> link_delay;  // empty until an echo round trip completes
  Joules residual_energy = 0.0;
  Seconds last_heard = 0.0;
};

}  // namespace dart

template <>
struct std::hash<dart::NodeId> {
  std::size_t operator()(const dart::NodeId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
