#include "dart/core_model.hpp"

#include <cmath>

namespace dart {

Meters distance(const NodePos& a, const NodePos& b) {
  // (a-b)^2 == (b-a)^2 exactly in IEEE arithmetic, and the sum is taken in a
  // fixed order, so swapping arguments cannot change a single bit.
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

HelloPacket make_hello(NodeId self, const NodePos& pos, const NodePos& sink_pos) {
  return HelloPacket{self, pos, distance(pos, sink_pos)};
}

AckPacket make_ack(NodeId self, const NodePos& pos, const NodePos& sink_pos,
                   Joules residual_energy) {
  return AckPacket{self, pos, distance(pos, sink_pos), residual_energy};
}

DataPacket make_data_packet(EventId event_id, NodeId source, NodeId sink, Seconds deadline,
                            Seconds now) {
  DataPacket pkt;
  pkt.event_id = event_id;
  pkt.source_id = source;
  pkt.sink_id = sink;
  pkt.t_set = deadline;
  pkt.t_l = deadline;
  pkt.created_at = now;
  return pkt;
}

}  // namespace dart
