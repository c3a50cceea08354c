#include "dart/protocol.hpp"

#include <algorithm>
#include <stdexcept>

namespace dart {

NodeState::NodeState(NodeId id, NodePos pos, NodeId sink_id, NodePos sink_pos,
                     Joules residual_energy, std::uint64_t rng_stream_id, double smoothing)
    : my_id_(id),
      my_pos_(pos),
      sink_id_(sink_id),
      sink_pos_(sink_pos),
      dist_to_sink_(distance(pos, sink_pos)),
      residual_energy_(residual_energy),
      rng_stream_id_(rng_stream_id),
      smoothing_(smoothing) {
  if (!(smoothing > 0.0 && smoothing <= 1.0)) {
    throw std::invalid_argument("delay smoothing weight must be in (0, 1]");
  }
}

ForwardingEntry& NodeState::upsert(NodeId neighbor) {
  auto it = std::lower_bound(table_.begin(), table_.end(), neighbor,
                             [](const ForwardingEntry& e, NodeId n) { return e.neighbor_id < n; });
  if (it == table_.end() || it->neighbor_id != neighbor) {
    ForwardingEntry fresh;
    fresh.neighbor_id = neighbor;
    it = table_.insert(it, fresh);
  }
  return *it;
}

const ForwardingEntry* NodeState::find(NodeId neighbor) const {
  auto it = std::lower_bound(table_.begin(), table_.end(), neighbor,
                             [](const ForwardingEntry& e, NodeId n) { return e.neighbor_id < n; });
  if (it == table_.end() || it->neighbor_id != neighbor) return nullptr;
  return &*it;
}

AckPacket NodeState::on_hello(const HelloPacket& pkt, Seconds now) {
  if (pkt.source_id == my_id_) {
    throw std::invalid_argument("node received its own HELLO");
  }
  ForwardingEntry& e = upsert(pkt.source_id);
  e.neighbor_pos = pkt.source_pos;
  e.dist_to_sink = pkt.dist_to_sink;
  e.last_heard = now;
  return AckPacket{my_id_, my_pos_, dist_to_sink_, residual_energy_};
}

void NodeState::on_ack(const AckPacket& pkt, Seconds now) {
  if (pkt.neighbor_id == my_id_) return;
  ForwardingEntry& e = upsert(pkt.neighbor_id);
  e.neighbor_pos = pkt.neighbor_pos;
  e.dist_to_sink = pkt.dist_to_sink;
  e.residual_energy = pkt.residual_energy;
  e.last_heard = now;
}

EchoProbe NodeState::start_probe(NodeId neighbor, Seconds now) {
  EchoProbe probe{next_probe_id_++, neighbor, now};
  probes_.push_back(probe);
  return probe;
}

std::optional<Seconds> NodeState::on_echo_reply(std::uint64_t probe_id, Seconds now) {
  auto it = std::find_if(probes_.begin(), probes_.end(),
                         [probe_id](const EchoProbe& p) { return p.probe_id == probe_id; });
  if (it == probes_.end()) return std::nullopt;
  const EchoProbe probe = *it;
  probes_.erase(it);
  const auto one_way = estimate_link_delay(now - probe.sent_at);
  if (!one_way || !record_link_delay(probe.neighbor_id, *one_way)) return std::nullopt;
  return find(probe.neighbor_id)->link_delay;
}

bool NodeState::record_link_delay(NodeId neighbor, Seconds sample) {
  if (!(sample > 0.0)) return false;
  auto it = std::lower_bound(table_.begin(), table_.end(), neighbor,
                             [](const ForwardingEntry& e, NodeId n) { return e.neighbor_id < n; });
  // Replies from nodes that have since been expired are ignored.
  if (it == table_.end() || it->neighbor_id != neighbor) return false;
  if (it->link_delay) {
    it->link_delay = smoothing_ * sample + (1.0 - smoothing_) * *it->link_delay;
  } else {
    it->link_delay = sample;
  }
  return true;
}

std::size_t NodeState::expire_neighbors(Seconds now, Seconds timeout) {
  const auto before = table_.size();
  std::erase_if(table_, [&](const ForwardingEntry& e) { return now - e.last_heard > timeout; });
  // Probes to forgotten neighbors can never complete usefully.
  std::erase_if(probes_, [&](const EchoProbe& p) { return find(p.neighbor_id) == nullptr; });
  return before - table_.size();
}

std::size_t NodeState::expire_probes(Seconds now, Seconds max_age) {
  return std::erase_if(probes_, [&](const EchoProbe& p) { return now - p.sent_at > max_age; });
}

std::optional<Seconds> estimate_link_delay(Seconds rtt) {
  if (!(rtt > 0.0)) return std::nullopt;
  return rtt / 2.0;
}

Seconds synthesize_one_way_delay(const LinkDelayComponents& c) {
  return (c.mac_delay + c.queue_delay + c.tx_delay) * static_cast<double>(c.tx_count);
}

std::optional<MetersPerSecond> required_speed(Meters dist_to_sink, Seconds time_left) {
  if (!(time_left > 0.0)) return std::nullopt;
  return dist_to_sink / time_left;
}

std::optional<MetersPerSecond> provided_speed(Meters dist_current_to_sink,
                                              Meters dist_neighbor_to_sink, Seconds link_delay) {
  if (!(link_delay > 0.0)) return std::nullopt;
  return (dist_current_to_sink - dist_neighbor_to_sink) / link_delay;
}

std::vector<Candidate> eligible_neighbors(const NodeState& state, MetersPerSecond v_req) {
  std::vector<Candidate> out;
  const Meters here = state.dist_to_sink();
  for (const ForwardingEntry& e : state.forwarding_table()) {
    if (!(e.dist_to_sink < here) || !e.link_delay) continue;
    const auto v_prov = provided_speed(here, e.dist_to_sink, *e.link_delay);
    if (v_prov && *v_prov >= v_req) out.push_back({e.neighbor_id, *v_prov, *e.link_delay});
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.provided_speed != b.provided_speed) return a.provided_speed > b.provided_speed;
    return a.neighbor < b.neighbor;
  });
  return out;
}

ForwardDecision decide_forward(const NodeState& state, const DataPacket& pkt) {
  if (pkt.sink_id != state.sink_id()) {
    throw std::invalid_argument("packet addressed to a different sink");
  }
  if (state.is_sink()) {
    throw std::logic_error("decide_forward called at the sink");
  }

  ForwardDecision d;
  const auto v_req = required_speed(state.dist_to_sink(), pkt.t_l);
  if (!v_req) {
    d.outcome = DecisionOutcome::kNoBudget;
    return d;
  }
  d.v_req = *v_req;

  const auto ranked = eligible_neighbors(state, *v_req);
  if (ranked.empty()) {
    d.outcome = DecisionOutcome::kNoRoute;
    return d;
  }

  d.outcome = DecisionOutcome::kForward;
  d.primary_next_hop = ranked[0].neighbor;
  d.primary_link_delay = ranked[0].link_delay;
  d.updated_t_l = pkt.t_l - ranked[0].link_delay;

  const bool at_source = state.id() == pkt.source_id && !pkt.is_duplicate;
  if (at_source && ranked.size() >= 2) {
    d.duplicate_next_hop = ranked[1].neighbor;
    d.duplicate_link_delay = ranked[1].link_delay;
    d.duplicate_updated_t_l = pkt.t_l - ranked[1].link_delay;
  }
  return d;
}

DataPacket on_data_arrival_update(DataPacket pkt, Seconds traversed_link_delay) {
  if (traversed_link_delay < 0.0) {
    throw std::invalid_argument("negative link delay");
  }
  pkt.t_l = std::max(0.0, pkt.t_l - traversed_link_delay);
  ++pkt.hop_count;
  return pkt;
}

}  // namespace dart
