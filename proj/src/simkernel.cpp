#include "dart/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>
#include <variant>

namespace dart {

bool MacDelayModel::valid() const {
  return base_mac_delay >= 0.0 && queue_service_rate > 0.0 && tx_delay >= 0.0 &&
         contention_coeff >= 0.0 && jitter_mean >= 0.0;
}

LinkSample sample_link_delay(const MacDelayModel& mac, const ChannelLoad& load,
                             double loss_probability, Rng& rng) {
  LinkSample s;
  auto& c = s.components;
  c.mac_delay = mac.base_mac_delay + mac.contention_coeff * load.local_load;
  if (mac.jitter_mean > 0.0) {
    c.mac_delay += std::exponential_distribution<double>(1.0 / mac.jitter_mean)(rng);
  }
  c.queue_delay =
      load.queue_occupancy == 0 ? 0.0 : static_cast<double>(load.queue_occupancy) / mac.queue_service_rate;
  c.tx_delay = mac.tx_delay;

  std::bernoulli_distribution lost(loss_probability);
  c.tx_count = 1;
  s.delivered = false;
  for (;;) {
    if (!lost(rng)) {
      s.delivered = true;
      break;
    }
    if (c.tx_count > mac.max_retries) break;
    ++c.tx_count;
  }
  return s;
}

bool Topology::adjacent(NodeId a, NodeId b) const {
  const auto& adj = adjacency.at(index_of(a));
  return std::binary_search(adj.begin(), adj.end(), b);
}

std::vector<bool> Topology::reaches_sink() const {
  std::vector<bool> seen(size(), false);
  std::deque<NodeId> frontier{sink};
  seen[index_of(sink)] = true;
  while (!frontier.empty()) {
    const NodeId n = frontier.front();
    frontier.pop_front();
    for (NodeId m : adjacency[index_of(n)]) {
      if (!seen[index_of(m)]) {
        seen[index_of(m)] = true;
        frontier.push_back(m);
      }
    }
  }
  return seen;
}

namespace {

Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), purpose};
  return Rng(seq);
}

constexpr std::uint32_t kTopologyStream = 0;
constexpr std::uint32_t kControlStream = 1;
constexpr std::uint32_t kDataStream = 2;
constexpr std::uint32_t kTrafficStream = 3;

bool inside(const NodePos& p, Meters w, Meters h) {
  return p.x >= 0.0 && p.x <= w && p.y >= 0.0 && p.y <= h;
}

}  // namespace

Topology build_topology(const TopologySpec& spec, std::uint64_t seed) {
  if (!(spec.area_width > 0.0 && spec.area_height > 0.0)) {
    throw std::invalid_argument("area must have positive width and height");
  }
  if (!(spec.tx_range > 0.0)) throw std::invalid_argument("tx_range must be positive");

  Topology topo;
  topo.tx_range = spec.tx_range;
  topo.sink = spec.sink;

  switch (spec.placement) {
    case Placement::kUniform: {
      if (spec.node_count < 2) throw std::invalid_argument("need at least 2 nodes");
      if (!inside(spec.sink_pos, spec.area_width, spec.area_height)) {
        throw std::invalid_argument("sink position outside the area");
      }
      Rng rng = make_stream(seed, 0, kTopologyStream);
      std::uniform_real_distribution<double> ux(0.0, spec.area_width);
      std::uniform_real_distribution<double> uy(0.0, spec.area_height);
      topo.positions.resize(spec.node_count);
      for (std::uint32_t i = 0; i < spec.node_count; ++i) {
        if (NodeId{i} == spec.sink) {
          topo.positions[i] = spec.sink_pos;
          continue;
        }
        const double x = ux(rng);
        const double y = uy(rng);
        topo.positions[i] = {x, y};
      }
      break;
    }
    case Placement::kGrid: {
      if (spec.node_count < 2) throw std::invalid_argument("need at least 2 nodes");
      const auto n = static_cast<double>(spec.node_count);
      auto cols = static_cast<std::uint32_t>(
          std::ceil(std::sqrt(n * spec.area_width / spec.area_height)));
      cols = std::clamp<std::uint32_t>(cols, 1, spec.node_count);
      const std::uint32_t rows = (spec.node_count + cols - 1) / cols;
      const double dx = cols > 1 ? spec.area_width / (cols - 1) : 0.0;
      const double dy = rows > 1 ? spec.area_height / (rows - 1) : 0.0;
      for (std::uint32_t i = 0; i < spec.node_count; ++i) {
        topo.positions.push_back({(i % cols) * dx, (i / cols) * dy});
      }
      break;
    }
    case Placement::kExplicit: {
      if (spec.positions.size() < 2) throw std::invalid_argument("need at least 2 nodes");
      for (const auto& p : spec.positions) {
        if (!inside(p, spec.area_width, spec.area_height)) {
          throw std::invalid_argument("explicit position outside the area");
        }
      }
      topo.positions = spec.positions;
      break;
    }
  }
  if (index_of(topo.sink) >= topo.positions.size()) {
    throw std::invalid_argument("sink id out of range");
  }

  const std::size_t n = topo.positions.size();
  topo.adjacency.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(topo.positions[i], topo.positions[j]) <= spec.tx_range) {
        topo.adjacency[i].push_back(NodeId{static_cast<std::uint32_t>(j)});
        topo.adjacency[j].push_back(NodeId{static_cast<std::uint32_t>(i)});
      }
    }
  }
  for (auto& adj : topo.adjacency) std::sort(adj.begin(), adj.end());
  return topo;
}

std::vector<NodeId> farthest_from_sink(const Topology& topo, std::size_t count) {
  std::vector<NodeId> ids;
  const NodePos& sink = topo.positions[index_of(topo.sink)];
  for (std::uint32_t i = 0; i < topo.size(); ++i) {
    if (NodeId{i} != topo.sink) ids.push_back(NodeId{i});
  }
  std::stable_sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
    return distance(topo.positions[index_of(a)], sink) > distance(topo.positions[index_of(b)], sink);
  });
  ids.resize(std::min(count, ids.size()));
  return ids;
}

namespace {

struct EchoMsg {
  std::uint64_t probe_id = 0;
  bool reply = false;
};

struct DataMsg {
  DataPacket pkt;
  Seconds est_link_delay = 0.0;
  bool lost = false;  // every attempt failed; the event marks the drop
};

using Message = std::variant<HelloPacket, AckPacket, EchoMsg, DataMsg>;

struct Arrival {
  NodeId from;
  NodeId to;
  Message msg;
};

struct NodeRef {
  NodeId node;
  NodeId peer;  // probe target / ACK destination
  AckPacket ack;
};

struct SourceRef {
  std::size_t index = 0;
};

using Payload = std::variant<std::monostate, NodeRef, SourceRef, Arrival>;

struct QueuedEvent {
  SimEvent head;
  Payload payload;
};

struct Later {
  bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
    if (a.head.fire_at != b.head.fire_at) return a.head.fire_at > b.head.fire_at;
    return a.head.seq > b.head.seq;
  }
};

constexpr double kNever = -std::numeric_limits<double>::infinity();

class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg) : cfg_(cfg), topo_(cfg.topology) {
    if (!cfg_.mac.valid()) throw std::invalid_argument("invalid MAC delay model");
    if (!(cfg_.radio.loss_probability >= 0.0 && cfg_.radio.loss_probability <= 1.0)) {
      throw std::invalid_argument("loss probability must be in [0, 1]");
    }
    if (!(cfg_.sim_time > 0.0)) throw std::invalid_argument("sim_time must be positive");
    if (!(cfg_.timing.echo_period > 0.0 && cfg_.timing.hello_period > 0.0)) {
      throw std::invalid_argument("echo and hello periods must be positive");
    }

    const std::size_t n = topo_.size();
    const NodePos& sink_pos = topo_.positions[index_of(topo_.sink)];
    for (std::uint32_t i = 0; i < n; ++i) {
      states_.emplace_back(NodeId{i}, topo_.positions[i], topo_.sink, sink_pos,
                           cfg_.timing.initial_energy, i, cfg_.timing.delay_smoothing);
      control_rng_.push_back(make_stream(cfg_.seed, i + 1, kControlStream));
      data_rng_.push_back(make_stream(cfg_.seed, i + 1, kDataStream));
    }
    air_.assign(n, 0);
    own_.assign(n, 0);
    flow_of_node_.assign(n, -1);
    for (std::size_t f = 0; f < cfg_.sources.size(); ++f) {
      const auto& src = cfg_.sources[f];
      if (!src.valid()) throw std::invalid_argument("invalid CBR source");
      if (index_of(src.node) >= n) throw std::invalid_argument("CBR source id out of range");
      if (src.node == topo_.sink) throw std::invalid_argument("the sink cannot be a CBR source");
      if (flow_of_node_[index_of(src.node)] >= 0) {
        throw std::invalid_argument("node listed twice as a CBR source");
      }
      flow_of_node_[index_of(src.node)] = static_cast<int>(f);
    }
    flow_seen_.assign(n, std::vector<Seconds>(cfg_.sources.size(), kNever));
  }

  RunResult run() {
    record_preamble();
    schedule(cfg_.sim_time, EventKind::kRunEnd, std::monostate{});
    schedule(0.0, EventKind::kHelloRound, std::monostate{});
    schedule(cfg_.timing.discovery_time, EventKind::kEchoRound, std::monostate{});
    for (std::size_t f = 0; f < cfg_.sources.size(); ++f) {
      const auto& src = cfg_.sources[f];
      // Phase is drawn as a fraction of the interval so runs that differ only
      // in the interval see the same relative offsets.
      Rng rng = make_stream(cfg_.seed, index_of(src.node) + 1, kTrafficStream);
      const double phase = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const Seconds first = src.start_at + phase * src.interval;
      if (first < stop_of(src)) schedule(first, EventKind::kCbrEmit, SourceRef{f});
    }
    if (cfg_.snapshot_period > 0.0) {
      schedule(cfg_.snapshot_period, EventKind::kMetricSnapshot, std::monostate{});
    }

    while (!queue_.empty()) {
      QueuedEvent ev = queue_.top();
      queue_.pop();
      now_ = ev.head.fire_at;
      if (ev.head.kind == EventKind::kRunEnd) break;
      ++processed_;
      dispatch(ev);
    }
    now_ = cfg_.sim_time;
    finish();

    RunResult result;
    result.trace = std::move(trace_);
    result.nodes = std::move(states_);
    result.warnings = std::move(warnings_);
    result.events_processed = processed_;
    return result;
  }

 private:
  Seconds stop_of(const CbrSource& src) const {
    return src.stop_at ? std::min(*src.stop_at, cfg_.sim_time) : cfg_.sim_time;
  }

  void schedule(Seconds at, EventKind kind, Payload payload) {
    queue_.push(QueuedEvent{SimEvent{at, seq_++, kind}, std::move(payload)});
  }

  void record(TraceKind kind, std::int64_t node, std::int64_t event_id, std::string detail) {
    trace_.push_back(TraceRecord{now_, kind, node, event_id, std::move(detail)});
  }

  void record_preamble() {
    const auto& info = cfg_.info;
    record(TraceKind::kRun, -1, -1,
           Detail()
               .add("nodes", info.nodes)
               .add("sim_time", info.sim_time)
               .add("deadline_ms", info.deadline_ms)
               .add("interval_s", info.interval_s)
               .add("seed", info.seed)
               .add("sink", topo_.sink.value)
               .add("range", topo_.tx_range)
               .str());
    for (std::uint32_t i = 0; i < topo_.size(); ++i) {
      const auto& p = topo_.positions[i];
      record(TraceKind::kNode, i, -1,
             Detail()
                 .add("x", p.x)
                 .add("y", p.y)
                 .add("sink", NodeId{i} == topo_.sink)
                 .add("source", flow_of_node_[i] >= 0)
                 .add("energy", cfg_.timing.initial_energy)
                 .str());
    }
    const auto reach = topo_.reaches_sink();
    for (const auto& src : cfg_.sources) {
      if (!reach[index_of(src.node)]) {
        warnings_.push_back("source " + std::to_string(src.node.value) +
                            " has no radio path to the sink");
      }
    }
  }

  // --- channel bookkeeping -------------------------------------------------

  ChannelLoad channel_load(NodeId from, int flow) const {
    const std::size_t i = index_of(from);
    ChannelLoad load;
    load.queue_occupancy = static_cast<std::uint32_t>(own_[i]);
    double active = static_cast<double>(air_[i] - own_[i]);
    const auto& seen = flow_seen_[i];
    for (std::size_t f = 0; f < seen.size(); ++f) {
      if (static_cast<int>(f) != flow && now_ - seen[f] < cfg_.timing.load_window) active += 1.0;
    }
    load.local_load = active;
    return load;
  }

  void occupy(NodeId from, Seconds duration, int flow) {
    const std::size_t i = index_of(from);
    ++own_[i];
    ++air_[i];
    if (flow >= 0) flow_seen_[i][flow] = now_;
    for (NodeId m : topo_.adjacency[i]) {
      ++air_[index_of(m)];
      if (flow >= 0) flow_seen_[index_of(m)][flow] = now_;
    }
    schedule(now_ + duration, EventKind::kTxEnd, NodeRef{from, from, {}});
  }

  void release(NodeId from) {
    const std::size_t i = index_of(from);
    --own_[i];
    --air_[i];
    for (NodeId m : topo_.adjacency[i]) --air_[index_of(m)];
  }

  /// Unicast with retries. Returns the sampled one-way delay.
  void unicast(NodeId from, NodeId to, Message msg, Rng& rng, int flow) {
    const LinkSample s = sample_link_delay(cfg_.mac, channel_load(from, flow),
                                           cfg_.radio.loss_probability, rng);
    const Seconds d = s.one_way();
    occupy(from, d, flow);
    if (s.delivered) {
      schedule(now_ + d, EventKind::kPacketArrival, Arrival{from, to, std::move(msg)});
    } else if (auto* data = std::get_if<DataMsg>(&msg)) {
      data->lost = true;
      schedule(now_ + d, EventKind::kPacketArrival, Arrival{from, to, std::move(msg)});
    }
  }

  // --- event handlers --------------------------------------------------------

  void dispatch(QueuedEvent& ev) {
    switch (ev.head.kind) {
      case EventKind::kHelloRound: on_hello_round(); break;
      case EventKind::kHelloSend: on_hello_send(std::get<NodeRef>(ev.payload).node); break;
      case EventKind::kAckSend: on_ack_send(std::get<NodeRef>(ev.payload)); break;
      case EventKind::kEchoRound: on_echo_round(); break;
      case EventKind::kEchoProbe: on_echo_probe(std::get<NodeRef>(ev.payload)); break;
      case EventKind::kPacketArrival: on_arrival(std::get<Arrival>(ev.payload)); break;
      case EventKind::kTxEnd: release(std::get<NodeRef>(ev.payload).node); break;
      case EventKind::kCbrEmit: on_cbr_emit(std::get<SourceRef>(ev.payload).index); break;
      case EventKind::kMetricSnapshot: on_snapshot(); break;
      case EventKind::kRunEnd: break;
    }
  }

  void on_hello_round() {
    const auto& t = cfg_.timing;
    // Discovery is compressed into hello_jitter; refresh rounds spread each
    // node's HELLO over the whole period so ACK bursts do not line up.
    const Seconds spread = now_ == 0.0 ? t.hello_jitter : t.hello_period;
    for (std::uint32_t i = 0; i < states_.size(); ++i) {
      states_[i].expire_neighbors(now_, t.neighbor_timeout);
      const double offset = std::uniform_real_distribution<double>(0.0, spread)(control_rng_[i]);
      schedule(now_ + offset, EventKind::kHelloSend, NodeRef{NodeId{i}, NodeId{i}, {}});
    }
    schedule(now_ + t.hello_period, EventKind::kHelloRound, std::monostate{});
  }

  void on_hello_send(NodeId from) {
    const std::size_t i = index_of(from);
    const NodeState& me = states_[i];
    const HelloPacket hello = make_hello(from, me.pos(), me.sink_pos());
    if (cfg_.trace_control) {
      record(TraceKind::kHello, from.value, -1, Detail().add("dist", hello.dist_to_sink).str());
    }
    // Broadcast: a single channel access, no link-layer retries, independent
    // reception at each neighbor.
    MacDelayModel broadcast = cfg_.mac;
    broadcast.max_retries = 0;
    Rng& rng = control_rng_[i];
    const LinkSample s = sample_link_delay(broadcast, channel_load(from, -1), 0.0, rng);
    const Seconds d = s.one_way();
    occupy(from, d, -1);
    std::bernoulli_distribution lost(cfg_.radio.loss_probability);
    for (NodeId m : topo_.adjacency[i]) {
      if (!lost(rng)) schedule(now_ + d, EventKind::kPacketArrival, Arrival{from, m, hello});
    }
  }

  void on_ack_send(const NodeRef& ref) {
    if (cfg_.trace_control) {
      record(TraceKind::kAck, ref.node.value, -1, Detail().add("to", ref.peer.value).str());
    }
    unicast(ref.node, ref.peer, ref.ack, control_rng_[index_of(ref.node)], -1);
  }

  void on_echo_round() {
    const Seconds period = cfg_.timing.echo_period;
    for (std::uint32_t i = 0; i < states_.size(); ++i) {
      for (const auto& e : states_[i].forwarding_table()) {
        const double offset = std::uniform_real_distribution<double>(0.0, period)(control_rng_[i]);
        schedule(now_ + offset, EventKind::kEchoProbe, NodeRef{NodeId{i}, e.neighbor_id, {}});
      }
    }
    schedule(now_ + period, EventKind::kEchoRound, std::monostate{});
  }

  void on_echo_probe(const NodeRef& ref) {
    NodeState& me = states_[index_of(ref.node)];
    if (me.find(ref.peer) == nullptr) return;
    me.expire_probes(now_, cfg_.timing.echo_period);
    const EchoProbe probe = me.start_probe(ref.peer, now_);
    if (cfg_.trace_control) {
      record(TraceKind::kEchoProbe, ref.node.value, -1,
             Detail().add("to", ref.peer.value).add("probe", probe.probe_id).str());
    }
    unicast(ref.node, ref.peer, EchoMsg{probe.probe_id, false}, control_rng_[index_of(ref.node)],
            -1);
  }

  void on_arrival(Arrival& a) {
    const std::size_t to = index_of(a.to);
    std::visit(
        [&](auto& msg) {
          using T = std::decay_t<decltype(msg)>;
          if constexpr (std::is_same_v<T, HelloPacket>) {
            const AckPacket ack = states_[to].on_hello(msg, now_);
            const double backoff = std::uniform_real_distribution<double>(
                0.0, cfg_.timing.ack_jitter)(control_rng_[to]);
            schedule(now_ + backoff, EventKind::kAckSend, NodeRef{a.to, a.from, ack});
          } else if constexpr (std::is_same_v<T, AckPacket>) {
            states_[to].on_ack(msg, now_);
          } else if constexpr (std::is_same_v<T, EchoMsg>) {
            on_echo_arrival(a, msg);
          } else {
            on_data_arrival(a, msg);
          }
        },
        a.msg);
  }

  void on_echo_arrival(const Arrival& a, const EchoMsg& msg) {
    if (!msg.reply) {
      if (cfg_.trace_control) {
        record(TraceKind::kEchoReply, a.to.value, -1,
               Detail().add("to", a.from.value).add("probe", msg.probe_id).str());
      }
      unicast(a.to, a.from, EchoMsg{msg.probe_id, true}, control_rng_[index_of(a.to)], -1);
      return;
    }
    const auto delay = states_[index_of(a.to)].on_echo_reply(msg.probe_id, now_);
    if (delay && cfg_.trace_control) {
      record(TraceKind::kLinkDelay, a.to.value, -1,
             Detail().add("nbr", a.from.value).add("delay", *delay).str());
    }
  }

  void on_data_arrival(const Arrival& a, const DataMsg& msg) {
    --in_flight_;
    const auto ev = static_cast<std::int64_t>(msg.pkt.event_id);
    if (msg.lost) {
      record(TraceKind::kDrop, a.from.value, ev,
             Detail()
                 .add("reason", "loss")
                 .add("dup", msg.pkt.is_duplicate)
                 .add("next", a.to.value)
                 .str());
      return;
    }
    const DataPacket pkt = on_data_arrival_update(msg.pkt, msg.est_link_delay);
    const NodeState& here = states_[index_of(a.to)];
    if (here.is_sink()) {
      record(TraceKind::kDeliver, a.to.value, ev,
             Detail()
                 .add("from", a.from.value)
                 .add("dup", pkt.is_duplicate)
                 .add("t_l", pkt.t_l)
                 .add("hops", pkt.hop_count)
                 .str());
      ++delivered_copies_;
      return;
    }
    record(TraceKind::kArrive, a.to.value, ev,
           Detail()
               .add("from", a.from.value)
               .add("dup", pkt.is_duplicate)
               .add("t_l", pkt.t_l)
               .add("hops", pkt.hop_count)
               .str());
    forward(a.to, pkt);
  }

  void drop(NodeId at, const DataPacket& pkt, const char* reason) {
    record(TraceKind::kDrop, at.value, static_cast<std::int64_t>(pkt.event_id),
           Detail().add("reason", reason).add("dup", pkt.is_duplicate).str());
  }

  void send_data(NodeId from, NodeId to, const DataPacket& pkt, Seconds est, Seconds v_req) {
    record(TraceKind::kForward, from.value, static_cast<std::int64_t>(pkt.event_id),
           Detail()
               .add("next", to.value)
               .add("dup", pkt.is_duplicate)
               .add("t_l", pkt.t_l)
               .add("v_req", v_req)
               .add("link", est)
               .str());
    ++in_flight_;
    const int flow = flow_of_node_[index_of(pkt.source_id)];
    unicast(from, to, DataMsg{pkt, est, false}, data_rng_[index_of(from)], flow);
  }

  void forward(NodeId at, const DataPacket& pkt) {
    const ForwardDecision d = decide_forward(states_[index_of(at)], pkt);
    switch (d.outcome) {
      case DecisionOutcome::kNoBudget: drop(at, pkt, "no_budget"); return;
      case DecisionOutcome::kNoRoute: drop(at, pkt, "no_route"); return;
      case DecisionOutcome::kForward: break;
    }
    send_data(at, *d.primary_next_hop, pkt, d.primary_link_delay, d.v_req);
    if (d.duplicate_next_hop) {
      DataPacket copy = pkt;
      copy.is_duplicate = true;
      record(TraceKind::kDuplicate, at.value, static_cast<std::int64_t>(pkt.event_id),
             Detail().add("next", d.duplicate_next_hop->value).str());
      send_data(at, *d.duplicate_next_hop, copy, d.duplicate_link_delay, d.v_req);
    }
  }

  void on_cbr_emit(std::size_t f) {
    const CbrSource& src = cfg_.sources[f];
    const DataPacket pkt =
        make_data_packet(next_event_id_++, src.node, topo_.sink, src.packet_deadline, now_);
    record(TraceKind::kEmit, src.node.value, static_cast<std::int64_t>(pkt.event_id),
           Detail().add("t_set", pkt.t_set).add("sink", topo_.sink.value).str());
    ++emitted_;
    forward(src.node, pkt);
    const Seconds next = now_ + src.interval;
    if (next < stop_of(src)) schedule(next, EventKind::kCbrEmit, SourceRef{f});
  }

  void on_snapshot() {
    record(TraceKind::kSnapshot, -1, -1,
           Detail()
               .add("emitted", emitted_)
               .add("delivered_copies", delivered_copies_)
               .add("in_flight", in_flight_)
               .str());
    schedule(now_ + cfg_.snapshot_period, EventKind::kMetricSnapshot, std::monostate{});
  }

  void finish() {
    // Copies still on a link when the clock stops never reach the sink.
    while (!queue_.empty()) {
      const QueuedEvent ev = queue_.top();
      queue_.pop();
      if (ev.head.kind != EventKind::kPacketArrival) continue;
      const auto& a = std::get<Arrival>(ev.payload);
      if (const auto* data = std::get_if<DataMsg>(&a.msg)) {
        record(TraceKind::kDrop, a.from.value, static_cast<std::int64_t>(data->pkt.event_id),
               Detail()
                   .add("reason", "unfinished")
                   .add("dup", data->pkt.is_duplicate)
                   .add("next", a.to.value)
                   .str());
      }
    }
    record(TraceKind::kEnd, -1, -1, Detail().add("events", processed_).str());
  }

  const SimConfig& cfg_;
  const Topology& topo_;
  std::vector<NodeState> states_;
  std::vector<Rng> control_rng_;
  std::vector<Rng> data_rng_;
  std::vector<std::int32_t> air_;   // transmissions audible at each node
  std::vector<std::int32_t> own_;   // each node's own transmissions in flight
  std::vector<int> flow_of_node_;
  std::vector<std::vector<Seconds>> flow_seen_;

  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, Later> queue_;
  std::uint64_t seq_ = 0;
  Seconds now_ = 0.0;
  EventId next_event_id_ = 0;
  std::uint64_t processed_ = 0;
  std::uint64_t emitted_ = 0;
  std::uint64_t delivered_copies_ = 0;
  std::int64_t in_flight_ = 0;
  Trace trace_;
  std::vector<std::string> warnings_;
};

}  // namespace

RunResult run_simulation(const SimConfig& config) {
  if (config.topology.size() < 2) throw std::invalid_argument("topology has fewer than 2 nodes");
  return Simulator(config).run();
}

}  // namespace dart
