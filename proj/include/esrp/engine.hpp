// Copyright 2026 The ESRP Simulator Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Discrete-event engine running the full protocol cycle: formation, intra-
// cluster TDMA collection, inter-cluster forwarding with the security gates,
// reformation, and termination. Everything is single-threaded and driven by
// one seeded generator, so a configuration fully determines the result.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "esrp/adversary.hpp"
#include "esrp/clustering.hpp"
#include "esrp/codec.hpp"
#include "esrp/energy.hpp"
#include "esrp/errors.hpp"
#include "esrp/metrics.hpp"
#include "esrp/rng.hpp"
#include "esrp/security.hpp"
#include "esrp/topology.hpp"

namespace esrp {

struct RunConfig {
  FieldSpec field;
  std::size_t n_nodes = 100;
  double initial_energy = 2.0;  // joules per node
  Placement placement = Placement::Random;
  std::vector<NodeSpec> node_table;  // when non-empty, replaces n_nodes/placement/initial_energy
  std::size_t k = 5;
  double horizon_s = 3600.0;
  std::size_t iterations = 5;
  std::size_t reform_period = 1;
  double quorum = 2.0 / 3.0;
  double slot_s = 1.0;
  double intra_timeout_s = 30.0;
  double flat_threshold_j = 0.5;
  double termination_threshold_j = 0.5;
  double termination_fraction = 0.85;
  EnergyParams energy;
  SecurityFeatures security;
  SecurityThresholds thresholds;
  AttackSpec attack{25, AttackMix{}, 0.5, 0.0};
  std::optional<AttackAssignment> attack_override;  // fixed attackers instead of a random draw
  double link_rate_bps = 2e6;
  double proc_delay_s = 0.0;
  std::uint8_t dummy_ttl = 3;
  double ack_loss_rate = 0.0;
  double max_overhead_bytes = 650.0;
  std::uint64_t seed = 1;
  bool record_trace = true;

  double iteration_s() const { return horizon_s / static_cast<double>(iterations); }

  void validate() const {
    field.validate();
    energy.validate();
    if (!(horizon_s > 0.0)) throw ConfigError("horizon must be positive");
    if (iterations < 1) throw ConfigError("iterations must be at least 1");
    if (reform_period < 1) throw ConfigError("reform_period must be at least 1");
    if (!(quorum > 0.0) || quorum > 1.0) throw ConfigError("quorum must lie in (0, 1]");
    if (k < 1) throw ConfigError("cluster count k must be at least 1");
    if (!(slot_s > 0.0)) throw ConfigError("slot length must be positive");
    if (!(intra_timeout_s > 0.0)) throw ConfigError("intra timeout must be positive");
    if (!(intra_timeout_s < iteration_s())) throw ConfigError("intra timeout must be shorter than one iteration");
    if (!(link_rate_bps > 0.0)) throw ConfigError("link data rate must be positive");
    if (proc_delay_s < 0.0) throw ConfigError("processing delay must be non-negative");
    if (ack_loss_rate < 0.0 || ack_loss_rate > 1.0) throw ConfigError("ack loss rate must lie in [0, 1]");
    if (termination_fraction <= 0.0 || termination_fraction > 1.0)
      throw ConfigError("termination fraction must lie in (0, 1]");
    if (!(max_overhead_bytes > 0.0)) throw ConfigError("max overhead bytes must be positive");
    if (node_table.empty()) {
      if (n_nodes < 1 || n_nodes > kMaxSensorNodes) throw ConfigError("node count must lie in 1..255");
      if (!(initial_energy > 0.0)) throw ConfigError("initial energy must be positive");
    }
  }
};

// Time for one hop: serialization at the link rate plus processing.
inline double hop_delay(double bits, double link_rate_bps, double proc_delay_s) {
  return bits / link_rate_bps + proc_delay_s;
}

inline double hop_delay(double bits, const RunConfig& cfg) { return hop_delay(bits, cfg.link_rate_bps, cfg.proc_delay_s); }

// True once at least `fraction` of the deployed nodes hold less than
// `threshold` joules; dead nodes count as below.
inline bool check_termination(std::span<const NodeRecord> nodes, double threshold = 0.5, double fraction = 0.85) {
  if (nodes.empty()) return true;
  std::size_t below = 0;
  for (const auto& n : nodes)
    if (n.role == Role::Dead || n.energy < threshold) ++below;
  return static_cast<double>(below) >= fraction * static_cast<double>(nodes.size()) - 1e-9;
}

enum class EventKind : std::uint8_t {
  IterationStart,
  FlatPhase,
  SlotTx,
  Aggregate,
  SweepStart,
  InterStart,
  FrameHop,
  DummyHop,
  IterationEnd,
};

inline constexpr std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::IterationStart: return "iteration_start";
    case EventKind::FlatPhase: return "flat_phase";
    case EventKind::SlotTx: return "slot_tx";
    case EventKind::Aggregate: return "aggregate";
    case EventKind::SweepStart: return "sweep_start";
    case EventKind::InterStart: return "inter_start";
    case EventKind::FrameHop: return "frame_hop";
    case EventKind::DummyHop: return "dummy_hop";
    case EventKind::IterationEnd: return "iteration_end";
  }
  return "unknown";
}

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::IterationStart;
  NodeId a{};
  NodeId b{};
  std::size_t ref = 0;
};

struct EventOrder {
  bool operator()(const Event& x, const Event& y) const {
    if (x.time != y.time) return x.time > y.time;
    return x.seq > y.seq;
  }
};

// Pending events, released in (time, insertion order).
class EventQueue {
 public:
  void push(Event e) {
    e.seq = next_seq_++;
    heap_.push(e);
  }
  bool empty() const { return heap_.empty(); }
  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
  }
  std::size_t size() const { return heap_.size(); }

 private:
  std::priority_queue<Event, std::vector<Event>, EventOrder> heap_;
  std::uint64_t next_seq_ = 0;
};

enum class PacketKind : std::uint8_t {
  Signal,
  Intimation,
  Poll,
  Report,
  RouteFeedbackRequest,
  RouteFeedbackResponse,
  CollectRequest,
  Frame,
  FlatData,
  Question,
  Challenge,
  Answer,
  AnswerForward,
  VerdictNotice,
  Ack,
  Dummy,
  MineProbe,
  MineAck,
  MineReport,
  BlockNotice,
};

inline constexpr std::string_view to_string(PacketKind k) {
  switch (k) {
    case PacketKind::Signal: return "signal";
    case PacketKind::Intimation: return "intimation";
    case PacketKind::Poll: return "poll";
    case PacketKind::Report: return "report";
    case PacketKind::RouteFeedbackRequest: return "route_feedback_req";
    case PacketKind::RouteFeedbackResponse: return "route_feedback_resp";
    case PacketKind::CollectRequest: return "collect_req";
    case PacketKind::Frame: return "frame";
    case PacketKind::FlatData: return "flat_data";
    case PacketKind::Question: return "question";
    case PacketKind::Challenge: return "challenge";
    case PacketKind::Answer: return "answer";
    case PacketKind::AnswerForward: return "answer_fwd";
    case PacketKind::VerdictNotice: return "verdict";
    case PacketKind::Ack: return "ack";
    case PacketKind::Dummy: return "dummy";
    case PacketKind::MineProbe: return "mine_probe";
    case PacketKind::MineAck: return "mine_ack";
    case PacketKind::MineReport: return "mine_report";
    case PacketKind::BlockNotice: return "block_notice";
  }
  return "unknown";
}

enum class PacketCategory : std::uint8_t { Formation, Control, Security, Data };

enum class TraceKind : std::uint8_t { Tx, Rx, Drop, Deliver, Block, Form };

inline constexpr std::string_view to_string(TraceKind k) {
  switch (k) {
    case TraceKind::Tx: return "tx";
    case TraceKind::Rx: return "rx";
    case TraceKind::Drop: return "drop";
    case TraceKind::Deliver: return "deliver";
    case TraceKind::Block: return "block";
    case TraceKind::Form: return "form";
  }
  return "unknown";
}

struct TraceEntry {
  double time = 0.0;
  TraceKind kind = TraceKind::Tx;
  PacketKind packet = PacketKind::Signal;
  NodeId node{};  // acting node
  NodeId peer{};
  std::uint32_t bytes = 0;
  EnergyLedger::Femtojoules residual_fj = 0;  // acting node after the action (sink: 0)
};

struct Adjudication {
  double time = 0.0;
  std::uint32_t epoch = 0;
  NodeId prover{};
  NodeId verifier{};  // kSinkId when the sink checks directly
  std::uint8_t q = 0;
  std::uint8_t expected = 0;
  std::uint8_t claimed = 0;
  bool forged = false;
  Verdict verdict = Verdict::Accept;
};

struct BlockRecord {
  double time = 0.0;
  NodeId node{};
  std::string reason;
};

struct SweepRecord {
  double time = 0.0;
  NodeId ch{};
  std::vector<NodeId> intruders;
};

struct PlanSnapshot {
  double time = 0.0;
  std::size_t iteration = 0;
  ClusterPlan plan;
  KeyIssue keys;
  std::vector<NodeId> dead;
  std::vector<NodeId> blocked;
};

struct LedgerRow {
  std::size_t iteration = 0;
  NodeId node{};
  std::array<EnergyLedger::Femtojoules, kEnergyCategories> debits{};
  EnergyLedger::Femtojoules residual = 0;
};

struct RunResult {
  MetricsReport metrics;
  std::vector<TraceEntry> trace;
  std::vector<std::string> security_log;
  AttackAssignment attacks;
  std::vector<Adjudication> adjudications;
  std::vector<BlockRecord> blocks;
  std::vector<SweepRecord> sweeps;
  std::vector<PlanSnapshot> plans;
  std::vector<LedgerRow> ledger_rows;
  std::vector<NodeRecord> final_nodes;
  EnergyLedger ledger;
  std::uint64_t quorum_misses = 0;
};

class Simulation {
 public:
  explicit Simulation(RunConfig cfg)
      : cfg_(std::move(cfg)),
        root_(cfg_.seed),
        rng_attack_(root_.stream(1)),
        rng_keys_(root_.stream(2)),
        rng_challenge_(root_.stream(3)),
        rng_payload_(root_.stream(4)),
        rng_behavior_(root_.stream(5)),
        rng_dummy_(root_.stream(6)),
        rng_loss_(root_.stream(7)) {
    cfg_.validate();
    deploy_nodes();
  }

  RunResult run() {
    queue_.push(Event{0.0, 0, EventKind::IterationStart, {}, {}, 0});
    while (!queue_.empty()) {
      const Event e = queue_.pop();
      if (e.time < now_) throw std::logic_error("event scheduled in the past");
      now_ = e.time;
      dispatch(e);
    }
    result_.final_nodes = nodes_;
    result_.ledger = ledger_;
    result_.metrics.horizon_s = cfg_.horizon_s;
    result_.metrics.max_overhead_bytes = cfg_.max_overhead_bytes;
    return std::move(result_);
  }

  // Deploys and forms the t = 0 plan without running any iteration.
  PlanSnapshot formation_preview() {
    form(0);
    return result_.plans.back();
  }

  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const AttackAssignment& attacks() const { return result_.attacks; }

 private:
  struct Reading {
    NodeId member{};
    std::uint8_t energy = 0;
    std::array<std::uint8_t, 2> value{};
  };

  struct IntraState {
    std::vector<Reading> readings;
    std::size_t expected = 0;
    bool aggregated = false;
  };

  struct Frame {
    NodeId origin{};
    NodeId at{};
    Bytes encoded;
    std::size_t payload_bytes = 0;
    std::uint64_t reports = 0;
    double path_delay_s = 0.0;
    bool first_hop = true;
  };

  struct Decoy {
    DummyPacket packet;
    std::vector<NodeId> route;
    std::size_t next = 0;
    NodeId at{};
  };

  // ---- setup ------------------------------------------------------------

  void deploy_nodes() {
    Deployment d = cfg_.node_table.empty()
                       ? deploy(cfg_.field, cfg_.n_nodes, cfg_.initial_energy, root_.stream(0).next(), cfg_.placement)
                       : deploy(cfg_.field, std::span<const NodeSpec>(cfg_.node_table));
    nodes_ = std::move(d.nodes);
    sink_ = d.sink.pos;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      index_[nodes_[i].id] = i;
      ledger_.open(nodes_[i].id, nodes_[i].initial_energy);
      nodes_[i].energy = ledger_.residual(nodes_[i].id);
    }
    result_.attacks = cfg_.attack_override ? *cfg_.attack_override : build_attack_set(nodes_, cfg_.attack, rng_attack_);
    for (const auto& [id, profile] : result_.attacks) node(id).attack = profile;
    result_.metrics.energy_budget_j = ledger_.to_joules(ledger_.total_initial_fj());
    result_.metrics.initial_alive = nodes_.size();
  }

  NodeRecord& node(NodeId id) {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown node id " + std::to_string(to_int(id)));
    return nodes_[it->second];
  }

  bool is_sensor(NodeId id) const { return id != kSinkId; }

  bool active(NodeId id) { return id == kSinkId || node(id).active(); }

  Position pos(NodeId id) { return id == kSinkId ? sink_ : node(id).pos; }

  // ---- energy and transmissions -----------------------------------------

  void debit(NodeId id, EnergyCategory c, double joules) {
    if (!is_sensor(id)) return;
    NodeRecord& n = node(id);
    if (n.role == Role::Dead || n.role == Role::Blocked) return;
    ledger_.debit(id, c, joules);
    n.energy = ledger_.residual(id);
    if (ledger_.depleted(id)) {
      n.energy = 0.0;
      n.role = Role::Dead;
    }
  }

  void trace(TraceKind kind, PacketKind packet, NodeId who, NodeId peer, std::size_t bytes) {
    if (!cfg_.record_trace) return;
    TraceEntry t;
    t.time = now_;
    t.kind = kind;
    t.packet = packet;
    t.node = who;
    t.peer = peer;
    t.bytes = static_cast<std::uint32_t>(bytes);
    t.residual_fj = is_sensor(who) ? ledger_.residual_fj(who) : 0;
    result_.trace.push_back(t);
  }

  static bool is_data_sized(PacketKind k) {
    return k == PacketKind::Report || k == PacketKind::Frame || k == PacketKind::FlatData;
  }

  void count(PacketCategory c, std::size_t bytes, std::size_t payload_bytes) {
    switch (c) {
      case PacketCategory::Formation: ++formation_packets_; break;
      case PacketCategory::Control: ++control_packets_; break;
      case PacketCategory::Security: ++security_packets_; break;
      case PacketCategory::Data: ++data_packets_; break;
    }
    overhead_bytes_ += bytes - payload_bytes;
  }

  // One transmission from `from` to the listed receivers. Returns the
  // receivers that got the packet; empty when the sender could not send.
  std::vector<NodeId> transmit(PacketKind kind, PacketCategory cat, NodeId from, std::span<const NodeId> to,
                               std::size_t bytes, std::size_t payload_bytes = 0) {
    if (!active(from)) return {};
    const double bits = is_data_sized(kind) ? cfg_.energy.k_data : cfg_.energy.k_signal;
    double d = 0.0;
    for (NodeId r : to) d = std::max(d, distance(pos(from), pos(r)));
    debit(from, EnergyCategory::Tx, tx_energy(bits, d, cfg_.energy));
    count(cat, bytes, payload_bytes);
    trace(TraceKind::Tx, kind, from, to.size() == 1 ? to.front() : from, bytes);
    if (!active(from)) return {};  // ran dry mid-transmission
    std::vector<NodeId> got;
    for (NodeId r : to) {
      if (!active(r)) continue;
      debit(r, EnergyCategory::Rx, rx_energy(bits, cfg_.energy));
      debit(r, EnergyCategory::Cpu, cpu_energy(bits, cfg_.energy));
      trace(TraceKind::Rx, kind, r, from, bytes);
      if (active(r)) got.push_back(r);
    }
    return got;
  }

  bool send(PacketKind kind, PacketCategory cat, NodeId from, NodeId to, std::size_t bytes,
            std::size_t payload_bytes = 0) {
    const NodeId dest[1] = {to};
    return !transmit(kind, cat, from, dest, bytes, payload_bytes).empty();
  }

  void charge_awake(NodeId id, double seconds) {
    const BaselinePower p = baseline_energy_per_second(cfg_.energy);
    debit(id, EnergyCategory::RadioIdle, p.radio * seconds);
    debit(id, EnergyCategory::Sensor, p.sensor * seconds);
  }

  static std::size_t small_packet_bytes(std::size_t payload) { return kCmReportHeaderSize + 1 + payload; }

  void log(const std::string& line) {
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "t=%.6f ", now_);
    result_.security_log.push_back(stamp + line);
  }

  void block(NodeId id, const std::string& reason) {
    NodeRecord& n = node(id);
    if (n.role == Role::Blocked) return;
    n.role = Role::Blocked;
    result_.blocks.push_back({now_, id, reason});
    trace(TraceKind::Block, PacketKind::BlockNotice, id, kSinkId, 0);
    log("block node=" + std::to_string(to_int(id)) + " reason=" + reason);
  }

  // ---- formation --------------------------------------------------------

  FormationParams formation_params() const {
    return FormationParams{cfg_.k, cfg_.field.radio_range, cfg_.field.sink_reach()};
  }

  void apply_plan(std::size_t iteration) {
    for (auto& n : nodes_)
      if (n.role != Role::Dead && n.role != Role::Blocked) n.role = Role::Flat;
    for (const auto& c : plan_.clusters) {
      node(c.ch).role = Role::ClusterHead;
      for (NodeId m : c.members) node(m).role = Role::Member;
    }
    keys_ = cfg_.security.any() ? issue_keys_and_roles(plan_, nodes_, cfg_.thresholds, cfg_.security, epoch_, rng_keys_)
                                : KeyIssue{epoch_, 0, {}};
    PlanSnapshot snap;
    snap.time = now_;
    snap.iteration = iteration;
    snap.plan = plan_;
    snap.keys = keys_;
    for (const auto& n : nodes_) {
      if (n.role == Role::Dead) snap.dead.push_back(n.id);
      if (n.role == Role::Blocked) snap.blocked.push_back(n.id);
    }
    result_.plans.push_back(std::move(snap));
    trace(TraceKind::Form, PacketKind::Signal, kSinkId, kSinkId, plan_.cluster_count());

    // Signal packets: the CH's keys, up to four member ids each, and its upstream.
    for (const auto& c : plan_.clusters) {
      const ChSecurity& sec = keys_.at(c.ch);
      const std::size_t packets = std::max<std::size_t>(1, (c.members.size() + 3) / 4);
      for (std::size_t p = 0; p < packets; ++p) {
        SignalPacket sp;
        sp.ch_id = static_cast<std::uint8_t>(to_int(c.ch));
        sp.public_key = keys_.public_n;
        sp.private_key = sec.secret.value_or(0);
        sp.cm_ids.fill(kEmptyCmSlot);
        for (std::size_t j = 0; j < 4 && p * 4 + j < c.members.size(); ++j)
          sp.cm_ids[j] = static_cast<std::uint8_t>(to_int(c.members[p * 4 + j]));
        const NodeId up = plan_.upstream_of(c.ch);
        sp.neighbor_ch_id = static_cast<std::uint8_t>(to_int(up));
        send(PacketKind::Signal, PacketCategory::Formation, kSinkId, c.ch, encode_signal(sp).size());
      }
      if (sec.secret) debit(c.ch, EnergyCategory::Mem, mem_energy(MemAccess::Write, cfg_.energy.l_key, cfg_.energy));
      if (!c.members.empty())
        transmit(PacketKind::Intimation, PacketCategory::Formation, c.ch, c.members, small_packet_bytes(0));
    }
  }

  void form(std::size_t iteration) {
    if (iteration == 0) {
      plan_ = form_clusters(nodes_, sink_, formation_params());
      result_.metrics.initial_clusters = plan_.cluster_count();
    } else {
      for (auto& n : nodes_)
        if (n.status.any_fail() && n.role != Role::Blocked) block(n.id, "status");
      ++epoch_;
      ReformParams rp{formation_params(), cfg_.flat_threshold_j};
      plan_ = reform_clusters(plan_, nodes_, sink_, rp);
    }
    for (const auto& w : plan_.warnings) log("plan warning: " + w);
    apply_plan(iteration);
  }

  // ---- iteration phases -------------------------------------------------

  void on_iteration_start(const Event& e) {
    iteration_ = e.ref;
    const double t0 = now_;
    if (iteration_ == 0 || iteration_ % cfg_.reform_period == 0) form(iteration_);
    sessions_.clear();
    iteration_delay_s_ = 0.0;
    intra_.clear();
    frames_.clear();
    decoys_.clear();

    for (const auto& c : plan_.clusters) {
      if (!active(c.ch)) continue;
      charge_awake(c.ch, cfg_.iteration_s());
      IntraState& st = intra_[c.ch];
      st.expected = c.members.size();
      double slot_end = t0;
      for (std::size_t s = 0; s < c.members.size(); ++s) {
        const double start = t0 + static_cast<double>(s) * cfg_.slot_s;
        if (start >= t0 + cfg_.intra_timeout_s) break;
        queue_.push(Event{start, 0, EventKind::SlotTx, c.ch, c.members[s], s});
        slot_end = start + cfg_.slot_s;
      }
      const double agg = std::min(slot_end, t0 + cfg_.intra_timeout_s);
      queue_.push(Event{agg, 0, EventKind::Aggregate, c.ch, {}, 0});
    }
    queue_.push(Event{t0, 0, EventKind::FlatPhase, {}, {}, 0});
    queue_.push(Event{t0 + cfg_.intra_timeout_s, 0, EventKind::InterStart, {}, {}, 0});
    queue_.push(Event{t0 + cfg_.iteration_s(), 0, EventKind::IterationEnd, {}, {}, iteration_});
  }

  std::array<std::uint8_t, 2> sense() {
    // Coarse readings so that neighbouring members often report identical values.
    const std::uint8_t v = static_cast<std::uint8_t>(20 + rng_payload_.below(8));
    return {v, 0};
  }

  void on_slot(const Event& e) {
    const NodeId ch = e.a;
    const NodeId m = e.b;
    if (!active(ch)) return;
    auto& st = intra_[ch];
    if (st.aggregated) return;
    send(PacketKind::Poll, PacketCategory::Control, ch, m, small_packet_bytes(0));
    if (!active(m)) return;
    charge_awake(m, cfg_.slot_s);
    if (!active(m)) return;
    CmReport r;
    r.node_id = static_cast<std::uint8_t>(to_int(m));
    r.energy = EnergyByte::quantize(node(m).energy, node(m).initial_energy).q;
    r.ch_id = static_cast<std::uint8_t>(to_int(ch));
    const auto value = sense();
    r.payload.assign(value.begin(), value.end());
    ++generated_;
    if (send(PacketKind::Report, PacketCategory::Control, m, ch, encode_cm(r).size(), r.payload.size()))
      st.readings.push_back(Reading{m, r.energy, value});
  }

  void on_aggregate(const Event& e) {
    const NodeId ch = e.a;
    if (!active(ch)) return;
    auto& st = intra_[ch];
    st.aggregated = true;
    const auto needed = static_cast<std::size_t>(std::ceil(cfg_.quorum * static_cast<double>(st.expected) - 1e-9));
    if (st.readings.size() < needed) {
      ++result_.quorum_misses;
      log("quorum miss ch=" + std::to_string(to_int(ch)) + " reports=" + std::to_string(st.readings.size()) + "/" +
          std::to_string(st.expected));
    }

    ChFrame f;
    f.hier_flag = true;
    f.is_ch = true;
    f.node_id = static_cast<std::uint8_t>(to_int(ch));
    f.energy = EnergyByte::quantize(node(ch).energy, node(ch).initial_energy).q;
    f.next_ch_id = static_cast<std::uint8_t>(to_int(plan_.upstream_of(ch)));
    unsigned energy_sum = 0;
    std::set<std::array<std::uint8_t, 2>> seen;
    for (const auto& rd : st.readings) {
      energy_sum += rd.energy;
      if (f.cm_payload.size() + 2 <= kChFrameMaxPayload && seen.insert(rd.value).second)
        f.cm_payload.insert(f.cm_payload.end(), rd.value.begin(), rd.value.end());
    }
    if (!st.readings.empty()) {
      f.cm_id = static_cast<std::uint8_t>(to_int(st.readings.back().member));
      f.cm_energy = st.readings.back().energy;
      f.cm_energy2 = static_cast<std::uint8_t>(energy_sum / st.readings.size());
    }
    const ChSecurity& sec = keys_.at(ch);
    f.public_key = keys_.public_n;
    f.role = sec.role;
    f.trap_enable = sec.trap_enable;
    f.mine_enable = sec.mine_enable;
    f.promisc_enable = sec.promisc_enable;
    f.status = node(ch).status;

    Frame fr;
    fr.origin = ch;
    fr.at = ch;
    fr.encoded = encode_ch(f);
    fr.payload_bytes = f.cm_payload.size();
    fr.reports = st.readings.size();
    fr.path_delay_s = st.readings.empty() ? 0.0 : hop_delay(cfg_.energy.k_data, cfg_);
    pending_frames_[ch] = std::move(fr);

    if (sec.mine_enable) queue_.push(Event{now_, 0, EventKind::SweepStart, ch, {}, 0});
  }

  bool reacts(NodeId id, Stimulus s, Reaction* out = nullptr) {
    const Reaction r = perturb(node(id).attack, s, now_, rng_behavior_);
    if (out != nullptr) *out = r;
    return r.comply;
  }

  void on_sweep(const Event& e) {
    const NodeId ch = e.a;
    if (!active(ch)) return;
    if (!send(PacketKind::MineProbe, PacketCategory::Security, kSinkId, ch, small_packet_bytes(0))) return;
    if (reacts(ch, Stimulus::MineProbe)) {
      send(PacketKind::MineAck, PacketCategory::Security, ch, kSinkId, small_packet_bytes(0));
    } else {
      node(ch).status.mine = TriState::Fail;
      log("sweep sink flagged ch=" + std::to_string(to_int(ch)));
    }
    const Cluster* c = plan_.cluster_headed_by(ch);
    if (c == nullptr || c->members.empty() || !active(ch)) return;
    std::vector<NodeId> targets;
    for (NodeId m : c->members)
      if (node(m).role != Role::Blocked) targets.push_back(m);
    if (targets.empty()) return;
    const auto heard = transmit(PacketKind::MineProbe, PacketCategory::Security, ch, targets, small_packet_bytes(0));
    std::set<NodeId> acked;
    for (NodeId m : heard) {
      if (!reacts(m, Stimulus::MineProbe)) continue;
      if (send(PacketKind::MineAck, PacketCategory::Security, m, ch, small_packet_bytes(0))) acked.insert(m);
    }
    const auto intruders = mine_detection_sweep(targets, [&](NodeId m) { return acked.count(m) != 0; });
    std::string list;
    for (NodeId m : intruders) {
      node(m).status.mine = TriState::Fail;
      list += (list.empty() ? "" : ",") + std::to_string(to_int(m));
    }
    for (NodeId m : acked)
      if (node(m).status.mine == TriState::Unknown) node(m).status.mine = TriState::Pass;
    result_.sweeps.push_back({now_, ch, intruders});
    log("sweep ch=" + std::to_string(to_int(ch)) + " intruders=[" + list + "]");
    send(PacketKind::MineReport, PacketCategory::Security, ch, kSinkId, small_packet_bytes(intruders.size()));
  }

  void on_flat_phase(const Event&) {
    std::vector<NodeId> senders;
    for (NodeId id : plan_.flat)
      if (active(id)) senders.push_back(id);
    for (NodeId src : senders) {
      if (!active(src)) continue;
      charge_awake(src, cfg_.slot_s);
      if (!active(src)) continue;
      ++generated_;
      CmReport r;
      r.node_id = static_cast<std::uint8_t>(to_int(src));
      r.energy = EnergyByte::quantize(node(src).energy, node(src).initial_energy).q;
      r.ch_id = static_cast<std::uint8_t>(to_int(kSinkId));
      const auto value = sense();
      r.payload.assign(value.begin(), value.end());
      const std::size_t bytes = encode_cm(r).size();
      NodeId at = src;
      double delay = 0.0;
      while (true) {
        NodeId next = kSinkId;
        const double here = distance(pos(at), sink_);
        if (here > cfg_.field.sink_reach() || here > cfg_.field.radio_range) {
          double best = here;
          for (NodeId o : plan_.flat) {
            if (o == at || !active(o)) continue;
            const double ds = distance(pos(o), sink_);
            if (distance(pos(at), pos(o)) <= cfg_.field.radio_range && ds < best) {
              best = ds;
              next = o;
            }
          }
        }
        if (!send(PacketKind::FlatData, PacketCategory::Data, at, next, bytes, r.payload.size())) break;
        delay += hop_delay(cfg_.energy.k_data, cfg_);
        ++toward_;
        if (next == kSinkId) {
          ++delivered_;
          iteration_delay_s_ = std::max(iteration_delay_s_, delay);
          trace(TraceKind::Deliver, PacketKind::FlatData, src, kSinkId, bytes);
          break;
        }
        if (!reacts(next, Stimulus::Forward)) {
          trace(TraceKind::Drop, PacketKind::FlatData, next, at, bytes);
          break;
        }
        at = next;
      }
    }
  }

  void on_inter_start(const Event&) {
    if (plan_.clusters.empty()) return;
    const NodeId root = plan_.clusters.front().ch;
    if (send(PacketKind::RouteFeedbackRequest, PacketCategory::Control, kSinkId, root, small_packet_bytes(0)))
      send(PacketKind::RouteFeedbackResponse, PacketCategory::Control, root, kSinkId, small_packet_bytes(0));
    for (const auto& c : plan_.clusters) {
      if (!active(c.ch)) continue;
      if (!send(PacketKind::CollectRequest, PacketCategory::Control, kSinkId, c.ch, small_packet_bytes(0))) continue;
      auto it = pending_frames_.find(c.ch);
      if (it == pending_frames_.end()) continue;
      frames_.push_back(std::move(it->second));
      pending_frames_.erase(it);
      queue_.push(Event{now_, 0, EventKind::FrameHop, c.ch, {}, frames_.size() - 1});
    }
    pending_frames_.clear();
    for (const auto& c : plan_.clusters) {
      if (!active(c.ch)) continue;
      const auto packet = spawn_dummy_traffic(c.ch, keys_.at(c.ch), cfg_.dummy_ttl, rng_dummy_);
      if (!packet) continue;
      Decoy d;
      d.packet = *packet;
      d.route = route_dummy(plan_, *packet, [&](NodeId id) { return active(id); }, rng_dummy_);
      d.at = c.ch;
      std::string hops;
      for (NodeId h : d.route) hops += (hops.empty() ? "" : ",") + std::to_string(to_int(h));
      log("dummy origin=" + std::to_string(to_int(c.ch)) + " ttl=" + std::to_string(packet->ttl) + " hops=[" + hops +
          "]");
      if (d.route.empty()) continue;
      decoys_.push_back(std::move(d));
      queue_.push(Event{now_, 0, EventKind::DummyHop, c.ch, {}, decoys_.size() - 1});
    }
  }

  // Identity check of `prover` before it hands a frame to `verifier`. Returns
  // false when the sink blocked the prover.
  bool identity_gate(NodeId prover, NodeId verifier, double& delay) {
    const auto keys = keys_.keys_of(prover);
    if (!keys) return true;
    const std::uint8_t q = draw_challenge(keys->public_n, rng_challenge_);
    const std::size_t qb = small_packet_bytes(1);
    const double sig = hop_delay(cfg_.energy.k_signal, cfg_);
    if (verifier == kSinkId) {
      if (!send(PacketKind::Challenge, PacketCategory::Security, kSinkId, prover, qb)) return false;
      delay += sig;
    } else {
      if (!send(PacketKind::Question, PacketCategory::Security, kSinkId, verifier, qb)) return false;
      if (!send(PacketKind::Challenge, PacketCategory::Security, verifier, prover, qb)) return false;
      delay += 2 * sig;
    }
    Reaction r;
    reacts(prover, Stimulus::MzkpChallenge, &r);
    const std::uint8_t secret = r.forged_secret.value_or(keys->secret);
    debit(prover, EnergyCategory::Mem, mem_energy(MemAccess::Read, cfg_.energy.l_key, cfg_.energy));
    debit(prover, EnergyCategory::Cpu, cpu_energy(cfg_.energy.k_signal, cfg_.energy));
    const std::uint8_t answer = mzkp_answer(secret, keys->public_n, q);
    if (!send(PacketKind::Answer, PacketCategory::Security, prover, verifier, qb)) return false;
    delay += sig;
    if (verifier != kSinkId) {
      if (!send(PacketKind::AnswerForward, PacketCategory::Security, verifier, kSinkId, qb)) return false;
      delay += sig;
    }
    Adjudication adj;
    adj.time = now_;
    adj.epoch = keys->epoch;
    adj.prover = prover;
    adj.verifier = verifier;
    adj.q = q;
    adj.expected = mzkp_answer(keys->secret, keys->public_n, q);
    adj.claimed = answer;
    adj.forged = r.forged_secret.has_value();
    adj.verdict = mzkp_adjudicate(keys_, prover, answer, q);
    result_.adjudications.push_back(adj);
    log("mzkp prover=" + std::to_string(to_int(prover)) + " verifier=" + std::to_string(to_int(verifier)) +
        " q=" + std::to_string(q) + " verdict=" + (adj.verdict == Verdict::Accept ? "accept" : "block"));
    if (adj.verdict == Verdict::Block) {
      node(prover).status.mzkp = TriState::Fail;
      block(prover, "mzkp");
      const auto chs = active_chs();
      transmit(PacketKind::BlockNotice, PacketCategory::Security, kSinkId, chs, small_packet_bytes(1));
      return false;
    }
    node(prover).status.mzkp = TriState::Pass;
    if (verifier != kSinkId) {
      send(PacketKind::VerdictNotice, PacketCategory::Security, kSinkId, verifier, qb);
      delay += sig;
    }
    return true;
  }

  std::vector<NodeId> active_chs() {
    std::vector<NodeId> out;
    for (const auto& c : plan_.clusters)
      if (active(c.ch)) out.push_back(c.ch);
    return out;
  }

  void on_frame_hop(const Event& e) {
    Frame& f = frames_[e.ref];
    const NodeId p = f.at;
    if (!active(p)) {
      trace(TraceKind::Drop, PacketKind::Frame, p, p, f.encoded.size());
      return;
    }
    const NodeId v = plan_.upstream_of(p);
    if (!active(v)) {
      trace(TraceKind::Drop, PacketKind::Frame, p, v, f.encoded.size());
      return;
    }
    const ChSecurity& ps = keys_.at(p);
    const ChSecurity& vs = keys_.at(v);
    double delay = 0.0;
    bool audited = false;
    if (cfg_.security.mzkp) {
      const bool gated = v == kSinkId ? ps.proves_to_sink : proves(ps.role) && verifies(vs.role);
      if (gated) {
        const auto link = std::make_pair(p, v);
        if (sessions_.count(link) == 0) {
          if (!identity_gate(p, v, delay)) {
            trace(TraceKind::Drop, PacketKind::Frame, p, v, f.encoded.size());
            return;
          }
          sessions_.insert(link);
        }
        audited = v != kSinkId && ps.promisc_enable;
      }
    }
    const PacketCategory cat = f.first_hop ? PacketCategory::Control : PacketCategory::Data;
    f.first_hop = false;
    if (!send(PacketKind::Frame, cat, p, v, f.encoded.size(), f.payload_bytes)) {
      trace(TraceKind::Drop, PacketKind::Frame, p, v, f.encoded.size());
      return;
    }
    ++toward_;
    delay += hop_delay(cfg_.energy.k_data, cfg_);
    f.path_delay_s += delay;
    if (v == kSinkId) {
      delivered_ += f.reports;
      iteration_delay_s_ = std::max(iteration_delay_s_, f.path_delay_s);
      trace(TraceKind::Deliver, PacketKind::Frame, f.origin, kSinkId, f.encoded.size());
      return;
    }
    Reaction r;
    const bool forwards = reacts(v, Stimulus::Forward, &r);
    if (audited) {
      bool heard = false;
      if (r.ack) {
        send(PacketKind::Ack, PacketCategory::Security, v, p, small_packet_bytes(0));
        heard = !rng_loss_.bernoulli(cfg_.ack_loss_rate);
      }
      const TriState s = promiscuous_audit(heard);
      NodeRecord& vn = node(v);
      if (vn.status.promisc != TriState::Fail) vn.status.promisc = s;
      log("audit prover=" + std::to_string(to_int(p)) + " verifier=" + std::to_string(to_int(v)) +
          " ack=" + (heard ? "1" : "0"));
    }
    if (!forwards) {
      trace(TraceKind::Drop, PacketKind::Frame, v, p, f.encoded.size());
      return;
    }
    f.at = v;
    queue_.push(Event{now_ + delay, 0, EventKind::FrameHop, v, {}, e.ref});
  }

  void on_dummy_hop(const Event& e) {
    Decoy& d = decoys_[e.ref];
    if (d.next >= d.route.size()) return;
    const NodeId to = d.route[d.next];
    if (!active(d.at) || !active(to)) return;
    if (!send(PacketKind::Dummy, PacketCategory::Security, d.at, to, small_packet_bytes(2))) return;
    ++away_;
    d.at = to;
    ++d.next;
    if (d.next < d.route.size())
      queue_.push(Event{now_ + hop_delay(cfg_.energy.k_signal, cfg_), 0, EventKind::DummyHop, to, {}, e.ref});
  }

  void on_iteration_end(const Event& e) {
    delay_ms_ += iteration_delay_s_ * 1000.0;
    IterationSample s;
    s.iteration = e.ref;
    s.time_s = now_;
    for (const auto& n : nodes_) {
      if (n.active()) ++s.alive;
      if (n.role == Role::Dead || n.energy < cfg_.termination_threshold_j) ++s.below_threshold;
      if (n.role == Role::Blocked) ++s.blocked;
    }
    s.energy_spent_j = ledger_.total_spent();
    s.delay_ms = delay_ms_;
    s.overhead_bytes = overhead_bytes_;
    s.control_packets = control_packets_;
    s.security_packets = security_packets_;
    s.data_packets = data_packets_;
    s.generated = generated_;
    s.delivered = delivered_;
    for (const auto& c : plan_.clusters)
      if (active(c.ch)) ++s.clusters;
    for (NodeId id : plan_.flat)
      if (active(id)) ++s.flat;
    s.toward_sink = toward_;
    s.away_from_sink = away_;
    result_.metrics.series.push_back(s);
    for (const auto& [id, acct] : ledger_.accounts()) result_.ledger_rows.push_back({e.ref, id, acct.debits, acct.residual});

    if (check_termination(nodes_, cfg_.termination_threshold_j, cfg_.termination_fraction)) {
      result_.metrics.terminated = e.ref + 1 < cfg_.iterations;
      log("termination at iteration " + std::to_string(e.ref));
      return;
    }
    if (e.ref + 1 < cfg_.iterations) queue_.push(Event{now_, 0, EventKind::IterationStart, {}, {}, e.ref + 1});
  }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::IterationStart: on_iteration_start(e); break;
      case EventKind::FlatPhase: on_flat_phase(e); break;
      case EventKind::SlotTx: on_slot(e); break;
      case EventKind::Aggregate: on_aggregate(e); break;
      case EventKind::SweepStart: on_sweep(e); break;
      case EventKind::InterStart: on_inter_start(e); break;
      case EventKind::FrameHop: on_frame_hop(e); break;
      case EventKind::DummyHop: on_dummy_hop(e); break;
      case EventKind::IterationEnd: on_iteration_end(e); break;
    }
  }

  RunConfig cfg_;
  Rng root_;
  Rng rng_attack_;
  Rng rng_keys_;
  Rng rng_challenge_;
  Rng rng_payload_;
  Rng rng_behavior_;
  Rng rng_dummy_;
  Rng rng_loss_;

  std::vector<NodeRecord> nodes_;
  std::map<NodeId, std::size_t> index_;
  Position sink_;
  EnergyLedger ledger_;
  EventQueue queue_;
  double now_ = 0.0;

  ClusterPlan plan_;
  KeyIssue keys_;
  std::uint32_t epoch_ = 0;
  std::size_t iteration_ = 0;

  std::map<NodeId, IntraState> intra_;
  std::map<NodeId, Frame> pending_frames_;
  std::vector<Frame> frames_;
  std::vector<Decoy> decoys_;
  std::set<std::pair<NodeId, NodeId>> sessions_;

  double iteration_delay_s_ = 0.0;
  double delay_ms_ = 0.0;
  std::uint64_t overhead_bytes_ = 0;
  std::uint64_t formation_packets_ = 0;
  std::uint64_t control_packets_ = 0;
  std::uint64_t security_packets_ = 0;
  std::uint64_t data_packets_ = 0;
  std::uint64_t generated_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t toward_ = 0;
  std::uint64_t away_ = 0;

  RunResult result_;
};

inline RunResult run_simulation(const RunConfig& cfg) { return Simulation(cfg).run(); }

}  // namespace esrp
