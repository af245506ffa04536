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

// Sink-driven security mechanisms: identity challenges between forwarding
// cluster heads, promiscuous acknowledgement audits, decoy traffic sent away
// from the sink, and mine-detection sweeps for silent members.
//
// The challenge answer (s^2 * q mod n over one-byte keys) reproduces the
// message flow of a zero-knowledge identity check. It offers no cryptographic
// strength and must not be used as such.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "esrp/clustering.hpp"
#include "esrp/rng.hpp"
#include "esrp/security_role.hpp"
#include "esrp/topology.hpp"

namespace esrp {

struct KeyMaterial {
  std::uint8_t secret = 0;
  std::uint8_t public_n = 0;
  std::uint32_t epoch = 0;

  friend bool operator==(const KeyMaterial&, const KeyMaterial&) = default;
};

// Residual-energy fractions (of a node's initial energy) a CH must exceed.
struct SecurityThresholds {
  double mzkp = 0.25;
  double trap = 0.50;
  double mine = 0.10;
};

struct SecurityFeatures {
  bool mzkp = true;
  bool promiscuous = true;
  bool trapping = true;
  bool mine_detection = true;

  static SecurityFeatures none() { return {false, false, false, false}; }
  bool any() const { return mzkp || promiscuous || trapping || mine_detection; }
};

// What the sink tells one CH at (re)formation.
struct ChSecurity {
  SecurityRole role = SecurityRole::None;
  bool proves_to_sink = false;  // upstream is the sink and the sink checks it directly
  std::optional<std::uint8_t> secret;
  bool trap_enable = false;
  bool mine_enable = false;
  bool promisc_enable = false;

  friend bool operator==(const ChSecurity&, const ChSecurity&) = default;
};

struct KeyIssue {
  std::uint32_t epoch = 0;
  std::uint8_t public_n = 0;  // 0 when no CH was selected
  std::map<NodeId, ChSecurity> chs;

  const ChSecurity& at(NodeId ch) const {
    static const ChSecurity kNone{};
    auto it = chs.find(ch);
    return it == chs.end() ? kNone : it->second;
  }

  std::optional<KeyMaterial> keys_of(NodeId ch) const {
    const ChSecurity& s = at(ch);
    if (!s.secret) return std::nullopt;
    return KeyMaterial{*s.secret, public_n, epoch};
  }

  friend bool operator==(const KeyIssue&, const KeyIssue&) = default;
};

inline bool valid_modulus(std::uint8_t n) { return n >= 3 && (n & 1U) == 1U; }

// A CH forwarding to an upstream CH is the Prover of that link and the upstream
// CH its Verifier, when both are above the identity-check threshold. A CH whose
// upstream is the sink is checked by the sink itself. Every checked CH receives
// a fresh secret; one odd public modulus is shared by all of them.
inline KeyIssue issue_keys_and_roles(const ClusterPlan& plan, std::span<const NodeRecord> nodes,
                                     const SecurityThresholds& thresholds, const SecurityFeatures& features,
                                     std::uint32_t epoch, Rng& rng) {
  KeyIssue issue;
  issue.epoch = epoch;
  auto above = [&](NodeId id, double fraction) {
    const NodeRecord& n = node_at(nodes, id);
    return n.energy > fraction * n.initial_energy;
  };
  for (const auto& c : plan.clusters) issue.chs[c.ch] = ChSecurity{};

  if (features.mzkp) {
    for (const auto& [ch, up] : plan.upstream) {
      if (!above(ch, thresholds.mzkp)) continue;
      if (up == kSinkId) {
        issue.chs[ch].proves_to_sink = true;
      } else if (above(up, thresholds.mzkp)) {
        issue.chs[ch].role = with_prover(issue.chs[ch].role);
        issue.chs[up].role = with_verifier(issue.chs[up].role);
      }
    }
  }
  bool any_keyed = false;
  for (const auto& [ch, s] : issue.chs) any_keyed = any_keyed || proves(s.role) || s.proves_to_sink;
  if (any_keyed) issue.public_n = static_cast<std::uint8_t>(3 + 2 * rng.below(127));
  for (auto& [ch, s] : issue.chs) {
    if (proves(s.role) || s.proves_to_sink) s.secret = rng.byte();
    s.promisc_enable = features.promiscuous && proves(s.role);
    s.trap_enable = features.trapping && above(ch, thresholds.trap);
    s.mine_enable = features.mine_detection && above(ch, thresholds.mine);
  }
  return issue;
}

inline std::uint8_t mzkp_answer(std::uint8_t s, std::uint8_t n, std::uint8_t q) {
  if (!valid_modulus(n)) throw std::invalid_argument("public modulus must be odd and at least 3");
  if (q == 0) throw std::invalid_argument("challenge must be nonzero");
  const std::uint32_t ss = static_cast<std::uint32_t>(s) * s % n;
  return static_cast<std::uint8_t>(ss * q % n);
}

// Challenges are nonzero residues of the public modulus.
inline std::uint8_t draw_challenge(std::uint8_t n, Rng& rng) {
  if (!valid_modulus(n)) throw std::invalid_argument("public modulus must be odd and at least 3");
  return static_cast<std::uint8_t>(1 + rng.below(n - 1U));
}

enum class Verdict : std::uint8_t { Accept, Block };

// The sink recomputes the answer from the keys it issued.
inline Verdict mzkp_adjudicate(const KeyIssue& issued, NodeId prover, std::uint8_t claimed, std::uint8_t q) {
  const auto keys = issued.keys_of(prover);
  if (!keys) throw std::out_of_range("no keys issued to node " + std::to_string(to_int(prover)));
  return claimed == mzkp_answer(keys->secret, keys->public_n, q) ? Verdict::Accept : Verdict::Block;
}

// Status the prover records for its verifier after listening for the ack.
inline TriState promiscuous_audit(bool ack_heard) { return ack_heard ? TriState::Pass : TriState::Fail; }

struct DummyPacket {
  std::uint8_t ttl = 1;
  NodeId origin{};
  std::uint8_t nonce = 0;
};

// Hops taken by a decoy leaving `origin`: each hop moves to a downstream CH
// (uniformly among usable ones) and costs one unit of TTL.
inline std::vector<NodeId> route_dummy(const ClusterPlan& plan, const DummyPacket& packet,
                                       const std::function<bool(NodeId)>& usable, Rng& rng) {
  std::vector<NodeId> hops;
  NodeId at = packet.origin;
  for (unsigned ttl = packet.ttl; ttl > 0; --ttl) {
    std::vector<NodeId> next;
    for (NodeId d : plan.downstream_of(at))
      if (usable(d)) next.push_back(d);
    if (next.empty()) break;
    at = next[rng.below(next.size())];
    hops.push_back(at);
  }
  return hops;
}

inline std::optional<DummyPacket> spawn_dummy_traffic(NodeId ch, const ChSecurity& config, std::uint8_t ttl,
                                                      Rng& rng) {
  if (!config.trap_enable || ttl == 0) return std::nullopt;
  return DummyPacket{ttl, ch, rng.byte()};
}

// Members that failed to acknowledge the CH's probe, in member order.
inline std::vector<NodeId> mine_detection_sweep(std::span<const NodeId> members,
                                                const std::function<bool(NodeId)>& acked) {
  std::vector<NodeId> intruders;
  for (NodeId m : members)
    if (!acked(m)) intruders.push_back(m);
  return intruders;
}

// Binary entropy (bits) of the direction of observed flows.
inline double directional_entropy(std::uint64_t toward_sink, std::uint64_t away_from_sink) {
  const double total = static_cast<double>(toward_sink + away_from_sink);
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (double c : {static_cast<double>(toward_sink), static_cast<double>(away_from_sink)}) {
    if (c > 0.0) h -= c / total * std::log2(c / total);
  }
  return h;
}

}  // namespace esrp
