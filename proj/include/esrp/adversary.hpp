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

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "esrp/attack_profile.hpp"
#include "esrp/errors.hpp"
#include "esrp/rng.hpp"
#include "esrp/topology.hpp"

namespace esrp {

// Relative weights of the four attack kinds, indexed by AttackKind.
struct AttackMix {
  std::array<double, 4> weights{1.0, 1.0, 1.0, 1.0};

  static AttackMix only(AttackKind kind) {
    AttackMix m;
    m.weights.fill(0.0);
    m.weights[static_cast<std::size_t>(kind)] = 1.0;
    return m;
  }
};

struct AttackSpec {
  std::size_t n_attackers = 0;
  AttackMix mix;
  double drop_prob = 0.5;
  double activation_time = 0.0;
};

using AttackAssignment = std::vector<std::pair<NodeId, AttackProfile>>;

namespace detail {

// Largest-remainder apportionment of n attackers over the mix.
inline std::array<std::size_t, 4> apportion(std::size_t n, const AttackMix& mix) {
  double total = 0.0;
  for (double w : mix.weights) {
    if (w < 0.0) throw ConfigError("attack mix weights must be non-negative");
    total += w;
  }
  if (n > 0 && !(total > 0.0)) throw ConfigError("attack mix has no positive weight");
  std::array<std::size_t, 4> counts{};
  std::array<double, 4> rem{};
  std::size_t given = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double exact = total > 0.0 ? static_cast<double>(n) * mix.weights[i] / total : 0.0;
    counts[i] = static_cast<std::size_t>(exact);
    rem[i] = exact - static_cast<double>(counts[i]);
    given += counts[i];
  }
  while (given < n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 4; ++i)
      if (rem[i] > rem[best]) best = i;
    ++counts[best];
    rem[best] = -1.0;
    ++given;
  }
  return counts;
}

}  // namespace detail

// Picks n distinct live nodes uniformly and hands out kinds in proportion to
// the mix. Returned pairs are sorted by node id.
inline AttackAssignment build_attack_set(std::span<const NodeRecord> nodes, const AttackSpec& spec, Rng& rng) {
  std::vector<NodeId> pool;
  for (const auto& n : nodes)
    if (n.active()) pool.push_back(n.id);
  std::sort(pool.begin(), pool.end());
  if (spec.n_attackers > pool.size())
    throw ConfigError("requested " + std::to_string(spec.n_attackers) + " attackers but only " +
                      std::to_string(pool.size()) + " live nodes");
  if (spec.drop_prob < 0.0 || spec.drop_prob > 1.0) throw ConfigError("drop_prob must lie in [0, 1]");

  for (std::size_t i = 0; i < spec.n_attackers; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  const auto counts = detail::apportion(spec.n_attackers, spec.mix);
  AttackAssignment out;
  std::size_t next = 0;
  for (std::size_t kind = 0; kind < 4; ++kind) {
    for (std::size_t c = 0; c < counts[kind]; ++c) {
      AttackProfile p;
      p.kind = static_cast<AttackKind>(kind);
      p.activation_time = spec.activation_time;
      if (p.kind == AttackKind::Compromised) p.wrong_secret = rng.byte();
      p.drop_prob = p.kind == AttackKind::SelectiveForward ? spec.drop_prob : (p.kind == AttackKind::BlackHole ? 1.0 : 0.0);
      out.emplace_back(pool[next++], p);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

enum class Stimulus : std::uint8_t { Forward, MzkpChallenge, MineProbe };

struct Reaction {
  bool comply = true;  // forwards the packet / answers the probe
  bool ack = true;     // acknowledges the sender
  std::optional<std::uint8_t> forged_secret;
};

inline bool attack_active(const std::optional<AttackProfile>& profile, double now) {
  return profile.has_value() && now >= profile->activation_time;
}

// How a node reacts to a stimulus. Honest or not-yet-active nodes always
// comply; randomness is drawn only for selective forwarding.
inline Reaction perturb(const std::optional<AttackProfile>& profile, Stimulus stimulus, double now, Rng& rng) {
  Reaction r;
  if (!attack_active(profile, now)) return r;
  switch (profile->kind) {
    case AttackKind::Compromised:
      if (stimulus == Stimulus::MzkpChallenge) r.forged_secret = profile->wrong_secret;
      break;
    case AttackKind::SelectiveForward:
      if (stimulus == Stimulus::Forward && rng.bernoulli(profile->drop_prob)) r.comply = r.ack = false;
      break;
    case AttackKind::BlackHole:
      if (stimulus == Stimulus::Forward) r.comply = r.ack = false;
      break;
    case AttackKind::SelfIntruder:
      if (stimulus == Stimulus::MineProbe) r.comply = r.ack = false;
      break;
  }
  return r;
}

}  // namespace esrp
