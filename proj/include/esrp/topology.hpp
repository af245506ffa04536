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
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "esrp/attack_profile.hpp"
#include "esrp/errors.hpp"
#include "esrp/rng.hpp"

namespace esrp {

// Logical node identity; one byte on the wire. 255 is reserved for the sink.
enum class NodeId : std::uint8_t {};

inline constexpr NodeId kSinkId{255};
inline constexpr std::size_t kMaxSensorNodes = 255;

constexpr int to_int(NodeId id) noexcept { return static_cast<int>(id); }
constexpr NodeId node_id(int value) noexcept { return NodeId{static_cast<std::uint8_t>(value)}; }

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class Role : std::uint8_t { Sink, ClusterHead, Member, Flat, Dead, Blocked };

inline constexpr std::string_view to_string(Role role) {
  switch (role) {
    case Role::Sink: return "sink";
    case Role::ClusterHead: return "ch";
    case Role::Member: return "cm";
    case Role::Flat: return "flat";
    case Role::Dead: return "dead";
    case Role::Blocked: return "blocked";
  }
  return "unknown";
}

enum class TriState : std::uint8_t { Unknown = 0, Pass = 1, Fail = 2 };

// Outcome of each security mechanism as last reported to the sink.
struct SecurityStatus {
  TriState mzkp = TriState::Unknown;
  TriState promisc = TriState::Unknown;
  TriState mine = TriState::Unknown;

  bool any_fail() const noexcept {
    return mzkp == TriState::Fail || promisc == TriState::Fail || mine == TriState::Fail;
  }

  friend bool operator==(const SecurityStatus&, const SecurityStatus&) = default;
};

struct NodeRecord {
  NodeId id{};
  Position pos;
  double energy = 0.0;          // residual, joules
  double initial_energy = 0.0;  // joules
  Role role = Role::Flat;
  SecurityStatus status;
  std::optional<AttackProfile> attack;

  // Participates in routing: has energy and has not been excluded by the sink.
  bool active() const noexcept { return role != Role::Dead && role != Role::Blocked && energy > 0.0; }

  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

struct FieldSpec {
  double width = 1900.0;
  double height = 1100.0;
  double radio_range = 50.0;
  // Reach of the sink's own radio; unset means the sink reaches the whole field.
  std::optional<double> sink_range;
  // Unset means the field center.
  std::optional<Position> sink_position;

  Position sink() const { return sink_position.value_or(Position{width / 2.0, height / 2.0}); }

  double sink_reach() const { return sink_range.value_or(std::numeric_limits<double>::infinity()); }

  void validate() const {
    if (!(width > 0.0) || !(height > 0.0)) throw ConfigError("field has zero area");
    if (!(radio_range > 0.0)) throw ConfigError("radio_range must be positive");
    if (sink_range && !(*sink_range > 0.0)) throw ConfigError("sink_range must be positive");
    const Position s = sink();
    if (s.x < 0.0 || s.x > width || s.y < 0.0 || s.y > height)
      throw ConfigError("sink position lies outside the field");
  }

  bool contains(Position p) const noexcept { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
};

enum class Placement : std::uint8_t { Random, Grid };

// One row of an explicit node table.
struct NodeSpec {
  int id = 0;
  Position pos;
  double energy = 0.0;  // joules
};

struct Deployment {
  std::vector<NodeRecord> nodes;  // sorted by id
  NodeRecord sink;

  double initial_total() const {
    double total = 0.0;
    for (const auto& n : nodes) total += n.initial_energy;
    return total;
  }
};

namespace detail {

inline NodeRecord make_node(int id, Position pos, double energy) {
  NodeRecord n;
  n.id = node_id(id);
  n.pos = pos;
  n.energy = energy;
  n.initial_energy = energy;
  n.role = Role::Flat;
  return n;
}

inline NodeRecord make_sink(const FieldSpec& spec) {
  NodeRecord s;
  s.id = kSinkId;
  s.pos = spec.sink();
  s.energy = std::numeric_limits<double>::infinity();
  s.initial_energy = s.energy;
  s.role = Role::Sink;
  return s;
}

}  // namespace detail

// Places n sensor nodes in the field. Random placement is uniform over the
// field; grid placement spreads nodes over ceil(sqrt(n)) columns with half-cell
// margins. Identical arguments yield identical deployments.
inline Deployment deploy(const FieldSpec& spec, std::size_t n_nodes, double initial_energy, std::uint64_t seed,
                         Placement placement = Placement::Random) {
  spec.validate();
  if (n_nodes < 1) throw ConfigError("at least one sensor node is required");
  if (n_nodes > kMaxSensorNodes) throw ConfigError("node count exceeds the one-byte id range (255)");
  if (!(initial_energy > 0.0)) throw ConfigError("initial energy must be positive");

  Deployment d;
  d.sink = detail::make_sink(spec);
  d.nodes.reserve(n_nodes);
  if (placement == Placement::Random) {
    Rng rng(seed);
    for (std::size_t i = 0; i < n_nodes; ++i) {
      const double x = rng.uniform(0.0, spec.width);
      const double y = rng.uniform(0.0, spec.height);
      d.nodes.push_back(detail::make_node(static_cast<int>(i), {x, y}, initial_energy));
    }
  } else {
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_nodes))));
    const std::size_t rows = (n_nodes + cols - 1) / cols;
    const double dx = spec.width / static_cast<double>(cols);
    const double dy = spec.height / static_cast<double>(rows);
    for (std::size_t i = 0; i < n_nodes; ++i) {
      const double x = dx * (static_cast<double>(i % cols) + 0.5);
      const double y = dy * (static_cast<double>(i / cols) + 0.5);
      d.nodes.push_back(detail::make_node(static_cast<int>(i), {x, y}, initial_energy));
    }
  }
  return d;
}

// Deployment from an explicit node table (hardware replays).
inline Deployment deploy(const FieldSpec& spec, std::span<const NodeSpec> table) {
  spec.validate();
  if (table.empty()) throw ConfigError("node table is empty");
  if (table.size() > kMaxSensorNodes) throw ConfigError("node table exceeds the one-byte id range (255)");
  Deployment d;
  d.sink = detail::make_sink(spec);
  for (const auto& row : table) {
    if (row.id < 0 || row.id >= static_cast<int>(kMaxSensorNodes))
      throw ConfigError("node id " + std::to_string(row.id) + " outside 0..254");
    if (!spec.contains(row.pos)) throw ConfigError("node " + std::to_string(row.id) + " lies outside the field");
    if (!(row.energy > 0.0)) throw ConfigError("node " + std::to_string(row.id) + " has no energy");
    d.nodes.push_back(detail::make_node(row.id, row.pos, row.energy));
  }
  std::sort(d.nodes.begin(), d.nodes.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < d.nodes.size(); ++i)
    if (d.nodes[i].id == d.nodes[i - 1].id)
      throw ConfigError("duplicate node id " + std::to_string(to_int(d.nodes[i].id)));
  return d;
}

inline const NodeRecord* find_node(std::span<const NodeRecord> nodes, NodeId id) {
  auto it = std::find_if(nodes.begin(), nodes.end(), [id](const NodeRecord& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

inline const NodeRecord& node_at(std::span<const NodeRecord> nodes, NodeId id) {
  const NodeRecord* n = find_node(nodes, id);
  if (n == nullptr) throw std::out_of_range("unknown node id " + std::to_string(to_int(id)));
  return *n;
}

// Nodes within range of `node` (inclusive boundary), excluding itself and any
// dead or blocked node. Result is sorted by id.
inline std::vector<NodeId> neighbors(NodeId node, std::span<const NodeRecord> nodes, double range) {
  const NodeRecord& self = node_at(nodes, node);
  std::vector<NodeId> out;
  for (const auto& other : nodes) {
    if (other.id == node || !other.active()) continue;
    if (distance(self.pos, other.pos) <= range) out.push_back(other.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace esrp
