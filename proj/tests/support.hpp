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

// Fixtures shared by the test binaries.

#include <cmath>
#include <vector>

#include "esrp/esrp.hpp"

namespace esrp::testing {

// Five groups on a 100 m x 100 m field with the sink at the center. Energies in
// mJ; each group's richest node sits at the outer point of the group.
struct ReplayRow {
  int id;
  double x;
  double y;
  double energy_mj;
};

inline const std::vector<ReplayRow>& replay_rows() {
  static const std::vector<ReplayRow> rows = {
      {0, 0, 0, 7.14},      {1, 3, 1, 1.76},      {2, 1, 3, 0.07},      {3, 3, 3, 0.07},
      {4, 48, 50, 1.54},    {5, 52, 50, 2.04},    {6, 50, 48, 0.07},    {7, 50, 50, 7.14},
      {8, 50, 52, 0.11},    {9, 97, 1, 2.04},     {10, 100, 0, 6.37},   {11, 99, 3, 1.19},
      {12, 97, 3, 0.22},    {13, 98, 2, 2.42},    {14, 0, 100, 8.99},   {15, 3, 99, 0.04},
      {16, 1, 97, 0.75},    {17, 3, 97, 0.92},    {18, 2, 98, 1.03},    {19, 97, 99, 6.75},
      {20, 99, 97, 0.02},   {21, 100, 100, 8.92}, {22, 97, 97, 0.15},
  };
  return rows;
}

inline FieldSpec replay_field() {
  FieldSpec f;
  f.width = 100;
  f.height = 100;
  f.radio_range = 50;
  f.sink_range = 50;
  f.sink_position = Position{50, 50};
  return f;
}

inline std::vector<NodeSpec> replay_table() {
  std::vector<NodeSpec> out;
  for (const auto& r : replay_rows()) out.push_back({r.id, {r.x, r.y}, r.energy_mj / 1000.0});
  return out;
}

inline std::vector<NodeRecord> replay_nodes() {
  const auto table = replay_table();
  return deploy(replay_field(), std::span<const NodeSpec>(table)).nodes;
}

inline NodeRecord& record(std::vector<NodeRecord>& nodes, int id) {
  for (auto& n : nodes)
    if (to_int(n.id) == id) return n;
  throw std::out_of_range("no such node");
}

inline std::vector<NodeId> ids(std::initializer_list<int> list) {
  std::vector<NodeId> out;
  for (int i : list) out.push_back(node_id(i));
  return out;
}

// m well separated groups of n nodes each, every node 2 J, sink reaching the
// whole field, no attackers. Groups sit 200 m apart along one row.
inline RunConfig grouped_config(std::size_t m, std::size_t n) {
  RunConfig c;
  c.field.width = 200.0 * static_cast<double>(m);
  c.field.height = 200.0;
  c.k = m;
  c.attack.n_attackers = 0;
  int id = 0;
  for (std::size_t g = 0; g < m; ++g) {
    const double cx = 100.0 + 200.0 * static_cast<double>(g);
    for (std::size_t j = 0; j < n; ++j) {
      // Spiral of radius <= 10 m around the group center.
      const double r = 10.0 * static_cast<double>(j) / static_cast<double>(n);
      const double a = 2.399963 * static_cast<double>(j);
      c.node_table.push_back({id++, {cx + r * std::cos(a), 100.0 + r * std::sin(a)}, 2.0});
    }
  }
  return c;
}

// grouped_config with the sink on the left edge, so the CHs form one chain
// from the far group toward the sink.
inline RunConfig chain_config(std::size_t m, std::size_t n) {
  RunConfig c = grouped_config(m, n);
  c.field.sink_position = Position{0.0, 100.0};
  return c;
}

// Default scenario: 100 random nodes, 2 J, k = 5, one hour, 25 intruders.
inline RunConfig default_config(std::uint64_t seed) {
  RunConfig c;
  c.seed = seed;
  c.attack.n_attackers = 25;
  return c;
}

// Random valid packets for the codec fuzz round-trips.
inline TriState random_tri(Rng& rng) { return static_cast<TriState>(rng.below(3)); }

inline SignalPacket random_signal(Rng& rng) {
  SignalPacket p;
  p.ch_id = rng.byte();
  p.public_key = rng.byte();
  p.private_key = rng.byte();
  for (auto& c : p.cm_ids) c = rng.byte();
  p.neighbor_ch_id = rng.byte();
  return p;
}

inline ChFrame random_frame(Rng& rng) {
  ChFrame f;
  f.hier_flag = true;
  f.is_ch = rng.bernoulli(0.5);
  f.node_id = rng.byte();
  f.energy = rng.byte();
  f.next_ch_id = rng.byte();
  f.cm_id = rng.byte();
  f.cm_energy = rng.byte();
  f.cm_payload.resize(rng.below(kChFrameMaxPayload + 1));
  for (auto& b : f.cm_payload) b = rng.byte();
  f.secret_key = rng.byte();
  f.public_key = rng.byte();
  f.role = role_from_bits(static_cast<unsigned>(rng.below(4)));
  f.cm_energy2 = rng.byte();
  f.trap_enable = rng.bernoulli(0.5);
  f.mine_enable = rng.bernoulli(0.5);
  f.promisc_enable = rng.bernoulli(0.5);
  f.status = SecurityStatus{random_tri(rng), random_tri(rng), random_tri(rng)};
  return f;
}

inline CmReport random_report(Rng& rng) {
  CmReport r;
  r.node_id = rng.byte();
  r.energy = rng.byte();
  r.ch_id = rng.byte();
  r.payload.resize(rng.below(kCmReportMaxPayload + 1));
  for (auto& b : r.payload) b = rng.byte();
  return r;
}

}  // namespace esrp::testing
