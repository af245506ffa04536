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

// Sink-side centralized cluster formation and reformation.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "esrp/errors.hpp"
#include "esrp/topology.hpp"

namespace esrp {

struct Cluster {
  NodeId ch{};
  std::vector<NodeId> members;  // sorted, excludes the CH

  std::size_t size() const { return members.size() + 1; }

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct ClusterPlan {
  std::vector<Cluster> clusters;      // in CH selection order
  std::map<NodeId, NodeId> upstream;  // CH -> next CH toward the sink, or kSinkId
  std::vector<NodeId> flat;           // sorted
  std::vector<std::string> warnings;

  std::size_t cluster_count() const { return clusters.size(); }

  bool is_ch(NodeId id) const { return upstream.count(id) != 0; }

  const Cluster* cluster_of(NodeId id) const {
    for (const auto& c : clusters) {
      if (c.ch == id || std::binary_search(c.members.begin(), c.members.end(), id)) return &c;
    }
    return nullptr;
  }

  const Cluster* cluster_headed_by(NodeId ch) const {
    for (const auto& c : clusters)
      if (c.ch == ch) return &c;
    return nullptr;
  }

  NodeId upstream_of(NodeId ch) const { return upstream.at(ch); }

  // CHs whose upstream is `ch`, sorted by id.
  std::vector<NodeId> downstream_of(NodeId ch) const {
    std::vector<NodeId> out;
    for (const auto& [c, up] : upstream)
      if (up == ch) out.push_back(c);
    return out;
  }

  // Hops from `ch` to the sink following upstream links.
  std::size_t depth(NodeId ch) const {
    std::size_t hops = 0;
    NodeId cur = ch;
    while (cur != kSinkId) {
      cur = upstream.at(cur);
      if (++hops > upstream.size()) throw std::logic_error("upstream links contain a cycle");
    }
    return hops;
  }

  std::vector<NodeId> all_nodes() const {
    std::vector<NodeId> out(flat.begin(), flat.end());
    for (const auto& c : clusters) {
      out.push_back(c.ch);
      out.insert(out.end(), c.members.begin(), c.members.end());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<NodeId> cluster_heads() const {
    std::vector<NodeId> out;
    for (const auto& c : clusters) out.push_back(c.ch);
    return out;
  }

  friend bool operator==(const ClusterPlan& a, const ClusterPlan& b) {
    return a.clusters == b.clusters && a.upstream == b.upstream && a.flat == b.flat;
  }
};

struct FormationParams {
  std::size_t k = 5;
  double radio_range = 50.0;
  double sink_range = std::numeric_limits<double>::infinity();
};

// One CH a common node could join.
struct CommonOption {
  NodeId ch{};
  std::size_t cluster_size = 0;
  double distance = 0.0;
};

// Smallest cluster first, then the nearer CH, then the lower CH id.
inline NodeId assign_common_nodes(std::span<const CommonOption> options) {
  if (options.empty()) throw std::invalid_argument("common node has no candidate cluster heads");
  const auto best = std::min_element(options.begin(), options.end(), [](const CommonOption& a, const CommonOption& b) {
    if (a.cluster_size != b.cluster_size) return a.cluster_size < b.cluster_size;
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.ch < b.ch;
  });
  return best->ch;
}

// True when at least two thirds of the region's nodes sit below the threshold.
inline bool flat_region_check(std::span<const double> energies, double threshold) {
  if (energies.empty()) return false;
  const auto below = std::count_if(energies.begin(), energies.end(), [threshold](double e) { return e < threshold; });
  return static_cast<std::size_t>(below) * 3 >= energies.size() * 2;
}

namespace detail {

inline std::map<NodeId, NodeId> upstream_links(std::span<const NodeRecord> nodes, const std::vector<NodeId>& chs,
                                               Position sink) {
  std::map<NodeId, NodeId> up;
  for (NodeId c : chs) {
    const Position pc = node_at(nodes, c).pos;
    const double dc = distance(pc, sink);
    NodeId best = kSinkId;
    double best_d = std::numeric_limits<double>::infinity();
    for (NodeId o : chs) {
      if (o == c) continue;
      const Position po = node_at(nodes, o).pos;
      if (!(distance(po, sink) < dc)) continue;
      const double d = distance(pc, po);
      if (d < best_d || (d == best_d && o < best)) {
        best = o;
        best_d = d;
      }
    }
    up[c] = best;
  }
  return up;
}

}  // namespace detail

// Centralized formation over the `eligible` nodes. CH1 is the richest node in
// the sink's reach; each further CH is the uncovered node farthest from every
// chosen CH (energy, then lower id, break ties). Nodes in range of exactly one
// CH join it, common nodes go through assign_common_nodes in id order, and
// nodes outside every CH's range are routed flat.
inline ClusterPlan form_clusters(std::span<const NodeRecord> nodes, std::span<const NodeId> eligible, Position sink,
                                 const FormationParams& params) {
  if (params.k < 1) throw ConfigError("cluster count k must be at least 1");
  std::vector<const NodeRecord*> live;
  for (NodeId id : eligible) {
    const NodeRecord& n = node_at(nodes, id);
    if (n.active()) live.push_back(&n);
  }
  std::sort(live.begin(), live.end(), [](const NodeRecord* a, const NodeRecord* b) { return a->id < b->id; });

  ClusterPlan plan;
  const NodeRecord* first = nullptr;
  for (const NodeRecord* n : live) {
    if (distance(n->pos, sink) > params.sink_range) continue;
    if (first == nullptr || n->energy > first->energy) first = n;
  }
  if (first == nullptr) throw FormationError("no live node within the sink's radio range");

  std::vector<const NodeRecord*> heads{first};
  auto covered = [&](const NodeRecord* n) {
    for (const NodeRecord* h : heads)
      if (h == n || distance(h->pos, n->pos) <= params.radio_range) return true;
    return false;
  };
  while (heads.size() < params.k) {
    const NodeRecord* best = nullptr;
    double best_d = -1.0;
    for (const NodeRecord* n : live) {
      if (covered(n)) continue;
      double d = std::numeric_limits<double>::infinity();
      for (const NodeRecord* h : heads) d = std::min(d, distance(h->pos, n->pos));
      if (best == nullptr || d > best_d || (d == best_d && n->energy > best->energy)) {
        best = n;
        best_d = d;
      }
    }
    if (best == nullptr) break;
    heads.push_back(best);
  }
  if (heads.size() < params.k) {
    plan.warnings.push_back("requested " + std::to_string(params.k) + " clusters, formed " +
                            std::to_string(heads.size()));
  }

  for (const NodeRecord* h : heads) plan.clusters.push_back(Cluster{h->id, {}});

  std::vector<std::pair<const NodeRecord*, std::vector<std::size_t>>> common;
  for (const NodeRecord* n : live) {
    if (std::find(heads.begin(), heads.end(), n) != heads.end()) continue;
    std::vector<std::size_t> in_range;
    for (std::size_t i = 0; i < heads.size(); ++i)
      if (distance(heads[i]->pos, n->pos) <= params.radio_range) in_range.push_back(i);
    if (in_range.empty()) {
      plan.flat.push_back(n->id);
    } else if (in_range.size() == 1) {
      plan.clusters[in_range.front()].members.push_back(n->id);
    } else {
      common.emplace_back(n, std::move(in_range));
    }
  }
  for (const auto& [n, in_range] : common) {
    std::vector<CommonOption> options;
    for (std::size_t i : in_range)
      options.push_back({heads[i]->id, plan.clusters[i].size(), distance(heads[i]->pos, n->pos)});
    const NodeId chosen = assign_common_nodes(options);
    for (auto& c : plan.clusters)
      if (c.ch == chosen) c.members.push_back(n->id);
  }
  for (auto& c : plan.clusters) std::sort(c.members.begin(), c.members.end());
  std::sort(plan.flat.begin(), plan.flat.end());

  std::vector<NodeId> ch_ids;
  for (const NodeRecord* h : heads) ch_ids.push_back(h->id);
  plan.upstream = detail::upstream_links(nodes, ch_ids, sink);
  return plan;
}

inline ClusterPlan form_clusters(std::span<const NodeRecord> nodes, Position sink, const FormationParams& params) {
  std::vector<NodeId> all;
  for (const auto& n : nodes) all.push_back(n.id);
  return form_clusters(nodes, all, sink, params);
}

struct ReformParams {
  FormationParams formation;
  double flat_threshold = 0.5;  // joules
};

// Excluded from every plan: dead, blocked, or carrying a failed security status.
inline bool excluded_from_plan(const NodeRecord& n) { return !n.active() || n.status.any_fail(); }

// Reformation after an iteration. A previous cluster is retained when its CH is
// still usable and fewer than two thirds of its remaining nodes are below the
// flat threshold; the nodes of every other cluster switch to flat routing, as
// do nodes that were already flat. Retained regions are re-clustered from
// scratch with at most as many clusters as were retained.
inline ClusterPlan reform_clusters(const ClusterPlan& prev, std::span<const NodeRecord> nodes, Position sink,
                                   const ReformParams& params) {
  ClusterPlan out;
  std::vector<NodeId> eligible;
  std::vector<NodeId> flat;
  std::size_t retained = 0;

  for (const auto& c : prev.clusters) {
    std::vector<NodeId> region;
    std::vector<double> energies;
    auto consider = [&](NodeId id) {
      const NodeRecord& n = node_at(nodes, id);
      if (excluded_from_plan(n)) return;
      region.push_back(id);
      energies.push_back(n.energy);
    };
    consider(c.ch);
    for (NodeId m : c.members) consider(m);
    const bool ch_ok = !excluded_from_plan(node_at(nodes, c.ch));
    if (ch_ok && !flat_region_check(energies, params.flat_threshold)) {
      ++retained;
      eligible.insert(eligible.end(), region.begin(), region.end());
    } else {
      flat.insert(flat.end(), region.begin(), region.end());
    }
  }
  for (NodeId id : prev.flat)
    if (!excluded_from_plan(node_at(nodes, id))) flat.push_back(id);

  const std::size_t k = std::min(params.formation.k, retained);
  if (k > 0 && !eligible.empty()) {
    FormationParams fp = params.formation;
    fp.k = k;
    try {
      out = form_clusters(nodes, eligible, sink, fp);
    } catch (const FormationError& e) {
      out = ClusterPlan{};
      out.warnings.push_back(std::string("reformation fell back to flat routing: ") + e.what());
      flat.insert(flat.end(), eligible.begin(), eligible.end());
    }
  } else {
    flat.insert(flat.end(), eligible.begin(), eligible.end());
  }
  out.flat.insert(out.flat.end(), flat.begin(), flat.end());
  std::sort(out.flat.begin(), out.flat.end());
  out.flat.erase(std::unique(out.flat.begin(), out.flat.end()), out.flat.end());
  return out;
}

}  // namespace esrp
