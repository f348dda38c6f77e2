// Copyright 2026 The eamod Authors.
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
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eamod/error.hpp"

namespace eamod {

using NodeId = std::int64_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct GeoPoint {
  double lat = 0.0;  ///< degrees
  double lon = 0.0;  ///< degrees
};

/// Great-circle distance in metres on a spherical earth.
inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kEarthRadius = 6371008.8;
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * kDeg;
  const double dlon = (b.lon - a.lon) * kDeg;
  const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) *
                       std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(s)));
}

struct RoadNode {
  NodeId id = 0;
  GeoPoint pos;
};

/// Directed road link. `tail`/`head` are node indices, not ids.
struct RoadArc {
  std::size_t tail = 0;
  std::size_t head = 0;
  double distance_m = 0.0;
  double time_s = 0.0;
  double energy_wh = 0.0;
};

/// Forward adjacency in compressed-row form: out-arcs of node v are
/// `arc_ids[offsets[v] .. offsets[v+1])`.
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> arc_ids;

  std::span<const std::size_t> out(std::size_t v) const {
    return {arc_ids.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
};

template <typename ArcRange, typename TailFn>
Adjacency build_adjacency(std::size_t node_count, const ArcRange& arcs,
                          TailFn tail_of) {
  Adjacency adj;
  adj.offsets.assign(node_count + 1, 0);
  for (const auto& a : arcs) ++adj.offsets[tail_of(a) + 1];
  for (std::size_t v = 0; v < node_count; ++v)
    adj.offsets[v + 1] += adj.offsets[v];
  adj.arc_ids.resize(adj.offsets.back());
  std::vector<std::size_t> fill(adj.offsets.begin(), adj.offsets.end() - 1);
  std::size_t i = 0;
  for (const auto& a : arcs) adj.arc_ids[fill[tail_of(a)]++] = i++;
  return adj;
}

/// Single-source shortest paths with nonnegative weights. `head_of(arc_id)`
/// and `weight_of(arc_id)` describe the arcs referenced by `adj`. Ties
/// between equal-distance labels settle in node-index order.
template <typename HeadFn, typename WeightFn>
std::vector<double> dijkstra(const Adjacency& adj, std::size_t source,
                             HeadFn head_of, WeightFn weight_of) {
  const std::size_t n = adj.offsets.size() - 1;
  std::vector<double> dist(n, kInf);
  using Label = std::pair<double, std::size_t>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (std::size_t a : adj.out(v)) {
      const std::size_t w = head_of(a);
      const double nd = d + weight_of(a);
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.emplace(nd, w);
      }
    }
  }
  return dist;
}

/// Returns the index of a node that is not mutually reachable with node 0,
/// or `node_count` when the graph is strongly connected (or empty).
template <typename ArcRange, typename TailFn, typename HeadFn>
std::size_t find_unreachable(std::size_t node_count, const ArcRange& arcs,
                             TailFn tail_of, HeadFn head_of) {
  if (node_count == 0) return 0;
  std::vector<std::vector<std::size_t>> fwd(node_count), bwd(node_count);
  for (const auto& a : arcs) {
    fwd[tail_of(a)].push_back(head_of(a));
    bwd[head_of(a)].push_back(tail_of(a));
  }
  auto sweep = [&](const std::vector<std::vector<std::size_t>>& g) {
    std::vector<char> seen(node_count, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : g[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    return seen;
  };
  const auto f = sweep(fwd);
  const auto b = sweep(bwd);
  for (std::size_t v = 0; v < node_count; ++v)
    if (!f[v] || !b[v]) return v;
  return node_count;
}

/// Geographic road network with per-arc distance, travel time and energy.
class RoadGraph {
 public:
  RoadGraph() = default;

  /// Validates endpoints, positivity and strong connectivity.
  RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadArc> arcs)
      : nodes_(std::move(nodes)), arcs_(std::move(arcs)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!index_.emplace(nodes_[i].id, i).second)
        throw InvalidArgument("duplicate node " +
                              std::to_string(nodes_[i].id));
    }
    for (const RoadArc& a : arcs_) {
      if (a.tail >= nodes_.size() || a.head >= nodes_.size())
        throw InvalidArgument("arc endpoint out of range");
      if (a.tail == a.head)
        throw InvalidArgument("self-loop at node " +
                              std::to_string(nodes_[a.tail].id));
      if (!(a.distance_m > 0) || !(a.time_s > 0) || !(a.energy_wh > 0))
        throw InvalidArgument("nonpositive arc attribute on " +
                              std::to_string(nodes_[a.tail].id) + "->" +
                              std::to_string(nodes_[a.head].id));
    }
    const std::size_t bad = find_unreachable(
        nodes_.size(), arcs_, [](const RoadArc& a) { return a.tail; },
        [](const RoadArc& a) { return a.head; });
    if (bad < nodes_.size())
      throw ConnectivityError("graph not strongly connected: node " +
                                  std::to_string(nodes_[bad].id) +
                                  " not mutually reachable with node " +
                                  std::to_string(nodes_[0].id),
                              nodes_[bad].id);
  }

  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadArc>& arcs() const { return arcs_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }

  std::size_t index_of(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw InvalidArgument("unknown node " + std::to_string(id));
    return it->second;
  }
  bool contains(NodeId id) const { return index_.count(id) != 0; }

  Adjacency adjacency() const {
    return build_adjacency(nodes_.size(), arcs_,
                           [](const RoadArc& a) { return a.tail; });
  }

 private:
  std::vector<RoadNode> nodes_;
  std::vector<RoadArc> arcs_;
  std::unordered_map<NodeId, std::size_t> index_;
};

}  // namespace eamod
