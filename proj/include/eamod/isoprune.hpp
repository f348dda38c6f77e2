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

// Iso-energy network pruning.
//
// A road graph is repeatedly shrunk by merging adjacent node pairs until its
// homogenized form is small enough, choosing at every step the merge whose
// homogenized result best preserves shortest-path energies between all
// original nodes. The survivor graph is then homogenized: every arc becomes a
// chain of arcs that each cost exactly one energy quantum.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "eamod/error.hpp"
#include "eamod/graph.hpp"
#include "eamod/ingest.hpp"
#include "json.hpp"

namespace eamod {

struct PruneConfig {
  double target_wh = 100.0;    ///< energy quantum w_c
  double ratio = 0.9;          ///< fraction of nodes to remove
  std::size_t batch = 32;      ///< candidates evaluated per iteration
  std::size_t sample_pairs = 256;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(target_wh > 0)) throw InvalidArgument("target weight must be > 0");
    if (!(ratio > 0 && ratio < 1))
      throw InvalidArgument("compression ratio must be in (0, 1)");
    if (batch == 0) throw InvalidArgument("candidate batch must be positive");
  }
};

/// Number of quanta an arc of `energy` is rounded to: nearest multiple,
/// exact halves round down, never fewer than one.
inline std::int64_t quantum_multiplicity(double energy, double quantum) {
  const double k = std::ceil(energy / quantum - 0.5);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(k));
}

inline double quantum_deviation(double energy, double quantum) {
  return std::abs(energy -
                  static_cast<double>(quantum_multiplicity(energy, quantum)) *
                      quantum);
}

struct ArcAttr {
  double energy_wh = 0.0;
  double time_s = 0.0;
  double distance_m = 0.0;

  ArcAttr then(const ArcAttr& next) const {
    return {energy_wh + next.energy_wh, time_s + next.time_s,
            distance_m + next.distance_m};
  }
};

/// Graph under contraction. Node indices are those of the source road graph;
/// a merged node keeps the index of the survivor. Parallel arcs are collapsed
/// to the one with minimum energy.
class WorkingGraph {
 public:
  using Neighbors = std::vector<std::pair<std::size_t, ArcAttr>>;  // sorted

  WorkingGraph() = default;

  explicit WorkingGraph(const RoadGraph& g)
      : alive_(g.node_count(), 1), merged_into_(g.node_count()),
        out_(g.node_count()), in_(g.node_count()), alive_count_(g.node_count()) {
    for (std::size_t v = 0; v < merged_into_.size(); ++v) merged_into_[v] = v;
    for (const RoadArc& a : g.arcs())
      add_arc(a.tail, a.head, {a.energy_wh, a.time_s, a.distance_m});
  }

  std::size_t capacity() const { return alive_.size(); }
  std::size_t node_count() const { return alive_count_; }
  bool alive(std::size_t v) const { return alive_[v] != 0; }
  const Neighbors& out(std::size_t v) const { return out_[v]; }
  const Neighbors& in(std::size_t v) const { return in_[v]; }

  std::size_t arc_count() const {
    std::size_t n = 0;
    for (const auto& o : out_) n += o.size();
    return n;
  }

  std::optional<ArcAttr> arc(std::size_t u, std::size_t v) const {
    auto it = find(out_[u], v);
    if (it == out_[u].end() || it->first != v) return std::nullopt;
    return it->second;
  }

  std::size_t degree(std::size_t v) const {
    return out_[v].size() + in_[v].size();
  }

  /// Adds u->v, keeping the cheaper arc if one already exists.
  void add_arc(std::size_t u, std::size_t v, const ArcAttr& attr) {
    auto it = find(out_[u], v);
    if (it != out_[u].end() && it->first == v) {
      if (attr.energy_wh < it->second.energy_wh) {
        it->second = attr;
        find(in_[v], u)->second = attr;
      }
      return;
    }
    out_[u].insert(it, {v, attr});
    auto jt = find(in_[v], u);
    in_[v].insert(jt, {u, attr});
  }

  /// Live node that original node `v` has been merged into (itself if alive).
  std::size_t representative(std::size_t v) const {
    while (!alive_[v]) v = merged_into_[v];
    return v;
  }

  /// Removes `v`, recording `into` as the node that absorbs it.
  void remove_node(std::size_t v, std::size_t into) {
    merged_into_[v] = into;
    remove_node(v);
  }

  void remove_node(std::size_t v) {
    for (const auto& [w, attr] : out_[v]) erase(in_[w], v);
    for (const auto& [w, attr] : in_[v]) erase(out_[w], v);
    out_[v].clear();
    in_[v].clear();
    alive_[v] = 0;
    --alive_count_;
  }

  /// Node count after homogenization with `quantum`: live nodes plus the
  /// interior nodes of every split arc.
  std::size_t homogenized_size(double quantum) const {
    std::size_t n = alive_count_;
    for (const auto& list : out_)
      for (const auto& [w, a] : list)
        n += static_cast<std::size_t>(quantum_multiplicity(a.energy_wh, quantum) - 1);
    return n;
  }

  std::vector<std::size_t> alive_nodes() const {
    std::vector<std::size_t> out;
    out.reserve(alive_count_);
    for (std::size_t v = 0; v < alive_.size(); ++v)
      if (alive_[v]) out.push_back(v);
    return out;
  }

  bool strongly_connected() const {
    const auto nodes = alive_nodes();
    if (nodes.size() <= 1) return true;
    auto sweep = [&](const std::vector<Neighbors>& adj) {
      std::vector<char> seen(alive_.size(), 0);
      std::vector<std::size_t> stack{nodes.front()};
      seen[nodes.front()] = 1;
      std::size_t count = 1;
      while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (const auto& [w, attr] : adj[v])
          if (!seen[w]) {
            seen[w] = 1;
            ++count;
            stack.push_back(w);
          }
      }
      return count;
    };
    return sweep(out_) == nodes.size() && sweep(in_) == nodes.size();
  }

 private:
  static Neighbors::iterator find(Neighbors& list, std::size_t v) {
    return std::lower_bound(
        list.begin(), list.end(), v,
        [](const auto& entry, std::size_t key) { return entry.first < key; });
  }
  static Neighbors::const_iterator find(const Neighbors& list, std::size_t v) {
    return std::lower_bound(
        list.begin(), list.end(), v,
        [](const auto& entry, std::size_t key) { return entry.first < key; });
  }
  static void erase(Neighbors& list, std::size_t v) {
    auto it = find(list, v);
    if (it != list.end() && it->first == v) list.erase(it);
  }

  std::vector<char> alive_;
  std::vector<std::size_t> merged_into_;
  std::vector<Neighbors> out_;
  std::vector<Neighbors> in_;
  std::size_t alive_count_ = 0;
};

/// A pair of adjacent nodes proposed for merging. `removed` disappears and
/// its arcs are re-attached to `survivor`.
struct MergeCandidate {
  std::size_t survivor = 0;
  std::size_t removed = 0;
  double score = 0.0;  ///< summed quantum deviation of the pair's arcs (Wh)
};

/// Lists up to `batch` adjacent pairs ordered by increasing quantum deviation
/// of all arcs touching either node, ties by (lower index, higher index).
/// Within a pair the lower-degree node is the one removed (ties: the higher
/// index is removed).
inline std::vector<MergeCandidate> compose_candidates(const WorkingGraph& g,
                                                      std::size_t batch,
                                                      double quantum) {
  if (g.node_count() < 2) return {};
  std::vector<double> node_dev(g.capacity(), 0.0);
  for (std::size_t v : g.alive_nodes()) {
    for (const auto& [w, a] : g.out(v))
      node_dev[v] += quantum_deviation(a.energy_wh, quantum);
    for (const auto& [w, a] : g.in(v))
      node_dev[v] += quantum_deviation(a.energy_wh, quantum);
  }
  struct Keyed {
    double score;
    std::size_t lo, hi;
  };
  std::vector<Keyed> pairs;
  for (std::size_t u : g.alive_nodes()) {
    auto consider = [&](std::size_t v) {
      if (v <= u) return;
      // arcs between u and v were summed on both sides
      double internal = 0.0;
      if (auto a = g.arc(u, v)) internal += quantum_deviation(a->energy_wh, quantum);
      if (auto a = g.arc(v, u)) internal += quantum_deviation(a->energy_wh, quantum);
      pairs.push_back({node_dev[u] + node_dev[v] - internal, u, v});
    };
    for (const auto& [v, a] : g.out(u)) consider(v);
    for (const auto& [v, a] : g.in(u))
      if (!g.arc(u, v)) consider(v);
  }
  const std::size_t keep = std::min(batch, pairs.size());
  auto less = [](const Keyed& a, const Keyed& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.hi < b.hi;
  };
  std::partial_sort(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(keep),
                    pairs.end(), less);
  std::vector<MergeCandidate> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    const auto& p = pairs[i];
    const bool remove_hi = g.degree(p.lo) >= g.degree(p.hi);
    out.push_back({remove_hi ? p.lo : p.hi, remove_hi ? p.hi : p.lo, p.score});
  }
  return out;
}

/// Merges `c.removed` into `c.survivor`. Each arc x->removed is re-attached
/// as x->survivor and each removed->y as survivor->y. The re-attached arc
/// either keeps its own attributes or, when the internal arc in that
/// direction exists, extends through it (x->removed->survivor,
/// survivor->removed->y); of the two, the energy nearer a whole number of
/// quanta wins, ties going to the extended arc. Internal arcs vanish and
/// parallel arcs keep the cheaper one. Merges that leave the graph not
/// strongly connected are rejected.
inline WorkingGraph shrink_merge(const WorkingGraph& g, const MergeCandidate& c,
                                 double quantum) {
  const std::size_t s = c.survivor, r = c.removed;
  if (s == r || s >= g.capacity() || r >= g.capacity() || !g.alive(s) || !g.alive(r))
    throw InvalidArgument("merge candidate must name two live nodes");
  const auto rs = g.arc(r, s);
  const auto sr = g.arc(s, r);
  if (!rs && !sr) throw InvalidArgument("merge candidate nodes are not adjacent");

  auto pick = [quantum](const ArcAttr& kept, const std::optional<ArcAttr>& extended) {
    if (!extended) return kept;
    return quantum_deviation(extended->energy_wh, quantum) <=
                   quantum_deviation(kept.energy_wh, quantum)
               ? *extended
               : kept;
  };
  WorkingGraph out = g;
  std::vector<std::pair<std::size_t, ArcAttr>> into, from;
  for (const auto& [x, a] : g.in(r))
    if (x != s)
      into.emplace_back(x, pick(a, rs ? std::optional(a.then(*rs)) : std::nullopt));
  for (const auto& [y, a] : g.out(r))
    if (y != s)
      from.emplace_back(y, pick(a, sr ? std::optional(sr->then(a)) : std::nullopt));
  out.remove_node(r, s);
  for (const auto& [x, a] : into) out.add_arc(x, s, a);
  for (const auto& [y, a] : from) out.add_arc(s, y, a);
  if (!out.strongly_connected())
    throw MergeRejected("merging node index " + std::to_string(r) + " into " +
                        std::to_string(s) + " disconnects the graph");
  return out;
}

/// Pruned graph whose arcs each cost exactly `quantum_wh`.
struct SyntheticGraph {
  struct Node {
    GeoPoint pos;
    NodeId original = -1;  ///< original road-node id, -1 for split nodes
  };
  struct Arc {
    std::size_t tail = 0;
    std::size_t head = 0;
    double time_s = 0.0;
    double distance_m = 0.0;
  };

  double quantum_wh = 0.0;
  std::vector<Node> nodes;  ///< synthetic id == index
  std::vector<Arc> arcs;
  /// For every original node index, the synthetic node that stands for it
  /// (its own node if it survived, else the node it was merged into). Empty
  /// when unknown, e.g. after reading a graph file.
  std::vector<std::size_t> representative;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t arc_count() const { return arcs.size(); }
  bool is_split(std::size_t v) const { return nodes[v].original < 0; }

  /// Synthetic index of the surviving original node `id`.
  std::optional<std::size_t> find_original(NodeId id) const {
    for (std::size_t v = 0; v < nodes.size(); ++v)
      if (nodes[v].original == id) return v;
    return std::nullopt;
  }

  Adjacency adjacency() const {
    return build_adjacency(nodes.size(), arcs, [](const Arc& a) { return a.tail; });
  }
};

/// Replaces every arc by a chain of arcs of exactly one quantum each.
/// Surviving nodes get synthetic ids 0..S-1 in index order; chain interior
/// nodes follow, in arc order.
inline SyntheticGraph homogenize(const WorkingGraph& g, const RoadGraph& source,
                                 double quantum) {
  SyntheticGraph out;
  out.quantum_wh = quantum;
  std::vector<std::size_t> synth_of(g.capacity(), SIZE_MAX);
  for (std::size_t v : g.alive_nodes()) {
    synth_of[v] = out.nodes.size();
    out.nodes.push_back({source.nodes()[v].pos, source.nodes()[v].id});
  }
  out.representative.resize(g.capacity());
  for (std::size_t v = 0; v < g.capacity(); ++v)
    out.representative[v] = synth_of[g.representative(v)];
  for (std::size_t u : g.alive_nodes()) {
    for (const auto& [v, a] : g.out(u)) {
      const std::int64_t k = quantum_multiplicity(a.energy_wh, quantum);
      const double dt = a.time_s / static_cast<double>(k);
      const double dd = a.distance_m / static_cast<double>(k);
      const GeoPoint p = out.nodes[synth_of[u]].pos, q = out.nodes[synth_of[v]].pos;
      std::size_t prev = synth_of[u];
      for (std::int64_t i = 1; i < k; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(k);
        const std::size_t mid = out.nodes.size();
        out.nodes.push_back(
            {{p.lat + f * (q.lat - p.lat), p.lon + f * (q.lon - p.lon)}, -1});
        out.arcs.push_back({prev, mid, dt, dd});
        prev = mid;
      }
      out.arcs.push_back({prev, synth_of[v], dt, dd});
    }
  }
  return out;
}

/// Original node index -> pruned node, listing the nodes over which an error
/// is measured. Entries are sorted by original index.
using NodeMap = std::vector<std::pair<std::size_t, std::size_t>>;

/// Surviving nodes only, each standing for itself.
inline NodeMap survivor_map(const WorkingGraph& g) {
  NodeMap m;
  for (std::size_t v : g.alive_nodes()) m.emplace_back(v, v);
  return m;
}

/// Every original node, mapped to the live node that absorbed it.
inline NodeMap representative_map(const WorkingGraph& g) {
  NodeMap m;
  for (std::size_t v = 0; v < g.capacity(); ++v) m.emplace_back(v, g.representative(v));
  return m;
}

inline NodeMap survivor_map(const SyntheticGraph& g, const RoadGraph& original) {
  NodeMap m;
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (!g.is_split(v)) m.emplace_back(original.index_of(g.nodes[v].original), v);
  std::sort(m.begin(), m.end());
  return m;
}

/// Falls back to `survivor_map` when the synthetic graph carries no
/// representatives.
inline NodeMap representative_map(const SyntheticGraph& g, const RoadGraph& original) {
  if (g.representative.empty()) return survivor_map(g, original);
  NodeMap m;
  for (std::size_t v = 0; v < g.representative.size(); ++v)
    m.emplace_back(v, g.representative[v]);
  return m;
}

/// Result of comparing shortest-path energies between an original graph and
/// a pruned one.
struct ErrorEval {
  double mean_abs_wh = 0.0;
  std::size_t pairs = 0;
  bool feasible = true;  ///< false if some pair is unreachable in the pruned graph
};

namespace detail {

// Dijkstra over a working graph; if `quantum` > 0 arc energies are rounded
// to whole quanta first.
inline std::vector<double> working_distances(const WorkingGraph& g,
                                             std::size_t source, double quantum) {
  std::vector<double> dist(g.capacity(), kInf);
  using Label = std::pair<double, std::size_t>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const auto& [w, a] : g.out(v)) {
      const double e =
          quantum > 0
              ? static_cast<double>(quantum_multiplicity(a.energy_wh, quantum)) * quantum
              : a.energy_wh;
      if (d + e < dist[w]) {
        dist[w] = d + e;
        heap.emplace(dist[w], w);
      }
    }
  }
  return dist;
}

inline std::vector<double> road_distances(const RoadGraph& g, const Adjacency& adj,
                                          std::size_t source) {
  return dijkstra(
      adj, source, [&](std::size_t a) { return g.arcs()[a].head; },
      [&](std::size_t a) { return g.arcs()[a].energy_wh; });
}

// Synthetic distances as exact hop counts times the quantum.
inline std::vector<double> synthetic_distances(const SyntheticGraph& g,
                                               const Adjacency& adj, std::size_t source) {
  auto hops = dijkstra(
      adj, source, [&](std::size_t a) { return g.arcs[a].head; },
      [](std::size_t) { return 1.0; });
  for (double& h : hops)
    if (h != kInf) h *= g.quantum_wh;
  return hops;
}

inline void accumulate(ErrorEval& acc, double original, double pruned) {
  if (pruned == kInf) acc.feasible = false;
  acc.mean_abs_wh += std::abs(original - pruned);
  ++acc.pairs;
}

inline ErrorEval finish(ErrorEval acc) {
  if (!acc.feasible) acc.mean_abs_wh = kInf;
  else if (acc.pairs > 0) acc.mean_abs_wh /= static_cast<double>(acc.pairs);
  return acc;
}

// Shared driver: `pruned_from(node)` returns distances from a pruned node.
template <typename PrunedDistances>
ErrorEval mean_error(const RoadGraph& original, const NodeMap& map,
                     PrunedDistances pruned_from) {
  const Adjacency adj = original.adjacency();
  ErrorEval acc;
  std::unordered_map<std::size_t, std::vector<double>> pruned_cache;
  for (const auto& [i, pi] : map) {
    const auto d0 = road_distances(original, adj, i);
    auto it = pruned_cache.find(pi);
    if (it == pruned_cache.end()) it = pruned_cache.emplace(pi, pruned_from(pi)).first;
    for (const auto& [j, pj] : map)
      if (j != i) accumulate(acc, d0[j], it->second[pj]);
  }
  return finish(acc);
}

}  // namespace detail

/// Mean absolute shortest-path energy error over ordered pairs of distinct
/// nodes in `map`, visited in map order. With `quantum` > 0 the working graph
/// is evaluated as if homogenized. Any unreachable pair makes the result
/// infeasible with an infinite mean.
inline ErrorEval evaluate_error(const RoadGraph& original, const WorkingGraph& pruned,
                                const NodeMap& map, double quantum = 0.0) {
  return detail::mean_error(original, map, [&](std::size_t v) {
    return detail::working_distances(pruned, v, quantum);
  });
}

inline ErrorEval evaluate_error(const RoadGraph& original, const SyntheticGraph& pruned,
                                const NodeMap& map) {
  const Adjacency adj = pruned.adjacency();
  return detail::mean_error(original, map, [&](std::size_t v) {
    return detail::synthetic_distances(pruned, adj, v);
  });
}

/// Per-iteration record of the pruning loop.
struct PruneIteration {
  std::size_t survivor = 0;
  std::size_t removed = 0;
  std::size_t surviving_nodes = 0;  ///< after the committed merge
  std::size_t homogenized_nodes = 0;
  double best_error_wh = 0.0;
  std::vector<MergeCandidate> candidates;
  std::vector<double> candidate_errors;  ///< +inf for rejected merges
};

struct PruneReport {
  std::size_t original_nodes = 0;
  std::size_t original_arcs = 0;
  std::size_t target_nodes = 0;
  std::size_t surviving_nodes = 0;
  std::size_t synthetic_nodes = 0;
  std::size_t synthetic_arcs = 0;
  double target_wh = 0.0;
  double ratio = 0.0;
  double mean_abs_error_wh = 0.0;  ///< exact, over all original node pairs
  bool feasible = true;
  bool stopped_early = false;  ///< every candidate of some batch was rejected
  std::vector<std::pair<std::size_t, std::size_t>> sample;  ///< pairs used in the loop
  std::vector<PruneIteration> trace;
};

/// Seeded sample of ordered pairs of distinct original nodes, sorted.
inline std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(
    std::size_t node_count, std::size_t count, std::uint64_t seed) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (node_count < 2) return out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, node_count - 1);
  out.reserve(count);
  while (out.size() < count) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a != b) out.emplace_back(a, b);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Sampled counterpart of `evaluate_error` used inside the loop: every pair
/// endpoint is replaced by its representative in `g`. `original_from` holds
/// original distances for each sampled source.
inline double sampled_error(
    const WorkingGraph& g, double quantum,
    const std::vector<std::pair<std::size_t, std::size_t>>& sample,
    const std::unordered_map<std::size_t, std::vector<double>>& original_from) {
  ErrorEval acc;
  std::unordered_map<std::size_t, std::vector<double>> pruned_from;
  for (const auto& [i, j] : sample) {
    const std::size_t ri = g.representative(i);
    auto it = pruned_from.find(ri);
    if (it == pruned_from.end())
      it = pruned_from.emplace(ri, detail::working_distances(g, ri, quantum)).first;
    detail::accumulate(acc, original_from.at(i)[j], it->second[g.representative(j)]);
  }
  return detail::finish(acc).mean_abs_wh;
}

/// Full pruning loop followed by the final homogenization.
///
/// floor(ratio * n) nodes' worth of the network is removed: the loop merges
/// until the homogenized network (survivors plus the interior nodes of split
/// arcs) has at most n - floor(ratio * n) nodes. Each iteration evaluates a
/// batch of candidates on a fixed seeded sample of original node pairs and
/// commits the one with the lowest error (first in batch order on ties).
inline std::pair<SyntheticGraph, PruneReport> prune(const RoadGraph& graph,
                                                    const PruneConfig& config) {
  config.validate();
  const std::size_t n0 = graph.node_count();
  const auto removable =
      static_cast<std::size_t>(std::floor(config.ratio * static_cast<double>(n0)));

  PruneReport report;
  report.original_nodes = n0;
  report.original_arcs = graph.arc_count();
  report.target_nodes = n0 - removable;
  report.target_wh = config.target_wh;
  report.ratio = config.ratio;
  report.sample = sample_pairs(n0, config.sample_pairs, config.seed);

  const Adjacency adj = graph.adjacency();
  std::unordered_map<std::size_t, std::vector<double>> original_from;
  for (const auto& [i, j] : report.sample)
    if (!original_from.count(i)) original_from.emplace(i, detail::road_distances(graph, adj, i));

  WorkingGraph g(graph);
  std::size_t size = g.homogenized_size(config.target_wh);
  while (size > report.target_nodes && g.node_count() > 1) {
    PruneIteration step;
    step.candidates = compose_candidates(g, config.batch, config.target_wh);
    double best = kInf;
    std::optional<WorkingGraph> best_graph;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < step.candidates.size(); ++i) {
      double err = kInf;
      std::optional<WorkingGraph> trial;
      try {
        trial = shrink_merge(g, step.candidates[i], config.target_wh);
        err = sampled_error(*trial, config.target_wh, report.sample, original_from);
      } catch (const MergeRejected&) {
      }
      step.candidate_errors.push_back(err);
      if (trial && (!best_graph || err < best)) {
        best = err;
        best_graph = std::move(trial);
        best_idx = i;
      }
    }
    if (!best_graph) {
      report.stopped_early = true;
      break;
    }
    g = std::move(*best_graph);
    size = g.homogenized_size(config.target_wh);
    step.survivor = step.candidates[best_idx].survivor;
    step.removed = step.candidates[best_idx].removed;
    step.surviving_nodes = g.node_count();
    step.homogenized_nodes = size;
    step.best_error_wh = best;
    report.trace.push_back(std::move(step));
  }

  SyntheticGraph synth = homogenize(g, graph, config.target_wh);
  const ErrorEval err = evaluate_error(graph, synth, representative_map(synth, graph));
  report.surviving_nodes = g.node_count();
  report.synthetic_nodes = synth.node_count();
  report.synthetic_arcs = synth.arc_count();
  report.mean_abs_error_wh = err.mean_abs_wh;
  report.feasible = err.feasible;
  return {std::move(synth), std::move(report)};
}

inline void write_synthetic_csv(std::ostream& out, const SyntheticGraph& g) {
  out << "#nodes\nid,lat,lon\n";
  for (std::size_t v = 0; v < g.node_count(); ++v)
    out << v << ',' << detail::format_double(g.nodes[v].pos.lat) << ','
        << detail::format_double(g.nodes[v].pos.lon) << '\n';
  out << "#arcs\ntail,head,dist_m,time_s,energy_wh\n";
  for (const auto& a : g.arcs)
    out << a.tail << ',' << a.head << ',' << detail::format_double(a.distance_m)
        << ',' << detail::format_double(a.time_s) << ','
        << detail::format_double(g.quantum_wh) << '\n';
  out << "#nodemap\nsynthetic_id,original_id_or_-1\n";
  for (std::size_t v = 0; v < g.node_count(); ++v)
    out << v << ',' << g.nodes[v].original << '\n';
}

/// Reads a synthetic graph written by `write_synthetic_csv`. All arcs must
/// carry the same energy, which becomes the quantum. Without a node map every
/// node is taken to be an original node with its own id.
inline SyntheticGraph parse_synthetic_csv(std::istream& in) {
  const GraphCsv csv = parse_graph_csv(in);
  SyntheticGraph g;
  std::map<NodeId, std::size_t> index;
  for (const RoadNode& n : csv.nodes) {
    if (n.id != static_cast<NodeId>(g.nodes.size()))
      throw Error("synthetic node ids must be 0..n-1 in order");
    index[n.id] = g.nodes.size();
    g.nodes.push_back({n.pos, -1});
  }
  for (const auto& [sid, oid] : csv.nodemap) {
    auto it = index.find(sid);
    if (it == index.end())
      throw Error("nodemap references unknown node " + std::to_string(sid));
    g.nodes[it->second].original = oid;
  }
  if (csv.nodemap.empty())
    for (std::size_t v = 0; v < g.nodes.size(); ++v) g.nodes[v].original = csv.nodes[v].id;
  for (const auto& a : csv.arcs) {
    if (g.arcs.empty()) g.quantum_wh = a.energy_wh;
    else if (a.energy_wh != g.quantum_wh)
      throw Error("synthetic graph arcs must share one energy quantum");
    g.arcs.push_back({index.at(a.tail), index.at(a.head), a.time_s, a.distance_m});
  }
  return g;
}

inline nlohmann::json prune_report_to_json(const PruneReport& r) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& it : r.trace) {
    nlohmann::json errs = nlohmann::json::array();
    for (double e : it.candidate_errors) errs.push_back(num(e));
    trace.push_back({{"survivor", it.survivor},
                     {"removed", it.removed},
                     {"surviving_nodes", it.surviving_nodes},
                     {"homogenized_nodes", it.homogenized_nodes},
                     {"best_error_wh", num(it.best_error_wh)},
                     {"candidate_errors_wh", errs}});
  }
  return {{"original_nodes", r.original_nodes},
          {"original_arcs", r.original_arcs},
          {"target_nodes", r.target_nodes},
          {"surviving_nodes", r.surviving_nodes},
          {"synthetic_nodes", r.synthetic_nodes},
          {"synthetic_arcs", r.synthetic_arcs},
          {"target_wh", r.target_wh},
          {"ratio", r.ratio},
          {"mean_abs_error_wh", num(r.mean_abs_error_wh)},
          {"feasible", r.feasible},
          {"stopped_early", r.stopped_early},
          {"trace", trace}};
}

}  // namespace eamod
