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

// Instance generators and brute-force oracles shared by the tests. Nothing
// here calls the library's own shortest-path or probability code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "eamod/graph.hpp"
#include "eamod/ingest.hpp"
#include "eamod/isoprune.hpp"
#include "eamod/model.hpp"
#include "eamod/multilayer.hpp"

namespace eamod::testing {

/// Jittered grid with two-way links and random diagonals. Energies are
/// integers near `wh_per_m` times the length.
inline RoadGraph random_planar(std::size_t rows, std::size_t cols, std::uint64_t seed,
                               double wh_per_m = 0.05) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<RoadNode> nodes;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      nodes.push_back({static_cast<NodeId>(r * cols + c),
                       {40.70 + 0.0018 * (r + 0.6 * (u(rng) - 0.5)),
                        -74.02 + 0.0024 * (c + 0.6 * (u(rng) - 0.5))}});
  std::vector<RoadArc> arcs;
  auto link = [&](std::size_t a, std::size_t b) {
    const double dist = haversine_m(nodes[a].pos, nodes[b].pos);
    const double e = std::max(1.0, std::round(dist * wh_per_m * (0.8 + 0.4 * u(rng))));
    arcs.push_back({a, b, dist, dist / 10, e});
    arcs.push_back({b, a, dist, dist / 10, e});
  };
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      if (c + 1 < cols) link(i, i + 1);
      if (r + 1 < rows) link(i, i + cols);
      if (r + 1 < rows && c + 1 < cols && u(rng) < 0.3) link(i, i + cols + 1);
    }
  return RoadGraph(nodes, arcs);
}

/// Uniform grid whose arcs all carry exactly `wh` Wh.
inline RoadGraph uniform_grid(std::size_t rows, std::size_t cols, double wh) {
  std::vector<RoadNode> nodes;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      nodes.push_back({static_cast<NodeId>(r * cols + c), {40.0 + 0.001 * r, -74.0 + 0.001 * c}});
  std::vector<RoadArc> arcs;
  auto link = [&](std::size_t a, std::size_t b) {
    arcs.push_back({a, b, 100.0, 10.0, wh});
    arcs.push_back({b, a, 100.0, 10.0, wh});
  };
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      if (c + 1 < cols) link(i, i + 1);
      if (r + 1 < rows) link(i, i + cols);
    }
  return RoadGraph(nodes, arcs);
}

/// All-pairs shortest distances by Floyd-Warshall over a dense matrix.
inline std::vector<std::vector<double>> floyd_warshall(
    std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& arcs) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (auto [u, v, w] : arcs) d[u][v] = std::min(d[u][v], w);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

/// Small synthetic graph: a two-way ring of `locations` plus random chords,
/// arc times drawn from [60, 300] s. Node i stands for original id 100 + i.
inline SyntheticGraph ring_synthetic(std::size_t locations, std::mt19937_64& rng,
                                     double quantum_wh = 100.0) {
  std::uniform_real_distribution<double> t(60.0, 300.0);
  SyntheticGraph g;
  g.quantum_wh = quantum_wh;
  for (std::size_t i = 0; i < locations; ++i)
    g.nodes.push_back({{40.0 + 0.01 * static_cast<double>(i), -74.0 + 0.013 * (i % 3)},
                       static_cast<NodeId>(100 + i)});
  for (std::size_t i = 0; i < locations; ++i) {
    const std::size_t j = (i + 1) % locations;
    g.arcs.push_back({i, j, t(rng), 500.0});
    g.arcs.push_back({j, i, t(rng), 500.0});
  }
  for (std::size_t k = 0; k < locations / 2; ++k) {
    const std::size_t a = rng() % locations, b = rng() % locations;
    if (a != b) g.arcs.push_back({a, b, 1.5 * t(rng), 800.0});
  }
  return g;
}

/// A random siting instance with `locations` geo-nodes, three candidates and
/// `requests` distinct demands.
struct RandomInstance {
  SyntheticGraph synth;
  std::vector<NodeId> geo;
  ChargingConfig charging;
  VehicleSpec vehicle{"test", 1.0, 500.0, 4, 1.0};
  RequestSet requests;
  std::shared_ptr<const MultiLayerGraph> graph;
};

inline RandomInstance random_instance(std::uint64_t seed, std::size_t locations = 8,
                                      std::size_t requests = 6, std::size_t stations = 2) {
  std::mt19937_64 rng(seed);
  RandomInstance r;
  r.synth = ring_synthetic(locations, rng);
  for (std::size_t i = 0; i < locations; ++i) r.geo.push_back(static_cast<NodeId>(100 + i));
  std::vector<NodeId> cand = r.geo;
  std::shuffle(cand.begin(), cand.end(), rng);
  cand.resize(3);
  std::sort(cand.begin(), cand.end());
  r.charging = {cand, 4000.0 + 2000.0 * static_cast<double>(rng() % 4), stations, 50000.0};
  r.vehicle.battery_wh = 100.0 * static_cast<double>(5 + rng() % 3);
  std::set<std::pair<NodeId, NodeId>> seen;
  while (r.requests.size() < requests) {
    const NodeId o = r.geo[rng() % locations], d = r.geo[rng() % locations];
    if (o == d || !seen.emplace(o, d).second) continue;
    r.requests.requests.push_back({o, d, static_cast<double>(1 + rng() % 10) / 3600.0});
  }
  r.graph = std::make_shared<const MultiLayerGraph>(
      build_multilayer(r.synth, r.vehicle, r.geo, r.charging));
  return r;
}

/// Empirical pairing probability: two independent Poisson streams, a user of
/// a uniformly random arrival finds a partner from the other stream within
/// `wait`. Returns (estimate, standard error); the error comes from 100 batch
/// means since consecutive outcomes are correlated.
inline std::pair<double, double> simulate_pairing(double a1, double a2, double wait,
                                                  std::size_t arrivals, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e1(a1), e2(a2);
  double t1 = e1(rng), t2 = e2(rng);
  constexpr std::size_t kBatches = 100;
  const std::size_t per_batch = arrivals / kBatches;
  std::vector<double> means;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < per_batch * kBatches; ++k) {
    // The pending arrival of the other stream is the first one after this
    // arrival.
    if (t1 <= t2) {
      if (t2 - t1 <= wait) ++hits;
      t1 += e1(rng);
    } else {
      if (t1 - t2 <= wait) ++hits;
      t2 += e2(rng);
    }
    if ((k + 1) % per_batch == 0) {
      means.push_back(static_cast<double>(hits) / static_cast<double>(per_batch));
      hits = 0;
    }
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= kBatches;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= kBatches - 1;
  return {mean, std::sqrt(var / kBatches)};
}

/// Betweenness by explicit enumeration of every shortest path (time ties
/// within 1e-9 s). Exponential; small graphs only.
inline std::vector<double> brute_force_betweenness(const SyntheticGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::tuple<std::size_t, std::size_t, double>> arcs;
  for (const auto& a : g.arcs) arcs.emplace_back(a.tail, a.head, a.time_s);
  const auto d = floyd_warshall(n, arcs);
  std::vector<double> cb(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t || !std::isfinite(d[s][t])) continue;
      std::vector<std::vector<std::size_t>> paths;
      std::vector<std::size_t> path{s};
      std::function<void(std::size_t)> walk = [&](std::size_t v) {
        if (v == t) {
          paths.push_back(path);
          return;
        }
        for (const auto& a : g.arcs)
          if (a.tail == v && std::abs(d[s][v] + a.time_s - d[s][a.head]) <= 1e-9 &&
              std::abs(d[s][a.head] + d[a.head][t] - d[s][t]) <= 1e-9) {
            path.push_back(a.head);
            walk(a.head);
            path.pop_back();
          }
      };
      walk(s);
      for (const auto& p : paths)
        for (std::size_t k = 1; k + 1 < p.size(); ++k)
          cb[p[k]] += 1.0 / static_cast<double>(paths.size());
    }
  return cb;
}

}  // namespace eamod::testing
