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
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "eamod/error.hpp"
#include "eamod/graph.hpp"
#include "eamod/ingest.hpp"
#include "eamod/isoprune.hpp"

namespace eamod {

struct PoolingConfig {
  double max_wait_s = 0.0;   ///< t-bar
  double max_delay_s = 0.0;  ///< delta-bar
  int capacity = 2;

  void validate() const {
    if (!(max_wait_s >= 0) || !(max_delay_s >= 0))
      throw InvalidArgument("pooling wait and delay must be >= 0");
    if (capacity != 2)
      throw Unsupported("vehicle capacity " + std::to_string(capacity) +
                        " unsupported; only 2 is implemented");
  }
};

/// Probability that a user finds a partner from the other streams within
/// `max_wait_s`, for independent Poisson streams with the given rates.
inline double pair_probability(std::span<const double> rates, double max_wait_s) {
  if (rates.empty()) throw InvalidArgument("empty rate list");
  if (!(max_wait_s >= 0)) throw InvalidArgument("max wait must be >= 0");
  double total = 0.0;
  for (double a : rates) {
    if (!(a > 0)) throw InvalidArgument("rates must be > 0");
    total += a;
  }
  double p = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    double prod = rates[i] / total;
    for (std::size_t j = 0; j < rates.size(); ++j)
      if (j != i) prod *= -std::expm1(-rates[j] * max_wait_s);
    p += prod;
  }
  return p;
}

inline double pair_probability(double a1, double a2, double max_wait_s) {
  const std::array<double, 2> r{a1, a2};
  return pair_probability(r, max_wait_s);
}

/// Dense shortest travel times between a set of locations.
class TravelTimes {
 public:
  TravelTimes() = default;
  TravelTimes(std::vector<NodeId> ids, std::vector<double> seconds)
      : ids_(std::move(ids)), tt_(std::move(seconds)) {
    if (tt_.size() != ids_.size() * ids_.size())
      throw InvalidArgument("travel-time matrix has wrong size");
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (!index_.emplace(ids_[i], i).second)
        throw InvalidArgument("duplicate location " + std::to_string(ids_[i]));
  }

  const std::vector<NodeId>& ids() const { return ids_; }
  bool contains(NodeId id) const { return index_.count(id) != 0; }
  double operator()(NodeId from, NodeId to) const {
    return tt_[index(from) * ids_.size() + index(to)];
  }

 private:
  std::size_t index(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw InvalidArgument("location " + std::to_string(id) + " not in travel times");
    return it->second;
  }

  std::vector<NodeId> ids_;
  std::vector<double> tt_;
  std::unordered_map<NodeId, std::size_t> index_;
};

/// Travel times on the synthetic graph between surviving original nodes.
inline TravelTimes travel_times(const SyntheticGraph& g, const std::vector<NodeId>& ids) {
  std::unordered_map<NodeId, std::size_t> loc;
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (!g.is_split(v)) loc.emplace(g.nodes[v].original, v);
  std::vector<std::size_t> at;
  for (NodeId id : ids) {
    auto it = loc.find(id);
    if (it == loc.end())
      throw InvalidArgument("location " + std::to_string(id) + " not in synthetic graph");
    at.push_back(it->second);
  }
  const Adjacency adj = g.adjacency();
  std::vector<double> tt(ids.size() * ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto d = dijkstra(
        adj, at[i], [&](std::size_t a) { return g.arcs[a].head; },
        [&](std::size_t a) { return g.arcs[a].time_s; });
    for (std::size_t j = 0; j < ids.size(); ++j) tt[i * ids.size() + j] = d[at[j]];
  }
  return TravelTimes(ids, std::move(tt));
}

struct CandidateMatch {
  std::size_t first = 0;   ///< request index picked up first
  std::size_t second = 0;  ///< request index picked up second
  std::array<NodeId, 4> sequence{};  ///< o1, o2, x, y
  std::array<double, 3> leg_time_s{};
  std::array<double, 2> delay_s{};
  double vht_s = 0.0;
  double savings_s = 0.0;
};

/// Pickups in order (o1, o2); the dropoff order with the smaller VHT among
/// those within the delay cap. Returns nullopt when nothing saves time.
inline std::optional<CandidateMatch> best_sequence(const Request& m1, const Request& m2,
                                                   const TravelTimes& tt,
                                                   const PoolingConfig& cfg) {
  const double direct1 = tt(m1.origin, m1.destination);
  const double direct2 = tt(m2.origin, m2.destination);
  const double pick = tt(m1.origin, m2.origin);
  std::optional<CandidateMatch> best;
  for (bool first_drop_1 : {true, false}) {
    const NodeId x = first_drop_1 ? m1.destination : m2.destination;
    const NodeId y = first_drop_1 ? m2.destination : m1.destination;
    CandidateMatch c;
    c.sequence = {m1.origin, m2.origin, x, y};
    c.leg_time_s = {pick, tt(m2.origin, x), tt(x, y)};
    c.vht_s = c.leg_time_s[0] + c.leg_time_s[1] + c.leg_time_s[2];
    const double ride1 = first_drop_1 ? pick + c.leg_time_s[1] : c.vht_s;
    const double ride2 = first_drop_1 ? c.leg_time_s[1] + c.leg_time_s[2] : c.leg_time_s[1];
    c.delay_s = {ride1 - direct1, ride2 - direct2};
    if (c.delay_s[0] > cfg.max_delay_s || c.delay_s[1] > cfg.max_delay_s) continue;
    if (!best || c.vht_s < best->vht_s) best = c;
  }
  if (!best) return std::nullopt;
  best->savings_s = direct1 + direct2 - best->vht_s;
  if (!(best->savings_s > 0)) return std::nullopt;
  return best;
}

/// All ordered pairs, self-pairs included, by savings descending then
/// (first, second).
inline std::vector<CandidateMatch> enumerate_candidates(const RequestSet& requests,
                                                        const TravelTimes& tt,
                                                        const PoolingConfig& cfg) {
  cfg.validate();
  std::vector<CandidateMatch> out;
  const auto& r = requests.requests;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j)
      if (auto c = best_sequence(r[i], r[j], tt, cfg)) {
        c->first = i;
        c->second = j;
        out.push_back(*c);
      }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.savings_s != b.savings_s) return a.savings_s > b.savings_s;
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  return out;
}

struct Provenance {
  bool pooled = false;
  std::size_t first = 0;   ///< source request (the only one when solo)
  std::size_t second = 0;
  int leg = 0;             ///< 1..3 for pooled legs, 0 for solo

  std::string str() const {
    if (!pooled) return "solo:" + std::to_string(first);
    return "pool:" + std::to_string(first) + "-" + std::to_string(second) + ":leg" +
           std::to_string(leg);
  }
};

struct EquivalentRequest {
  Request request;
  Provenance provenance;
};

struct AllocatedMatch {
  std::size_t first = 0;
  std::size_t second = 0;
  double rate = 0.0;  ///< matched pairs per second
};

struct PooledRequestSet {
  std::vector<EquivalentRequest> requests;
  std::vector<AllocatedMatch> matches;
  std::vector<double> residual;  ///< unmatched users/s per source request

  std::vector<Request> as_requests() const {
    std::vector<Request> out;
    for (const auto& e : requests) out.push_back(e.request);
    return out;
  }

  /// Largest |residual + matched - alpha| over the source requests.
  double conservation_error(const RequestSet& source) const {
    std::vector<double> users(residual);
    for (const auto& m : matches) {
      users[m.first] += m.rate;
      users[m.second] += m.rate;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i)
      worst = std::max(worst, std::abs(users[i] - source.requests[i].rate));
    return worst;
  }
};

/// Vehicle-seconds per second of routing each request on its shortest path.
inline double in_vehicle_vht(const std::vector<Request>& requests, const TravelTimes& tt) {
  double s = 0.0;
  for (const Request& r : requests) s += r.rate * tt(r.origin, r.destination);
  return s;
}

/// Greedy allocation over `candidates` in the given order, at remaining rates.
inline PooledRequestSet greedy_assign(const std::vector<CandidateMatch>& candidates,
                                      const RequestSet& requests,
                                      const PoolingConfig& cfg) {
  cfg.validate();
  PooledRequestSet out;
  const auto& r = requests.requests;
  out.residual.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out.residual[i] = r[i].rate;
  auto& rho = out.residual;
  for (const CandidateMatch& c : candidates) {
    double matched = 0.0;
    if (c.first == c.second) {
      const double a = rho[c.first];
      if (!(a > 0)) continue;
      matched = 0.5 * a * pair_probability(a, a, cfg.max_wait_s);
      if (!(matched > 0)) continue;
      rho[c.first] = std::max(0.0, a - 2.0 * matched);
    } else {
      const double a = rho[c.first];
      const double b = rho[c.second];
      if (!(a > 0) || !(b > 0)) continue;
      matched = std::min(a, b) * pair_probability(a, b, cfg.max_wait_s);
      if (!(matched > 0)) continue;
      rho[c.first] = std::max(0.0, a - matched);
      rho[c.second] = std::max(0.0, b - matched);
    }
    out.matches.push_back({c.first, c.second, matched});
    for (int leg = 0; leg < 3; ++leg) {
      const NodeId from = c.sequence[leg];
      const NodeId to = c.sequence[leg + 1];
      if (from == to) continue;
      out.requests.push_back({{from, to, matched}, {true, c.first, c.second, leg + 1}});
    }
  }
  for (std::size_t i = 0; i < r.size(); ++i)
    if (rho[i] > 0)
      out.requests.push_back({{r[i].origin, r[i].destination, rho[i]}, {false, i, i, 0}});
  return out;
}

/// enumerate_candidates followed by greedy_assign.
inline PooledRequestSet pool_requests(const RequestSet& requests, const TravelTimes& tt,
                                      const PoolingConfig& cfg) {
  return greedy_assign(enumerate_candidates(requests, tt, cfg), requests, cfg);
}

/// Identity transform: every request solo.
inline PooledRequestSet unpooled(const RequestSet& requests) {
  PooledRequestSet out;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    out.requests.push_back({requests.requests[i], {false, i, i, 0}});
    out.residual.push_back(requests.requests[i].rate);
  }
  return out;
}

inline void write_pooled_csv(std::ostream& out, const PooledRequestSet& set) {
  out << "origin,destination,rate_per_h,provenance\n";
  for (const auto& e : set.requests)
    out << e.request.origin << ',' << e.request.destination << ','
        << detail::format_double(e.request.rate * 3600.0) << ',' << e.provenance.str()
        << '\n';
}

}  // namespace eamod
