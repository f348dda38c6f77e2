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

// Joint routing, rebalancing and station-siting MILP over a multi-layer
// graph. Flows are vehicles per second, so the objective is the fleet's
// vehicle-seconds per second (the number of busy vehicles).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "eamod/error.hpp"
#include "eamod/graph.hpp"
#include "eamod/ingest.hpp"
#include "eamod/lp.hpp"
#include "eamod/multilayer.hpp"

namespace eamod {

/// A linear program with names, row tags and integrality markers.
struct MilpProblem {
  LinearProgram lp;
  std::vector<std::string> var_names;
  std::vector<bool> integer;
  std::vector<std::string> row_names;
  std::vector<std::string> row_tags;
  std::string objective_name = "vht";

  std::size_t add_variable(std::string name, double cost, double lo, double hi,
                           bool is_integer) {
    var_names.push_back(std::move(name));
    integer.push_back(is_integer);
    return lp.add_variable(cost, lo, hi);
  }
  void add_row(std::string name, std::string tag,
               std::vector<std::pair<std::size_t, double>> coefs, Sense sense,
               double rhs) {
    row_names.push_back(std::move(name));
    row_tags.push_back(std::move(tag));
    lp.add_row(std::move(coefs), sense, rhs);
  }
  std::size_t variable_count() const { return lp.variable_count(); }
  std::size_t row_count() const { return lp.row_count(); }
  std::size_t integer_count() const {
    return static_cast<std::size_t>(std::count(integer.begin(), integer.end(), true));
  }
};

/// Demands sharing an origin and destination form one commodity.
struct Commodity {
  NodeId origin = 0;
  NodeId destination = 0;
  double rate = 0.0;
  std::vector<std::size_t> sources;  ///< indices into the demand list
};

struct AssembleOptions {
  bool geo_usage_rows = true;        ///< emit the aggregate eq4/eq5 rows
  bool reduce_commodity_arcs = true;
  double detour_slack_s = 600.0;     ///< time budget beyond the shortest path
  bool per_commodity_soc = false;    ///< eq6 per commodity instead of aggregated
};

enum class VarKind { kUser, kRebalance, kStation };

struct VarInfo {
  VarKind kind = VarKind::kUser;
  std::size_t commodity = 0;
  std::size_t arc = 0;
  std::size_t station = 0;
};

struct MilpInstance {
  MilpProblem problem;
  std::shared_ptr<const MultiLayerGraph> graph;
  ChargingConfig charging;
  std::vector<Commodity> commodities;
  std::vector<VarInfo> vars;
  std::vector<std::size_t> rebalance_var;  ///< per arc
  std::vector<std::size_t> station_var;    ///< per candidate
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> user_vars;  ///< (arc, var)
};

namespace detail {

// Location-level shortest times over the road layer structure.
inline std::vector<std::vector<double>> location_times(const MultiLayerGraph& g,
                                                       bool reverse) {
  struct A {
    std::size_t tail, head;
    double t;
  };
  std::vector<A> arcs;
  for (const auto& a : g.arcs())
    if (a.kind == ArcKind::kRoad && g.layer_of(a.tail) == 0) {
      const std::size_t u = g.location_of(a.tail), v = g.location_of(a.head);
      arcs.push_back(reverse ? A{v, u, a.time_s} : A{u, v, a.time_s});
    }
  const Adjacency adj =
      build_adjacency(g.location_count(), arcs, [](const A& a) { return a.tail; });
  std::vector<std::vector<double>> out(g.geo_count());
  for (std::size_t k = 0; k < g.geo_count(); ++k)
    out[k] = dijkstra(
        adj, g.geo_location(k), [&](std::size_t i) { return arcs[i].head; },
        [&](std::size_t i) { return arcs[i].t; });
  return out;
}

}  // namespace detail

/// Builds the instance. Variables: user flows (commodity major, arc order),
/// then rebalancing flows on every arc, then one binary per candidate.
inline MilpInstance assemble(std::shared_ptr<const MultiLayerGraph> graph,
                             const std::vector<Request>& demands,
                             const ChargingConfig& charging,
                             const AssembleOptions& opt = {}) {
  const MultiLayerGraph& g = *graph;
  charging.validate();
  if (charging.candidates.size() != g.station_count())
    throw InvalidArgument("charging config does not match the layered graph");
  for (std::size_t c = 0; c < g.station_count(); ++c)
    if (charging.candidates[c] != g.station_id(c))
      throw InvalidArgument("candidate " + std::to_string(charging.candidates[c]) +
                            " not in the layered graph");

  MilpInstance inst;
  inst.graph = graph;
  inst.charging = charging;
  {
    std::map<std::pair<NodeId, NodeId>, std::size_t> index;
    for (std::size_t i = 0; i < demands.size(); ++i) {
      const Request& r = demands[i];
      for (NodeId id : {r.origin, r.destination})
        if (!g.geo_index(id))
          throw InvalidArgument("demand endpoint " + std::to_string(id) +
                                " is not a geo-node");
      if (r.origin == r.destination)
        throw InvalidArgument("demand with origin == destination");
      if (!(r.rate > 0)) throw InvalidArgument("demand rate must be > 0");
      auto [it, fresh] =
          index.emplace(std::make_pair(r.origin, r.destination), inst.commodities.size());
      if (fresh) inst.commodities.push_back({r.origin, r.destination, 0.0, {}});
      inst.commodities[it->second].rate += r.rate;
      inst.commodities[it->second].sources.push_back(i);
    }
  }

  std::vector<std::vector<double>> from, to;
  if (opt.reduce_commodity_arcs) {
    from = detail::location_times(g, false);
    to = detail::location_times(g, true);
  }

  MilpProblem& p = inst.problem;
  const auto& arcs = g.arcs();
  inst.user_vars.resize(inst.commodities.size());
  for (std::size_t m = 0; m < inst.commodities.size(); ++m) {
    const Commodity& com = inst.commodities[m];
    const std::size_t go = *g.geo_index(com.origin);
    const std::size_t gd = *g.geo_index(com.destination);
    double budget = kInf;
    if (opt.reduce_commodity_arcs) {
      const double sp = from[go][g.geo_location(gd)];
      budget = sp + opt.detour_slack_s + 1e-9 * std::max(1.0, sp);
    }
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      const auto& arc = arcs[a];
      bool keep = false;
      switch (arc.kind) {
        case ArcKind::kRoad:
          keep = !opt.reduce_commodity_arcs ||
                 from[go][g.location_of(arc.tail)] + arc.time_s +
                         to[gd][g.location_of(arc.head)] <=
                     budget;
          break;
        case ArcKind::kGeoOut:
          keep = arc.site == go;
          break;
        case ArcKind::kGeoIn:
          keep = arc.site == gd;
          break;
        case ArcKind::kCharge:
          keep = false;
          break;
      }
      if (!keep) continue;
      const std::size_t v = p.add_variable(
          "xm" + std::to_string(m) + "_a" + std::to_string(a), arc.time_s, 0.0, kInf, false);
      inst.vars.push_back({VarKind::kUser, m, a, 0});
      inst.user_vars[m].emplace_back(a, v);
    }
  }
  inst.rebalance_var.resize(arcs.size());
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    inst.rebalance_var[a] =
        p.add_variable("xr_a" + std::to_string(a), arcs[a].time_s, 0.0, kInf, false);
    inst.vars.push_back({VarKind::kRebalance, 0, a, 0});
  }
  for (std::size_t c = 0; c < g.station_count(); ++c) {
    inst.station_var.push_back(p.add_variable("k" + std::to_string(c), 0.0, 0.0, 1.0, true));
    inst.vars.push_back({VarKind::kStation, 0, 0, c});
  }

  using Coefs = std::vector<std::pair<std::size_t, double>>;
  const std::size_t nodes = g.node_count();

  // eq2: per-commodity conservation, in - out = alpha (1[d] - 1[o]).
  for (std::size_t m = 0; m < inst.commodities.size(); ++m) {
    const Commodity& com = inst.commodities[m];
    std::map<std::size_t, Coefs> rows;
    for (auto [a, v] : inst.user_vars[m]) {
      rows[arcs[a].head].emplace_back(v, 1.0);
      rows[arcs[a].tail].emplace_back(v, -1.0);
    }
    const std::size_t o = g.geo_node(*g.geo_index(com.origin));
    const std::size_t d = g.geo_node(*g.geo_index(com.destination));
    rows[o];
    rows[d];
    for (auto& [node, coefs] : rows) {
      const double rhs = node == d ? com.rate : node == o ? -com.rate : 0.0;
      p.add_row("eq2_m" + std::to_string(m) + "_n" + std::to_string(node), "eq2",
                std::move(coefs), Sense::kEq, rhs);
    }
  }

  // eq3: aggregate vehicle conservation.
  {
    std::vector<Coefs> rows(nodes);
    for (std::size_t m = 0; m < inst.commodities.size(); ++m)
      for (auto [a, v] : inst.user_vars[m]) {
        rows[arcs[a].head].emplace_back(v, 1.0);
        rows[arcs[a].tail].emplace_back(v, -1.0);
      }
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      rows[arcs[a].head].emplace_back(inst.rebalance_var[a], 1.0);
      rows[arcs[a].tail].emplace_back(inst.rebalance_var[a], -1.0);
    }
    for (std::size_t v = 0; v < nodes; ++v)
      if (!rows[v].empty())
        p.add_row("eq3_n" + std::to_string(v), "eq3", std::move(rows[v]), Sense::kEq, 0.0);
  }

  // eq4/eq5: geo-arc usage totals.
  double total = 0.0;
  for (const Commodity& c : inst.commodities) total += c.rate;
  if (opt.geo_usage_rows) {
    Coefs user, reb;
    for (std::size_t m = 0; m < inst.commodities.size(); ++m)
      for (auto [a, v] : inst.user_vars[m])
        if (arcs[a].kind == ArcKind::kGeoIn || arcs[a].kind == ArcKind::kGeoOut)
          user.emplace_back(v, 1.0);
    for (std::size_t a = 0; a < arcs.size(); ++a)
      if (arcs[a].kind == ArcKind::kGeoIn || arcs[a].kind == ArcKind::kGeoOut)
        reb.emplace_back(inst.rebalance_var[a], 1.0);
    if (!user.empty()) p.add_row("eq4", "eq4", std::move(user), Sense::kEq, 2.0 * total);
    if (!reb.empty()) p.add_row("eq5", "eq5", std::move(reb), Sense::kEq, 2.0 * total);
  }

  // eq6: users dropped at g in layer j leave g as vehicles in layer j, and
  // vehicles entering g from layer j pick users up in layer j.
  {
    const std::size_t n = g.layers();
    // Geo arc ids: out arc then in arc per (geo, layer).
    std::vector<std::size_t> first_geo(g.geo_count(), arcs.size());
    for (std::size_t a = 0; a < arcs.size(); ++a)
      if (arcs[a].kind == ArcKind::kGeoOut && first_geo[arcs[a].site] == arcs.size())
        first_geo[arcs[a].site] = a;
    auto out_arc = [&](std::size_t k, std::size_t l) { return first_geo[k] + 2 * l; };
    auto in_arc = [&](std::size_t k, std::size_t l) { return first_geo[k] + 2 * l + 1; };
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> user_on(arcs.size());
    for (std::size_t m = 0; m < inst.commodities.size(); ++m)
      for (auto [a, v] : inst.user_vars[m])
        if (arcs[a].kind == ArcKind::kGeoIn || arcs[a].kind == ArcKind::kGeoOut)
          user_on[a].emplace_back(m, v);
    for (std::size_t k = 0; k < g.geo_count(); ++k)
      for (std::size_t l = 0; l < n; ++l) {
        const std::string suffix = "g" + std::to_string(k) + "_l" + std::to_string(l);
        const std::size_t ai = in_arc(k, l), ao = out_arc(k, l);
        if (opt.per_commodity_soc) {
          for (auto [m, v] : user_on[ai])
            p.add_row("eq6_m" + std::to_string(m) + "_" + suffix + "_drop", "eq6",
                      {{v, 1.0}, {inst.rebalance_var[ao], -1.0}}, Sense::kEq, 0.0);
          for (auto [m, v] : user_on[ao])
            p.add_row("eq6_m" + std::to_string(m) + "_" + suffix + "_pick", "eq6",
                      {{v, 1.0}, {inst.rebalance_var[ai], -1.0}}, Sense::kEq, 0.0);
          continue;
        }
        Coefs drop{{inst.rebalance_var[ao], -1.0}};
        for (auto [m, v] : user_on[ai]) drop.emplace_back(v, 1.0);
        p.add_row("eq6_" + suffix + "_drop", "eq6", std::move(drop), Sense::kEq, 0.0);
        Coefs pick{{inst.rebalance_var[ai], -1.0}};
        for (auto [m, v] : user_on[ao]) pick.emplace_back(v, 1.0);
        p.add_row("eq6_" + suffix + "_pick", "eq6", std::move(pick), Sense::kEq, 0.0);
      }
  }

  // eq7: station budget.
  {
    Coefs row;
    for (std::size_t v : inst.station_var) row.emplace_back(v, 1.0);
    p.add_row("eq7", "eq7", std::move(row), Sense::kLe,
              static_cast<double>(charging.max_stations));
  }

  // eq8: charging throughput, in vehicles per second, gated by siting.
  {
    const double cap = charging.station_power_w / (3600.0 * g.quantum_wh());
    std::vector<Coefs> rows(g.station_count());
    for (std::size_t a = 0; a < arcs.size(); ++a)
      if (arcs[a].kind == ArcKind::kCharge)
        rows[arcs[a].site].emplace_back(inst.rebalance_var[a], 1.0);
    for (std::size_t c = 0; c < g.station_count(); ++c) {
      rows[c].emplace_back(inst.station_var[c], -cap);
      p.add_row("eq8_c" + std::to_string(c), "eq8", std::move(rows[c]), Sense::kLe, 0.0);
    }
  }
  return inst;
}

struct RowViolation {
  std::string name;
  std::string tag;
  double residual = 0.0;  ///< amount by which the row is violated
};

struct SolutionDiagnostics {
  std::map<std::string, double> max_violation;  ///< per row tag, plus "bounds"
  std::vector<RowViolation> violations;         ///< rows above tolerance
  double objective = 0.0;
  bool ok = true;
};

/// Recomputes every row and bound from `x` alone.
inline SolutionDiagnostics validate_solution(const MilpProblem& p,
                                             const std::vector<double>& x, double tol) {
  if (x.size() != p.variable_count())
    throw InvalidArgument("solution has " + std::to_string(x.size()) +
                          " values, instance has " + std::to_string(p.variable_count()));
  SolutionDiagnostics d;
  for (const auto& t : p.row_tags) d.max_violation.emplace(t, 0.0);
  d.max_violation["bounds"] = 0.0;
  for (std::size_t i = 0; i < p.row_count(); ++i) {
    const auto& row = p.lp.rows[i];
    double lhs = 0.0;
    for (auto [j, a] : row.coefs) lhs += a * x[j];
    double viol = 0.0;
    const double diff = lhs - row.rhs;
    if (row.sense == Sense::kEq) viol = std::abs(diff);
    if (row.sense == Sense::kLe) viol = std::max(0.0, diff);
    if (row.sense == Sense::kGe) viol = std::max(0.0, -diff);
    double& worst = d.max_violation[p.row_tags[i]];
    worst = std::max(worst, viol);
    if (viol > tol) d.violations.push_back({p.row_names[i], p.row_tags[i], viol});
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    double viol = std::max({0.0, p.lp.lower[j] - x[j], x[j] - p.lp.upper[j]});
    if (p.integer[j]) viol = std::max(viol, std::abs(x[j] - std::round(x[j])));
    if (!std::isfinite(x[j])) viol = kInf;
    d.max_violation["bounds"] = std::max(d.max_violation["bounds"], viol);
    if (viol > tol) d.violations.push_back({p.var_names[j], "bounds", viol});
  }
  d.objective = p.lp.objective(x);
  d.ok = d.violations.empty();
  return d;
}

inline SolutionDiagnostics validate_solution(const MilpInstance& inst,
                                             const std::vector<double>& x, double tol) {
  return validate_solution(inst.problem, x, tol);
}

/// Flow-level quantities of a solution. Rates are per second of operation.
struct FlowMetrics {
  double vehicles = 0.0;              ///< objective: busy vehicles
  double user_energy_wh_s = 0.0;      ///< energy spent with users on board
  double rebalance_energy_wh_s = 0.0;
  double user_distance_m_s = 0.0;
  double rebalance_distance_m_s = 0.0;
  std::vector<double> station_power_w;  ///< charging throughput per candidate
};

inline FlowMetrics flow_metrics(const MilpInstance& inst, const std::vector<double>& x) {
  const MultiLayerGraph& g = *inst.graph;
  const auto& arcs = g.arcs();
  FlowMetrics f;
  f.vehicles = inst.problem.lp.objective(x);
  f.station_power_w.assign(g.station_count(), 0.0);
  for (std::size_t m = 0; m < inst.user_vars.size(); ++m)
    for (auto [a, v] : inst.user_vars[m])
      if (arcs[a].kind == ArcKind::kRoad) {
        f.user_energy_wh_s += g.quantum_wh() * x[v];
        f.user_distance_m_s += arcs[a].distance_m * x[v];
      }
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const double flow = x[inst.rebalance_var[a]];
    if (arcs[a].kind == ArcKind::kRoad) {
      f.rebalance_energy_wh_s += g.quantum_wh() * flow;
      f.rebalance_distance_m_s += arcs[a].distance_m * flow;
    } else if (arcs[a].kind == ArcKind::kCharge) {
      f.station_power_w[arcs[a].site] += g.quantum_wh() * 3600.0 * flow;
    }
  }
  return f;
}

}  // namespace eamod
