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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "eamod/error.hpp"
#include "eamod/graph.hpp"
#include "eamod/ingest.hpp"
#include "eamod/isoprune.hpp"
#include "json.hpp"

namespace eamod {

struct ChargingConfig {
  std::vector<NodeId> candidates;  ///< must be geo-locations
  double station_power_w = 0.0;    ///< P_max
  std::size_t max_stations = 1;    ///< N
  double vehicle_power_w = 50000.0;

  void validate() const {
    if (candidates.empty())
      throw InvalidArgument("charging candidate set is empty");
    if (!(station_power_w > 0) || !(vehicle_power_w > 0))
      throw InvalidArgument("charging power must be positive");
    if (max_stations < 1 || max_stations > candidates.size())
      throw InvalidArgument("station cap must lie in [1, |C|]");
  }
};

enum class ArcKind { kRoad, kGeoIn, kGeoOut, kCharge };

inline const char* to_string(ArcKind k) {
  switch (k) {
    case ArcKind::kRoad:
      return "road";
    case ArcKind::kGeoIn:
      return "geo_in";
    case ArcKind::kGeoOut:
      return "geo_out";
    case ArcKind::kCharge:
      return "charge";
  }
  return "?";
}

/// State-of-charge layered network. Layered node (loc, layer) has index
/// `loc * layers + layer`; geo-node g follows at `locations * layers + g`.
/// kGeoOut arcs leave a geo-node, kGeoIn arcs enter one.
class MultiLayerGraph {
 public:
  struct Arc {
    std::size_t tail = 0;
    std::size_t head = 0;
    double time_s = 0.0;
    double distance_m = 0.0;
    ArcKind kind = ArcKind::kRoad;
    std::size_t site = 0;  ///< geo index for geo arcs, station index for charge
  };

  std::size_t layers() const { return layers_; }
  double quantum_wh() const { return quantum_wh_; }
  std::size_t location_count() const { return locations_; }
  std::size_t geo_count() const { return geo_ids_.size(); }
  std::size_t station_count() const { return station_geo_.size(); }
  std::size_t node_count() const { return locations_ * layers_ + geo_ids_.size(); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  std::size_t arc_count() const { return arcs_.size(); }

  std::size_t layered_node(std::size_t loc, std::size_t layer) const {
    return loc * layers_ + layer;
  }
  std::size_t geo_node(std::size_t g) const { return locations_ * layers_ + g; }
  bool is_geo_node(std::size_t v) const { return v >= locations_ * layers_; }
  /// Location of a layered node, or of the geo-node's location.
  std::size_t location_of(std::size_t v) const {
    return is_geo_node(v) ? geo_loc_[v - locations_ * layers_] : v / layers_;
  }
  /// Layer of a layered node; unspecified for geo-nodes.
  std::size_t layer_of(std::size_t v) const { return v % layers_; }

  /// Geo index of location id `id`, if it is a geo-location.
  std::optional<std::size_t> geo_index(NodeId id) const {
    auto it = geo_by_id_.find(id);
    if (it == geo_by_id_.end()) return std::nullopt;
    return it->second;
  }
  NodeId geo_id(std::size_t g) const { return geo_ids_[g]; }
  std::size_t geo_location(std::size_t g) const { return geo_loc_[g]; }
  /// Geo index of station `c` (candidate order of the charging config).
  std::size_t station_geo(std::size_t c) const { return station_geo_[c]; }
  NodeId station_id(std::size_t c) const { return geo_ids_[station_geo_[c]]; }

  friend MultiLayerGraph build_multilayer(const SyntheticGraph&, const VehicleSpec&,
                                          const std::vector<NodeId>&,
                                          const ChargingConfig&);

 private:
  std::size_t layers_ = 0;
  double quantum_wh_ = 0.0;
  std::size_t locations_ = 0;
  std::vector<NodeId> geo_ids_;
  std::vector<std::size_t> geo_loc_;
  std::unordered_map<NodeId, std::size_t> geo_by_id_;
  std::vector<std::size_t> station_geo_;
  std::vector<Arc> arcs_;
};

inline std::size_t layer_count(double battery_wh, double quantum_wh) {
  if (!(quantum_wh > 0)) throw InvalidArgument("energy quantum must be positive");
  if (battery_wh < quantum_wh)
    throw InvalidArgument("battery smaller than one energy quantum");
  return static_cast<std::size_t>(std::floor(battery_wh / quantum_wh)) + 1;
}

/// Geo-locations and stations are original node ids that survived pruning.
/// Arc order: road arcs (synthetic arc major, layer minor), then geo arcs
/// (geo major, layer minor, out before in), then charging arcs.
inline MultiLayerGraph build_multilayer(const SyntheticGraph& synth,
                                        const VehicleSpec& vehicle,
                                        const std::vector<NodeId>& geo_nodes,
                                        const ChargingConfig& charging) {
  charging.validate();
  MultiLayerGraph g;
  g.quantum_wh_ = synth.quantum_wh;
  g.layers_ = layer_count(vehicle.battery_wh, synth.quantum_wh);
  g.locations_ = synth.node_count();
  const std::size_t n = g.layers_;

  std::unordered_map<NodeId, std::size_t> loc_of;
  for (std::size_t v = 0; v < synth.node_count(); ++v)
    if (!synth.is_split(v)) loc_of.emplace(synth.nodes[v].original, v);

  for (NodeId id : geo_nodes) {
    auto it = loc_of.find(id);
    if (it == loc_of.end())
      throw InvalidArgument("geo-node " + std::to_string(id) +
                            " is not a location of the synthetic graph");
    if (!g.geo_by_id_.emplace(id, g.geo_ids_.size()).second)
      throw InvalidArgument("duplicate geo-node " + std::to_string(id));
    g.geo_ids_.push_back(id);
    g.geo_loc_.push_back(it->second);
  }
  for (NodeId id : charging.candidates) {
    auto it = g.geo_by_id_.find(id);
    if (it == g.geo_by_id_.end())
      throw InvalidArgument("charging candidate " + std::to_string(id) +
                            " is not a geo-location");
    g.station_geo_.push_back(it->second);
  }

  for (const auto& a : synth.arcs)
    for (std::size_t l = 0; l + 1 < n; ++l)
      g.arcs_.push_back({g.layered_node(a.tail, l), g.layered_node(a.head, l + 1),
                         a.time_s, a.distance_m, ArcKind::kRoad, 0});
  for (std::size_t k = 0; k < g.geo_ids_.size(); ++k)
    for (std::size_t l = 0; l < n; ++l) {
      const std::size_t v = g.layered_node(g.geo_loc_[k], l);
      g.arcs_.push_back({g.geo_node(k), v, 0.0, 0.0, ArcKind::kGeoOut, k});
      g.arcs_.push_back({v, g.geo_node(k), 0.0, 0.0, ArcKind::kGeoIn, k});
    }
  const double charge_s = synth.quantum_wh * 3600.0 / charging.vehicle_power_w;
  for (std::size_t c = 0; c < g.station_geo_.size(); ++c) {
    const std::size_t loc = g.geo_loc_[g.station_geo_[c]];
    for (std::size_t l = 1; l < n; ++l)
      g.arcs_.push_back({g.layered_node(loc, l), g.layered_node(loc, l - 1), charge_s,
                         0.0, ArcKind::kCharge, c});
  }
  return g;
}

inline nlohmann::json multilayer_to_json(const MultiLayerGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    nlohmann::json j{{"id", v}, {"location", g.location_of(v)}};
    if (g.is_geo_node(v)) {
      j["kind"] = "geo";
      j["geo_id"] = g.geo_id(v - g.location_count() * g.layers());
    } else {
      j["kind"] = "layered";
      j["layer"] = g.layer_of(v);
    }
    nodes.push_back(std::move(j));
  }
  nlohmann::json arcs = nlohmann::json::array();
  for (const auto& a : g.arcs())
    arcs.push_back({{"tail", a.tail},
                    {"head", a.head},
                    {"kind", to_string(a.kind)},
                    {"time_s", a.time_s}});
  return {{"layers", g.layers()},
          {"quantum_wh", g.quantum_wh()},
          {"nodes", std::move(nodes)},
          {"arcs", std::move(arcs)}};
}

}  // namespace eamod
