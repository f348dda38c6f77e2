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

// Loading of road networks, taxi trips and vehicle specifications, and
// aggregation of trips into rate-based travel requests.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eamod/error.hpp"
#include "eamod/graph.hpp"
#include "json.hpp"

namespace eamod {

struct VehicleSpec {
  std::string name;
  double energy_scale = 1.0;  ///< multiplier on arc energy, in (0, 2]
  double battery_wh = 0.0;
  int seats = 1;
  double mass_scale = 1.0;  ///< reporting only

  void validate() const {
    if (!(energy_scale > 0.0 && energy_scale <= 2.0))
      throw InvalidArgument("vehicle '" + name +
                            "': energy_scale must be in (0, 2]");
    if (!(battery_wh > 0.0))
      throw InvalidArgument("vehicle '" + name + "': battery_wh must be > 0");
    if (seats < 1)
      throw InvalidArgument("vehicle '" + name + "': seats must be >= 1");
  }
};

struct TripRecord {
  GeoPoint pickup;
  GeoPoint dropoff;
  double pickup_time_s = 0.0;  ///< seconds since window start
};

/// One origin-destination demand stream; `rate` in users per second.
struct Request {
  NodeId origin = 0;
  NodeId destination = 0;
  double rate = 0.0;

  friend bool operator==(const Request&, const Request&) = default;
};

struct RequestSet {
  std::vector<Request> requests;
  std::size_t dropped_same_node = 0;  ///< trips snapped to o == d

  std::size_t size() const { return requests.size(); }
  double total_rate() const {
    double s = 0.0;
    for (const Request& r : requests) s += r.rate;
    return s;
  }

  void validate() const {
    std::set<std::pair<NodeId, NodeId>> seen;
    for (const Request& r : requests) {
      if (r.origin == r.destination)
        throw InvalidArgument("request with origin == destination " +
                              std::to_string(r.origin));
      if (!(r.rate > 0.0)) throw InvalidArgument("request rate must be > 0");
      if (!seen.emplace(r.origin, r.destination).second)
        throw InvalidArgument("duplicate request " + std::to_string(r.origin) +
                              "->" + std::to_string(r.destination));
    }
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double to_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [p, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || p != end)
    throw ParseError("expected a number, got '" + std::string(field) + "'",
                     line);
  return v;
}

inline long long to_int(std::string_view field, std::size_t line) {
  long long v = 0;
  const auto* end = field.data() + field.size();
  auto [p, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || p != end)
    throw ParseError("expected an integer, got '" + std::string(field) + "'",
                     line);
  return v;
}

inline bool is_header(std::string_view s) {
  return !s.empty() && (std::isalpha(static_cast<unsigned char>(s.front())) ||
                        s.front() == '_');
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Raw sections of a graph CSV before validation. Node-map rows are kept for
/// synthetic graphs written by the pruning stage.
struct GraphCsv {
  std::vector<RoadNode> nodes;
  struct Arc {
    NodeId tail, head;
    double distance_m, time_s, energy_wh;
  };
  std::vector<Arc> arcs;
  std::vector<std::pair<NodeId, NodeId>> nodemap;
};

inline GraphCsv parse_graph_csv(std::istream& in) {
  enum class Section { kNone, kNodes, kArcs, kNodemap } section = Section::kNone;
  GraphCsv out;
  std::set<NodeId> ids;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view tag = detail::trim(line.substr(1));
      if (tag == "nodes") section = Section::kNodes;
      else if (tag == "arcs") section = Section::kArcs;
      else if (tag == "nodemap") section = Section::kNodemap;
      else throw ParseError("unknown section '#" + std::string(tag) + "'", line_no);
      continue;
    }
    const auto f = detail::split_csv(line);
    if (detail::is_header(f[0])) continue;
    switch (section) {
      case Section::kNone:
        throw ParseError("data before any section header", line_no);
      case Section::kNodes: {
        if (f.size() != 3) throw ParseError("node row needs 3 fields", line_no);
        RoadNode n{detail::to_int(f[0], line_no),
                   {detail::to_double(f[1], line_no),
                    detail::to_double(f[2], line_no)}};
        if (!ids.insert(n.id).second)
          throw ParseError("duplicate node " + std::to_string(n.id), line_no);
        out.nodes.push_back(n);
        break;
      }
      case Section::kArcs: {
        if (f.size() != 5) throw ParseError("arc row needs 5 fields", line_no);
        GraphCsv::Arc a{detail::to_int(f[0], line_no),
                        detail::to_int(f[1], line_no),
                        detail::to_double(f[2], line_no),
                        detail::to_double(f[3], line_no),
                        detail::to_double(f[4], line_no)};
        for (NodeId end : {a.tail, a.head})
          if (!ids.count(end))
            throw ParseError("unknown node " + std::to_string(end), line_no);
        if (a.tail == a.head)
          throw ParseError("self-loop at node " + std::to_string(a.tail), line_no);
        if (!(a.distance_m > 0) || !(a.time_s > 0) || !(a.energy_wh > 0))
          throw ParseError("arc attributes must be positive", line_no);
        out.arcs.push_back(a);
        break;
      }
      case Section::kNodemap:
        if (f.size() != 2) throw ParseError("nodemap row needs 2 fields", line_no);
        out.nodemap.emplace_back(detail::to_int(f[0], line_no),
                                 detail::to_int(f[1], line_no));
        break;
    }
  }
  return out;
}

inline RoadGraph road_graph_from_csv(const GraphCsv& csv) {
  std::map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < csv.nodes.size(); ++i)
    index[csv.nodes[i].id] = i;
  std::vector<RoadArc> arcs;
  arcs.reserve(csv.arcs.size());
  for (const auto& a : csv.arcs)
    arcs.push_back({index.at(a.tail), index.at(a.head), a.distance_m, a.time_s,
                    a.energy_wh});
  return RoadGraph(csv.nodes, std::move(arcs));
}

/// Reads a road graph. Only the "csv" format is defined.
inline RoadGraph load_road_graph(const std::string& path,
                                 const std::string& format = "csv") {
  if (format != "csv") throw Unsupported("unknown graph format '" + format + "'");
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file " + path);
  return road_graph_from_csv(parse_graph_csv(in));
}

inline void write_road_graph_csv(std::ostream& out, const RoadGraph& g) {
  out << "#nodes\nid,lat,lon\n";
  for (const RoadNode& n : g.nodes())
    out << n.id << ',' << detail::format_double(n.pos.lat) << ','
        << detail::format_double(n.pos.lon) << '\n';
  out << "#arcs\ntail,head,dist_m,time_s,energy_wh\n";
  for (const RoadArc& a : g.arcs())
    out << g.nodes()[a.tail].id << ',' << g.nodes()[a.head].id << ','
        << detail::format_double(a.distance_m) << ','
        << detail::format_double(a.time_s) << ','
        << detail::format_double(a.energy_wh) << '\n';
}

/// Parses the trips CSV. Pickup times are made relative to the earliest
/// pickup. Trips with an endpoint outside `bbox` (when given) are skipped.
struct TripLoad {
  std::vector<TripRecord> trips;
  std::size_t outside_bbox = 0;
};

inline TripLoad parse_trips_csv(std::istream& in,
                                std::optional<std::pair<GeoPoint, GeoPoint>> bbox = {}) {
  TripLoad out;
  std::vector<double> epochs;
  std::string raw;
  std::size_t line_no = 0;
  auto inside = [&](const GeoPoint& p) {
    if (!bbox) return true;
    return p.lat >= bbox->first.lat && p.lat <= bbox->second.lat &&
           p.lon >= bbox->first.lon && p.lon <= bbox->second.lon;
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (detail::is_header(f[0])) continue;
    if (f.size() != 5) throw ParseError("trip row needs 5 fields", line_no);
    TripRecord t;
    t.pickup = {detail::to_double(f[0], line_no), detail::to_double(f[1], line_no)};
    t.dropoff = {detail::to_double(f[2], line_no), detail::to_double(f[3], line_no)};
    const double epoch = detail::to_double(f[4], line_no);
    if (!inside(t.pickup) || !inside(t.dropoff)) {
      ++out.outside_bbox;
      continue;
    }
    out.trips.push_back(t);
    epochs.push_back(epoch);
  }
  if (!epochs.empty()) {
    const double t0 = *std::min_element(epochs.begin(), epochs.end());
    for (std::size_t i = 0; i < epochs.size(); ++i)
      out.trips[i].pickup_time_s = epochs[i] - t0;
  }
  return out;
}

inline std::pair<GeoPoint, GeoPoint> bounding_box(const RoadGraph& g) {
  GeoPoint lo{kInf, kInf}, hi{-kInf, -kInf};
  for (const RoadNode& n : g.nodes()) {
    lo.lat = std::min(lo.lat, n.pos.lat);
    lo.lon = std::min(lo.lon, n.pos.lon);
    hi.lat = std::max(hi.lat, n.pos.lat);
    hi.lon = std::max(hi.lon, n.pos.lon);
  }
  return {lo, hi};
}

inline TripLoad load_trips(const std::string& path, const RoadGraph& graph) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trips file " + path);
  return parse_trips_csv(in, bounding_box(graph));
}

inline VehicleSpec vehicle_from_json(const nlohmann::json& j) {
  VehicleSpec v;
  try {
    v.name = j.at("name").get<std::string>();
    v.energy_scale = j.at("energy_scale").get<double>();
    v.battery_wh = j.at("battery_wh").get<double>();
    v.seats = j.at("seats").get<int>();
    v.mass_scale = j.value("mass_scale", 1.0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("vehicle spec: ") + e.what());
  }
  v.validate();
  return v;
}

inline nlohmann::json vehicle_to_json(const VehicleSpec& v) {
  return {{"name", v.name},
          {"energy_scale", v.energy_scale},
          {"battery_wh", v.battery_wh},
          {"seats", v.seats},
          {"mass_scale", v.mass_scale}};
}

inline VehicleSpec load_vehicle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vehicle file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("vehicle file " + path + ": " + e.what());
  }
  return vehicle_from_json(j);
}

/// Snaps `p` to the nearest of `candidates` (node indices of `graph`).
/// Equal distances resolve to the lowest node id.
inline NodeId snap_to_nearest(const RoadGraph& graph,
                              const std::vector<std::size_t>& candidates,
                              const GeoPoint& p) {
  double best = kInf;
  NodeId best_id = 0;
  for (std::size_t idx : candidates) {
    const RoadNode& n = graph.nodes()[idx];
    const double d = haversine_m(p, n.pos);
    if (d < best || (d == best && n.id < best_id)) {
      best = d;
      best_id = n.id;
    }
  }
  return best_id;
}

/// Snaps each trip to its nearest geo-nodes and merges identical
/// origin-destination pairs into one request of rate count / window.
inline RequestSet aggregate_requests(const std::vector<TripRecord>& trips,
                                     const RoadGraph& graph,
                                     const std::vector<NodeId>& geo_nodes,
                                     double window_s) {
  if (geo_nodes.empty()) throw InvalidArgument("geo-node set is empty");
  if (!(window_s > 0)) throw InvalidArgument("window must be positive");
  std::vector<std::size_t> candidates;
  candidates.reserve(geo_nodes.size());
  for (NodeId id : geo_nodes) candidates.push_back(graph.index_of(id));

  RequestSet out;
  std::map<std::pair<NodeId, NodeId>, std::size_t> counts;
  for (const TripRecord& t : trips) {
    const NodeId o = snap_to_nearest(graph, candidates, t.pickup);
    const NodeId d = snap_to_nearest(graph, candidates, t.dropoff);
    if (o == d) {
      ++out.dropped_same_node;
      continue;
    }
    ++counts[{o, d}];
  }
  for (const auto& [od, count] : counts)
    out.requests.push_back(
        {od.first, od.second, static_cast<double>(count) / window_s});
  return out;
}

/// Copy of `graph` with every arc energy multiplied by the vehicle's scale.
inline RoadGraph scale_energy(const RoadGraph& graph, const VehicleSpec& vehicle) {
  std::vector<RoadArc> arcs = graph.arcs();
  for (RoadArc& a : arcs) a.energy_wh *= vehicle.energy_scale;
  return RoadGraph(graph.nodes(), std::move(arcs));
}

/// Request CSV: `origin,destination,rate_per_h`.
inline RequestSet parse_requests_csv(std::istream& in) {
  RequestSet out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (detail::is_header(f[0])) continue;
    if (f.size() < 3) throw ParseError("request row needs 3 fields", line_no);
    out.requests.push_back({detail::to_int(f[0], line_no),
                            detail::to_int(f[1], line_no),
                            detail::to_double(f[2], line_no) / 3600.0});
  }
  out.validate();
  return out;
}

inline void write_requests_csv(std::ostream& out, const RequestSet& set) {
  out << "origin,destination,rate_per_h\n";
  for (const Request& r : set.requests)
    out << r.origin << ',' << r.destination << ','
        << detail::format_double(r.rate * 3600.0) << '\n';
}

}  // namespace eamod
