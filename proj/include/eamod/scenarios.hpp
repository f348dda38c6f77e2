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
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <queue>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eamod/error.hpp"
#include "eamod/graph.hpp"
#include "eamod/ingest.hpp"
#include "eamod/isoprune.hpp"
#include "eamod/model.hpp"
#include "eamod/multilayer.hpp"
#include "eamod/ridepool.hpp"
#include "eamod/solve.hpp"
#include "json.hpp"

namespace eamod {

// ---------------------------------------------------------------------------
// Siting heuristics.

/// Betweenness centrality of every synthetic node, shortest paths by travel
/// time over all ordered pairs (Brandes' dependency accumulation).
inline std::vector<double> betweenness(const SyntheticGraph& g) {
  const std::size_t n = g.node_count();
  const Adjacency adj = g.adjacency();
  std::vector<double> cb(n, 0.0);
  std::vector<double> dist(n), sigma(n), delta(n);
  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    std::vector<std::size_t> order;
    using Label = std::pair<double, std::size_t>;
    std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
    dist[s] = 0.0;
    sigma[s] = 1.0;
    heap.emplace(0.0, s);
    std::vector<char> done(n, 0);
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (done[v] || d > dist[v]) continue;
      done[v] = 1;
      order.push_back(v);
      for (std::size_t a : adj.out(v)) {
        const std::size_t w = g.arcs[a].head;
        const double nd = d + g.arcs[a].time_s;
        if (nd < dist[w]) {
          dist[w] = nd;
          sigma[w] = sigma[v];
          preds[w].assign(1, v);
          heap.emplace(nd, w);
        } else if (nd == dist[w]) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) cb[w] += delta[w];
    }
  }
  return cb;
}

/// Picks the `count` candidates of highest betweenness, ties by lower id.
/// Returns one 0/1 entry per candidate.
inline std::vector<int> heuristic_siting(const SyntheticGraph& g,
                                         const std::vector<NodeId>& candidates,
                                         std::size_t count) {
  if (count > candidates.size())
    throw InvalidArgument("station count exceeds candidate count");
  const std::vector<double> cb = betweenness(g);
  std::unordered_map<NodeId, std::size_t> loc;
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (!g.is_split(v)) loc.emplace(g.nodes[v].original, v);
  std::vector<std::size_t> order(candidates.size());
  std::vector<double> score(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    auto it = loc.find(candidates[c]);
    if (it == loc.end())
      throw InvalidArgument("candidate " + std::to_string(candidates[c]) +
                            " not in synthetic graph");
    score[c] = cb[it->second];
    order[c] = c;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return candidates[a] < candidates[b];
  });
  std::vector<int> kappa(candidates.size(), 0);
  for (std::size_t k = 0; k < count; ++k) kappa[order[k]] = 1;
  return kappa;
}

/// Area of the convex hull of `points` in km^2, on a local equirectangular
/// projection.
inline double convex_hull_area_km2(std::vector<GeoPoint> points) {
  if (points.size() < 3) return 0.0;
  double lat0 = 0.0;
  for (const auto& p : points) lat0 += p.lat;
  lat0 /= static_cast<double>(points.size());
  constexpr double kKmPerDeg = 6371.0088 * std::numbers::pi / 180.0;
  const double kx = kKmPerDeg * std::cos(lat0 * std::numbers::pi / 180.0);
  struct P {
    double x, y;
  };
  std::vector<P> pts;
  for (const auto& p : points) pts.push_back({p.lon * kx, p.lat * kKmPerDeg});
  std::sort(pts.begin(), pts.end(),
            [](const P& a, const P& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  auto cross = [](const P& o, const P& a, const P& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<P> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 0 ? k - 1 : 0);
  double area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const P& a = hull[i];
    const P& b = hull[(i + 1) % hull.size()];
    area += a.x * b.y - b.x * a.y;
  }
  return std::abs(area) / 2.0;
}

/// Station count for a density in stations/km^2, clamped to [1, limit].
inline std::size_t stations_for_density(double density, double area_km2, std::size_t limit) {
  const auto n = static_cast<long long>(std::llround(density * area_km2));
  return static_cast<std::size_t>(std::clamp<long long>(n, 1, static_cast<long long>(limit)));
}

// ---------------------------------------------------------------------------
// Configuration.

enum class SitingMode { kOptimal, kBetweenness };

inline const char* to_string(SitingMode m) {
  return m == SitingMode::kOptimal ? "optimal" : "betweenness";
}

struct ScenarioConfig {
  std::string graph_path;
  std::string trips_path;     ///< either trips ...
  std::string requests_path;  ///< ... or aggregated requests
  double window_s = 3600.0;
  std::vector<VehicleSpec> vehicles;
  PruneConfig prune;
  std::vector<NodeId> geo_nodes;  ///< explicit, or sampled when empty
  std::size_t geo_count = 8;
  std::vector<NodeId> candidates;  ///< defaults to every geo-node
  double station_power_w = 50000.0;
  double vehicle_power_w = 50000.0;
  std::vector<PoolingConfig> pooling{PoolingConfig{}};
  std::vector<double> densities;
  std::vector<std::size_t> station_counts;
  std::vector<SitingMode> siting{SitingMode::kOptimal};
  double detour_slack_s = 600.0;
  std::size_t node_limit = 100000;
  bool export_lp = false;
  std::string output_dir = "out";
  std::uint64_t seed = 1;

  void validate() const {
    if (graph_path.empty()) throw InvalidArgument("config needs a graph path");
    if (trips_path.empty() == requests_path.empty())
      throw InvalidArgument("config needs exactly one of trips or requests");
    for (const auto* p : {&graph_path, &trips_path, &requests_path})
      if (!p->empty() && !std::filesystem::exists(*p))
        throw InvalidArgument("file not found: " + *p);
    if (vehicles.empty()) throw InvalidArgument("config needs at least one vehicle");
    for (const auto& v : vehicles) v.validate();
    if (pooling.empty()) throw InvalidArgument("pooling grid is empty");
    for (const auto& p : pooling) p.validate();
    if (densities.empty() == station_counts.empty())
      throw InvalidArgument("config needs exactly one of densities or station counts");
    if (siting.empty()) throw InvalidArgument("siting mode list is empty");
    if (!(window_s > 0)) throw InvalidArgument("window must be positive");
    prune.validate();
  }
};

namespace detail {

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

}  // namespace detail

/// Parses a JSON configuration; relative paths resolve against `base_dir`.
inline ScenarioConfig scenario_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir) {
  ScenarioConfig c;
  c.graph_path = detail::resolve(base_dir, j.value("graph", ""));
  c.trips_path = detail::resolve(base_dir, j.value("trips", ""));
  c.requests_path = detail::resolve(base_dir, j.value("requests", ""));
  c.window_s = j.value("window_s", c.window_s);
  for (const auto& v : j.value("vehicles", nlohmann::json::array())) {
    if (v.is_string())
      c.vehicles.push_back(load_vehicle(detail::resolve(base_dir, v.get<std::string>())));
    else
      c.vehicles.push_back(vehicle_from_json(v));
  }
  if (j.contains("prune")) {
    const auto& p = j["prune"];
    c.prune.target_wh = p.value("target_wh", c.prune.target_wh);
    c.prune.ratio = p.value("ratio", c.prune.ratio);
    c.prune.batch = p.value("batch", c.prune.batch);
    c.prune.sample_pairs = p.value("sample_pairs", c.prune.sample_pairs);
  }
  c.geo_nodes = j.value("geo_nodes", c.geo_nodes);
  c.geo_count = j.value("geo_count", c.geo_count);
  c.candidates = j.value("candidates", c.candidates);
  c.station_power_w = j.value("station_power_w", c.station_power_w);
  c.vehicle_power_w = j.value("vehicle_power_w", c.vehicle_power_w);
  if (j.contains("pooling")) {
    c.pooling.clear();
    for (const auto& p : j["pooling"])
      c.pooling.push_back({p.value("max_wait_s", 0.0), p.value("max_delay_s", 0.0),
                           p.value("capacity", 2)});
  }
  c.densities = j.value("densities", c.densities);
  c.station_counts = j.value("stations", c.station_counts);
  if (j.contains("siting")) {
    c.siting.clear();
    for (const auto& s : j["siting"]) {
      const auto name = s.get<std::string>();
      if (name == "optimal")
        c.siting.push_back(SitingMode::kOptimal);
      else if (name == "betweenness")
        c.siting.push_back(SitingMode::kBetweenness);
      else
        throw InvalidArgument("unknown siting mode " + name);
    }
  }
  c.detour_slack_s = j.value("detour_slack_s", c.detour_slack_s);
  c.node_limit = j.value("node_limit", c.node_limit);
  c.export_lp = j.value("export_lp", c.export_lp);
  c.output_dir = detail::resolve(base_dir, j.value("output_dir", c.output_dir));
  c.seed = j.value("seed", c.seed);
  c.prune.seed = c.seed;
  return c;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
  return scenario_from_json(j, std::filesystem::path(path).parent_path());
}

// ---------------------------------------------------------------------------
// Reports.

struct RunRecord {
  std::size_t index = 0;
  std::string vehicle;
  SitingMode siting = SitingMode::kOptimal;
  std::size_t stations = 0;
  std::optional<double> density;
  double max_wait_s = 0.0;
  double max_delay_s = 0.0;
  std::string status;  ///< solver status, or "error"
  std::string error;
  double objective = kInf;  ///< busy vehicles (vehicle-hours per hour)
  FlowMetrics flows;
  std::vector<NodeId> sited;
  std::size_t bnb_nodes = 0;
  std::size_t equivalent_requests = 0;
  std::optional<double> pooling_savings;  ///< vs the unpooled run

  bool solved() const { return status == "optimal"; }
};

struct Report {
  std::vector<RunRecord> records;
  std::vector<std::string> check_failures;
  nlohmann::json extra = nlohmann::json::object();

  bool any_error() const {
    return std::any_of(records.begin(), records.end(),
                       [](const RunRecord& r) { return r.status == "error"; });
  }
};

namespace detail {

inline std::string fmt(double v) { return std::isfinite(v) ? format_double(v) : ""; }

template <typename T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += f(v[i]);
  }
  return s;
}

inline std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace detail

inline void write_report_csv(std::ostream& out, const Report& r) {
  out << "index,vehicle,siting,stations,density,max_wait_s,max_delay_s,status,"
         "objective_vehicles,fleet_size,user_energy_wh_per_h,rebalance_energy_wh_per_h,"
         "user_distance_km_per_h,rebalance_distance_km_per_h,station_power_w,sited,"
         "pooling_savings,equivalent_requests,bnb_nodes,error\n";
  for (const RunRecord& rec : r.records) {
    const bool ok = rec.solved();
    auto num = [&](double v) { return ok ? detail::fmt(v) : std::string(); };
    out << rec.index << ',' << detail::csv_field(rec.vehicle) << ','
        << to_string(rec.siting) << ',' << rec.stations << ','
        << (rec.density ? detail::fmt(*rec.density) : "") << ','
        << detail::fmt(rec.max_wait_s) << ',' << detail::fmt(rec.max_delay_s) << ','
        << rec.status << ',' << num(rec.objective) << ',' << num(rec.objective) << ','
        << num(rec.flows.user_energy_wh_s * 3600.0) << ','
        << num(rec.flows.rebalance_energy_wh_s * 3600.0) << ','
        << num(rec.flows.user_distance_m_s * 3.6) << ','
        << num(rec.flows.rebalance_distance_m_s * 3.6) << ','
        << (ok ? detail::join<double>(rec.flows.station_power_w,
                                      [](const double& v) {
                                        return detail::fmt(std::abs(v) < 1e-6 ? 0.0 : v);
                                      })
               : "")
        << ','
        << detail::join<NodeId>(rec.sited,
                                [](const NodeId& v) { return std::to_string(v); })
        << ',' << (rec.pooling_savings ? detail::fmt(*rec.pooling_savings) : "") << ','
        << rec.equivalent_requests << ',' << rec.bnb_nodes << ','
        << detail::csv_field(rec.error) << '\n';
  }
}

inline nlohmann::json report_to_json(const Report& r) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json runs = nlohmann::json::array();
  for (const RunRecord& rec : r.records) {
    nlohmann::json j{{"index", rec.index},
                     {"vehicle", rec.vehicle},
                     {"siting", to_string(rec.siting)},
                     {"stations", rec.stations},
                     {"max_wait_s", rec.max_wait_s},
                     {"max_delay_s", rec.max_delay_s},
                     {"status", rec.status},
                     {"sited", rec.sited},
                     {"bnb_nodes", rec.bnb_nodes},
                     {"equivalent_requests", rec.equivalent_requests}};
    if (rec.density) j["density"] = *rec.density;
    if (!rec.error.empty()) j["error"] = rec.error;
    if (rec.solved()) {
      j["objective_vehicles"] = num(rec.objective);
      j["user_energy_wh_per_h"] = num(rec.flows.user_energy_wh_s * 3600.0);
      j["rebalance_energy_wh_per_h"] = num(rec.flows.rebalance_energy_wh_s * 3600.0);
      j["user_distance_km_per_h"] = num(rec.flows.user_distance_m_s * 3.6);
      j["rebalance_distance_km_per_h"] = num(rec.flows.rebalance_distance_m_s * 3.6);
      j["station_power_w"] = rec.flows.station_power_w;
    }
    if (rec.pooling_savings) j["pooling_savings"] = *rec.pooling_savings;
    runs.push_back(std::move(j));
  }
  nlohmann::json out{{"runs", std::move(runs)}, {"check_failures", r.check_failures}};
  for (auto it = r.extra.begin(); it != r.extra.end(); ++it) out[it.key()] = it.value();
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline.

/// Worker count from PLAN_THREADS, default 1.
inline std::size_t plan_threads() {
  const char* env = std::getenv("PLAN_THREADS");
  if (!env) return 1;
  const long v = std::strtol(env, nullptr, 10);
  return v > 0 ? static_cast<std::size_t>(v) : 1;
}

/// Runs `count` independent tasks on up to `workers` threads.
template <typename F>
void parallel_for(std::size_t count, std::size_t workers, F task) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  for (auto& t : pool) t.join();
}

/// Deterministic sample of `count` surviving original ids, sorted.
inline std::vector<NodeId> sample_geo_nodes(const SyntheticGraph& g, std::size_t count,
                                            std::uint64_t seed) {
  std::vector<NodeId> ids;
  for (const auto& n : g.nodes)
    if (n.original >= 0) ids.push_back(n.original);
  std::sort(ids.begin(), ids.end());
  if (count >= ids.size()) return ids;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(count);
  std::sort(ids.begin(), ids.end());
  return ids;
}

/// Everything upstream of the grid: graph, pruning, demand.
struct PreparedScenario {
  RoadGraph graph;
  SyntheticGraph synth;
  PruneReport prune;
  std::vector<NodeId> geo_nodes;
  std::vector<NodeId> candidates;
  RequestSet requests;
  TravelTimes tt;
  double area_km2 = 0.0;
};

inline PreparedScenario prepare_scenario(const ScenarioConfig& cfg, const VehicleSpec& vehicle) {
  PreparedScenario s;
  const RoadGraph raw = load_road_graph(cfg.graph_path);
  s.graph = scale_energy(raw, vehicle);
  std::tie(s.synth, s.prune) = prune(s.graph, cfg.prune);
  s.geo_nodes = cfg.geo_nodes.empty() ? sample_geo_nodes(s.synth, cfg.geo_count, cfg.seed)
                                      : cfg.geo_nodes;
  s.candidates = cfg.candidates.empty() ? s.geo_nodes : cfg.candidates;
  if (!cfg.trips_path.empty()) {
    const TripLoad trips = load_trips(cfg.trips_path, s.graph);
    s.requests = aggregate_requests(trips.trips, s.graph, s.geo_nodes, cfg.window_s);
  } else {
    std::ifstream in(cfg.requests_path);
    s.requests = parse_requests_csv(in);
  }
  s.tt = travel_times(s.synth, s.geo_nodes);
  std::vector<GeoPoint> pts;
  for (const auto& n : s.graph.nodes()) pts.push_back(n.pos);
  s.area_km2 = convex_hull_area_km2(pts);
  return s;
}

struct GridPoint {
  std::size_t pool = 0;
  std::size_t stations = 0;
  std::optional<double> density;
  SitingMode siting = SitingMode::kOptimal;
};

/// Solves one grid point. Unsolved outcomes are reported through `status`.
inline RunRecord solve_point(const ScenarioConfig& cfg, const PreparedScenario& s,
                             const VehicleSpec& vehicle, const SyntheticGraph& synth,
                             const PoolingConfig& pool, std::size_t stations,
                             SitingMode siting, const std::string& lp_path = {}) {
  RunRecord rec;
  rec.vehicle = vehicle.name;
  rec.siting = siting;
  rec.stations = stations;
  rec.max_wait_s = pool.max_wait_s;
  rec.max_delay_s = pool.max_delay_s;
  const ChargingConfig charging{s.candidates, cfg.station_power_w, stations,
                                cfg.vehicle_power_w};
  const PooledRequestSet pooled = pool_requests(s.requests, s.tt, pool);
  rec.equivalent_requests = pooled.requests.size();
  auto graph = std::make_shared<const MultiLayerGraph>(
      build_multilayer(synth, vehicle, s.geo_nodes, charging));
  AssembleOptions opt;
  opt.detour_slack_s = cfg.detour_slack_s;
  const MilpInstance inst = assemble(graph, pooled.as_requests(), charging, opt);
  if (!lp_path.empty()) {
    std::ofstream out(lp_path);
    emit_lp_file(inst.problem, out);
  }
  MilpSolution sol;
  if (siting == SitingMode::kOptimal) {
    BranchOptions bo;
    bo.node_limit = cfg.node_limit;
    sol = branch_and_bound(inst, bo);
  } else {
    sol = solve_lp(inst, heuristic_siting(synth, s.candidates, stations));
  }
  rec.status = to_string(sol.status);
  rec.bnb_nodes = sol.nodes;
  for (std::size_t c = 0; c < sol.integers.size(); ++c)
    if (sol.integers[c]) rec.sited.push_back(s.candidates[c]);
  if (sol.status == SolveStatus::kOptimal) {
    const auto diag = validate_solution(inst, sol.values, 1e-6);
    if (!diag.ok)
      throw Error("solution violates " + diag.violations.front().name + " by " +
                  detail::format_double(diag.violations.front().residual));
    rec.objective = sol.objective;
    rec.flows = flow_metrics(inst, sol.values);
  }
  return rec;
}

namespace detail {

inline bool leq(double a, double b) { return a <= b + 1e-9 * std::max(1.0, std::abs(b)); }

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << s;
}

}  // namespace detail

/// Checks the ordering properties between runs and fills pooling savings.
inline void cross_check(Report& report) {
  using Key = std::tuple<std::string, int, std::size_t>;
  std::map<Key, const RunRecord*> unpooled;
  for (const auto& r : report.records)
    if (r.max_wait_s == 0.0 && r.max_delay_s == 0.0 && r.solved())
      unpooled[{r.vehicle, static_cast<int>(r.siting), r.stations}] = &r;
  for (auto& r : report.records) {
    if (!r.solved()) continue;
    auto it = unpooled.find({r.vehicle, static_cast<int>(r.siting), r.stations});
    if (it == unpooled.end()) continue;
    const double base = it->second->objective;
    r.pooling_savings = base > 0 ? (base - r.objective) / base : 0.0;
    if (!detail::leq(r.objective, base))
      report.check_failures.push_back("run " + std::to_string(r.index) +
                                      ": pooled objective exceeds unpooled");
  }
  for (const auto& a : report.records)
    for (const auto& b : report.records) {
      if (!a.solved() || a.vehicle != b.vehicle || a.max_wait_s != b.max_wait_s ||
          a.max_delay_s != b.max_delay_s)
        continue;
      if (a.siting == SitingMode::kOptimal && b.siting == SitingMode::kBetweenness &&
          a.stations == b.stations && b.solved() && !detail::leq(a.objective, b.objective))
        report.check_failures.push_back("run " + std::to_string(a.index) +
                                        ": optimal siting worse than betweenness run " +
                                        std::to_string(b.index));
      if (a.siting == SitingMode::kOptimal && b.siting == SitingMode::kOptimal &&
          a.stations < b.stations && (!b.solved() || !detail::leq(b.objective, a.objective)))
        report.check_failures.push_back("run " + std::to_string(b.index) +
                                        ": more stations increased the objective");
    }
}

/// Full pipeline for the first vehicle of the config. Writes report.csv,
/// report.json, siting.csv, pooling.csv, synthetic.csv and requests.csv into
/// the output directory. A grid point that fails is recorded and skipped.
inline Report run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const VehicleSpec& vehicle = cfg.vehicles.front();
  const PreparedScenario s = prepare_scenario(cfg, vehicle);
  const std::filesystem::path out_dir(cfg.output_dir);
  std::filesystem::create_directories(out_dir);

  std::vector<PoolingConfig> pools = cfg.pooling;
  if (std::none_of(pools.begin(), pools.end(), [](const PoolingConfig& p) {
        return p.max_wait_s == 0.0 && p.max_delay_s == 0.0;
      }))
    pools.insert(pools.begin(), PoolingConfig{});

  std::vector<GridPoint> grid;
  for (std::size_t p = 0; p < pools.size(); ++p)
    for (SitingMode mode : cfg.siting) {
      if (!cfg.densities.empty()) {
        for (double d : cfg.densities)
          grid.push_back(
              {p, stations_for_density(d, s.area_km2, s.candidates.size()), d, mode});
      } else {
        for (std::size_t n : cfg.station_counts) grid.push_back({p, n, std::nullopt, mode});
      }
    }

  Report report;
  report.records.resize(grid.size());
  parallel_for(grid.size(), plan_threads(), [&](std::size_t i) {
    const GridPoint& gp = grid[i];
    RunRecord rec;
    try {
      const std::string lp =
          cfg.export_lp ? (out_dir / ("instance_" + std::to_string(i) + ".lp")).string()
                        : std::string();
      rec = solve_point(cfg, s, vehicle, s.synth, pools[gp.pool], gp.stations, gp.siting, lp);
    } catch (const std::exception& e) {
      rec.vehicle = vehicle.name;
      rec.siting = gp.siting;
      rec.stations = gp.stations;
      rec.max_wait_s = pools[gp.pool].max_wait_s;
      rec.max_delay_s = pools[gp.pool].max_delay_s;
      rec.status = "error";
      rec.error = e.what();
    }
    rec.index = i;
    rec.density = gp.density;
    report.records[i] = std::move(rec);
  });
  cross_check(report);

  report.extra["prune"] = prune_report_to_json(s.prune);
  report.extra["prune"].erase("trace");
  report.extra["prune"].erase("sample");
  report.extra["geo_nodes"] = s.geo_nodes;
  report.extra["candidates"] = s.candidates;
  report.extra["area_km2"] = s.area_km2;
  report.extra["requests"] = s.requests.size();

  std::ostringstream csv;
  write_report_csv(csv, report);
  detail::write_text(out_dir / "report.csv", csv.str());
  detail::write_text(out_dir / "report.json", report_to_json(report).dump(2) + "\n");

  std::ostringstream siting, pooling;
  siting << "siting,stations,density,max_wait_s,max_delay_s,objective_vehicles,"
            "rebalance_energy_wh_per_h\n";
  pooling << "max_wait_s,max_delay_s,siting,stations,objective_vehicles,pooling_savings\n";
  for (const auto& r : report.records) {
    if (!r.solved()) continue;
    siting << to_string(r.siting) << ',' << r.stations << ','
           << (r.density ? detail::fmt(*r.density) : "") << ',' << detail::fmt(r.max_wait_s)
           << ',' << detail::fmt(r.max_delay_s) << ',' << detail::fmt(r.objective) << ','
           << detail::fmt(r.flows.rebalance_energy_wh_s * 3600.0) << '\n';
    pooling << detail::fmt(r.max_wait_s) << ',' << detail::fmt(r.max_delay_s) << ','
            << to_string(r.siting) << ',' << r.stations << ',' << detail::fmt(r.objective)
            << ',' << (r.pooling_savings ? detail::fmt(*r.pooling_savings) : "") << '\n';
  }
  detail::write_text(out_dir / "siting.csv", siting.str());
  detail::write_text(out_dir / "pooling.csv", pooling.str());
  std::ostringstream synth, req;
  write_synthetic_csv(synth, s.synth);
  write_requests_csv(req, s.requests);
  detail::write_text(out_dir / "synthetic.csv", synth.str());
  detail::write_text(out_dir / "requests.csv", req.str());
  return report;
}

/// Per-vehicle summary of a comparison run.
struct VehicleSummary {
  std::string name;
  double energy_scale = 1.0;
  double battery_wh = 0.0;
  std::size_t layers = 0;
  bool below_threshold = false;  ///< rebalancing distance differs from the reference
};

/// Runs every vehicle on one pruned topology at the first pooling point,
/// station count and siting mode of the config. Each vehicle's energy
/// quantum is the prune target times its energy scale. The vehicle with the
/// most layers is the reference; vehicles whose rebalancing distance differs
/// from it are flagged as below the no-detour battery threshold.
inline Report compare_vehicles(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.vehicles.size() < 2) throw InvalidArgument("comparison needs at least two vehicles");
  VehicleSpec reference_vehicle = cfg.vehicles.front();
  reference_vehicle.energy_scale = 1.0;
  const PreparedScenario s = prepare_scenario(cfg, reference_vehicle);
  const std::size_t stations =
      cfg.densities.empty()
          ? cfg.station_counts.front()
          : stations_for_density(cfg.densities.front(), s.area_km2, s.candidates.size());

  Report report;
  std::vector<VehicleSummary> summary;
  report.records.resize(cfg.vehicles.size());
  for (std::size_t i = 0; i < cfg.vehicles.size(); ++i) {
    const VehicleSpec& v = cfg.vehicles[i];
    SyntheticGraph synth = s.synth;
    synth.quantum_wh = s.synth.quantum_wh * v.energy_scale;
    VehicleSummary vs{v.name, v.energy_scale, v.battery_wh, 0, false};
    RunRecord rec;
    try {
      vs.layers = layer_count(v.battery_wh, synth.quantum_wh);
      rec = solve_point(cfg, s, v, synth, cfg.pooling.front(), stations, cfg.siting.front());
    } catch (const std::exception& e) {
      rec.vehicle = v.name;
      rec.status = "error";
      rec.error = e.what();
    }
    rec.index = i;
    report.records[i] = std::move(rec);
    summary.push_back(vs);
  }
  std::size_t ref = 0;
  for (std::size_t i = 1; i < summary.size(); ++i)
    if (summary[i].layers > summary[ref].layers) ref = i;
  const double ref_dist = report.records[ref].flows.rebalance_distance_m_s;
  nlohmann::json vehicles = nlohmann::json::array();
  for (std::size_t i = 0; i < summary.size(); ++i) {
    const auto& rec = report.records[i];
    summary[i].below_threshold =
        !rec.solved() || std::abs(rec.flows.rebalance_distance_m_s - ref_dist) >
                             1e-6 * std::max(1.0, std::abs(ref_dist));
    vehicles.push_back({{"name", summary[i].name},
                        {"energy_scale", summary[i].energy_scale},
                        {"battery_wh", summary[i].battery_wh},
                        {"layers", summary[i].layers},
                        {"below_threshold", summary[i].below_threshold}});
  }
  report.extra["vehicles"] = std::move(vehicles);
  report.extra["reference_vehicle"] = summary[ref].name;

  const std::filesystem::path out_dir(cfg.output_dir);
  std::filesystem::create_directories(out_dir);
  std::ostringstream csv;
  write_report_csv(csv, report);
  detail::write_text(out_dir / "compare.csv", csv.str());
  detail::write_text(out_dir / "compare.json", report_to_json(report).dump(2) + "\n");
  return report;
}

}  // namespace eamod
