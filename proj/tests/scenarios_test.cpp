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


#include "eamod/scenarios.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "test_util.hpp"

namespace eamod {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() /
            ("eamod_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void WriteFile(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SyntheticGraph TwoWay(std::size_t n, const std::vector<std::tuple<int, int, double>>& links) {
  SyntheticGraph g;
  g.quantum_wh = 100.0;
  for (std::size_t i = 0; i < n; ++i)
    g.nodes.push_back({{40.0, -74.0 + 0.001 * static_cast<double>(i)},
                       static_cast<NodeId>(i)});
  for (auto [a, b, t] : links) {
    g.arcs.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b), t, 100.0});
    g.arcs.push_back({static_cast<std::size_t>(b), static_cast<std::size_t>(a), t, 100.0});
  }
  return g;
}

std::vector<NodeId> AllIds(const SyntheticGraph& g) {
  std::vector<NodeId> ids;
  for (const auto& n : g.nodes) ids.push_back(n.original);
  return ids;
}

TEST(BetweennessTest, StarHubFirst) {
  const SyntheticGraph g = TwoWay(5, {{0, 1, 10}, {0, 2, 20}, {0, 3, 30}, {0, 4, 40}});
  const auto cb = betweenness(g);
  EXPECT_DOUBLE_EQ(cb[0], 12.0);
  for (int leaf = 1; leaf < 5; ++leaf) EXPECT_DOUBLE_EQ(cb[leaf], 0.0);
  EXPECT_EQ(heuristic_siting(g, {1, 2, 0, 3}, 1), (std::vector<int>{0, 0, 1, 0}));
}

TEST(BetweennessTest, PathMiddleNode) {
  const SyntheticGraph g = TwoWay(5, {{0, 1, 60}, {1, 2, 60}, {2, 3, 60}, {3, 4, 60}});
  const auto cb = betweenness(g);
  EXPECT_EQ(cb, (std::vector<double>{0, 6, 8, 6, 0}));
  EXPECT_EQ(heuristic_siting(g, AllIds(g), 1), (std::vector<int>{0, 0, 1, 0, 0}));
}

TEST(BetweennessTest, EqualPathsShareCredit) {
  // Square: 0 and 2 are joined by two equal paths through 1 and 3.
  const SyntheticGraph g = TwoWay(4, {{0, 1, 50}, {1, 2, 50}, {2, 3, 50}, {3, 0, 50}});
  EXPECT_EQ(betweenness(g), (std::vector<double>{1, 1, 1, 1}));
  EXPECT_EQ(heuristic_siting(g, {3, 2, 1, 0}, 2), (std::vector<int>{0, 0, 1, 1}));
}

TEST(BetweennessTest, RandomGraphMatchesPathEnumeration) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    const SyntheticGraph g = testing::ring_synthetic(30, rng);
    const auto cb = betweenness(g);
    const auto oracle = testing::brute_force_betweenness(g);
    ASSERT_EQ(cb.size(), oracle.size());
    for (std::size_t v = 0; v < cb.size(); ++v)
      EXPECT_NEAR(cb[v], oracle[v], 1e-9 * std::max(1.0, oracle[v])) << "seed " << seed;

    const std::vector<NodeId> candidates = AllIds(g);
    for (std::size_t count : {1u, 3u, 8u}) {
      std::vector<std::size_t> order(oracle.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return oracle[a] > oracle[b] + 1e-9; });
      std::vector<int> expected(candidates.size(), 0);
      for (std::size_t k = 0; k < count; ++k) expected[order[k]] = 1;
      EXPECT_EQ(heuristic_siting(g, candidates, count), expected) << "seed " << seed;
    }
  }
}

TEST(BetweennessTest, SitingRejectsBadInput) {
  const SyntheticGraph g = TwoWay(3, {{0, 1, 10}, {1, 2, 10}});
  EXPECT_THROW(heuristic_siting(g, {0, 1}, 3), InvalidArgument);
  EXPECT_THROW(heuristic_siting(g, {0, 7}, 1), InvalidArgument);
  EXPECT_EQ(heuristic_siting(g, {0, 1}, 0), (std::vector<int>{0, 0}));
}

TEST(AreaTest, RectangleAndDegenerateSets) {
  const double lat = 40.0;
  const double km_per_deg = 6371.0088 * std::numbers::pi / 180.0;
  const double expected =
      (0.01 * km_per_deg) * (0.02 * km_per_deg * std::cos(lat * std::numbers::pi / 180.0));
  std::vector<GeoPoint> rect{{lat - 0.005, -74.01}, {lat + 0.005, -74.01},
                             {lat + 0.005, -73.99}, {lat - 0.005, -73.99}};
  EXPECT_NEAR(convex_hull_area_km2(rect), expected, 1e-9);
  rect.push_back({lat, -74.0});
  rect.push_back({lat, -74.005});
  EXPECT_NEAR(convex_hull_area_km2(rect), expected, 1e-9);
  EXPECT_EQ(convex_hull_area_km2({{40, -74}, {40.01, -74}}), 0.0);
  EXPECT_NEAR(convex_hull_area_km2({{40, -74}, {40.01, -74}, {40.02, -74}}), 0.0, 1e-12);
}

TEST(AreaTest, StationsForDensity) {
  EXPECT_EQ(stations_for_density(0.5, 4.0, 10), 2u);
  EXPECT_EQ(stations_for_density(0.5, 5.0, 10), 3u);
  EXPECT_EQ(stations_for_density(0.01, 4.0, 10), 1u);
  EXPECT_EQ(stations_for_density(10.0, 4.0, 6), 6u);
}

TEST(ConfigTest, ParsesAndResolvesPaths) {
  TempDir dir("cfg");
  WriteFile(dir.path() / "g.csv", "#nodes\nid,lat,lon\n");
  WriteFile(dir.path() / "r.csv", "origin,destination,rate_per_h\n");
  const auto j = nlohmann::json::parse(R"({
    "graph": "g.csv", "requests": "r.csv",
    "vehicles": [{"name": "v", "energy_scale": 0.9, "battery_wh": 500, "seats": 2}],
    "prune": {"target_wh": 50, "ratio": 0.5},
    "pooling": [{"max_wait_s": 120, "max_delay_s": 60}],
    "stations": [1, 2], "siting": ["betweenness", "optimal"],
    "geo_nodes": [4, 5], "output_dir": "out", "seed": 9})");
  const ScenarioConfig c = scenario_from_json(j, dir.path());
  EXPECT_EQ(c.graph_path, (dir.path() / "g.csv").string());
  EXPECT_EQ(c.output_dir, (dir.path() / "out").string());
  EXPECT_TRUE(c.trips_path.empty());
  ASSERT_EQ(c.vehicles.size(), 1u);
  EXPECT_EQ(c.vehicles[0].energy_scale, 0.9);
  EXPECT_EQ(c.prune.target_wh, 50.0);
  EXPECT_EQ(c.prune.seed, 9u);
  ASSERT_EQ(c.pooling.size(), 1u);
  EXPECT_EQ(c.pooling[0].max_wait_s, 120.0);
  EXPECT_EQ(c.station_counts, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(c.siting, (std::vector<SitingMode>{SitingMode::kBetweenness, SitingMode::kOptimal}));
  EXPECT_EQ(c.geo_nodes, (std::vector<NodeId>{4, 5}));
  EXPECT_NO_THROW(c.validate());
}

TEST(ConfigTest, RejectsInvalidConfigs) {
  TempDir dir("bad");
  WriteFile(dir.path() / "g.csv", "");
  WriteFile(dir.path() / "r.csv", "");
  const auto base = nlohmann::json::parse(R"({
    "graph": "g.csv", "requests": "r.csv",
    "vehicles": [{"name": "v", "energy_scale": 1.0, "battery_wh": 500, "seats": 2}],
    "stations": [1]})");
  EXPECT_NO_THROW(scenario_from_json(base, dir.path()).validate());

  auto expect_invalid = [&](nlohmann::json j) {
    EXPECT_THROW(scenario_from_json(j, dir.path()).validate(), Error) << j.dump();
  };
  auto j = base;
  j["graph"] = "missing.csv";
  expect_invalid(j);
  j = base;
  j["trips"] = "g.csv";
  expect_invalid(j);
  j = base;
  j.erase("requests");
  expect_invalid(j);
  j = base;
  j["vehicles"] = nlohmann::json::array();
  expect_invalid(j);
  j = base;
  j["densities"] = {0.1};
  expect_invalid(j);
  j = base;
  j["pooling"] = nlohmann::json::array();
  expect_invalid(j);
  j = base;
  j["pooling"] = {{{"max_wait_s", 60}, {"max_delay_s", 60}, {"capacity", 4}}};
  EXPECT_THROW(scenario_from_json(j, dir.path()).validate(), Unsupported);
  j = base;
  j["prune"] = {{"ratio", 1.0}};
  expect_invalid(j);
  j = base;
  j["siting"] = {"random"};
  EXPECT_THROW(scenario_from_json(j, dir.path()), InvalidArgument);
  EXPECT_THROW(load_scenario((dir.path() / "nope.json").string()), InvalidArgument);
  WriteFile(dir.path() / "broken.json", "{\"graph\": ");
  EXPECT_THROW(load_scenario((dir.path() / "broken.json").string()), InvalidArgument);
}

TEST(PipelineTest, GeoSampleIsSortedAndSeeded) {
  std::mt19937_64 rng(3);
  const SyntheticGraph g = testing::ring_synthetic(20, rng);
  const auto a = sample_geo_nodes(g, 6, 11);
  EXPECT_EQ(a, sample_geo_nodes(g, 6, 11));
  EXPECT_EQ(a.size(), 6u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  EXPECT_EQ(sample_geo_nodes(g, 50, 11).size(), 20u);
}

TEST(PipelineTest, ParallelForVisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(97);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, 4, [&](std::size_t) { FAIL(); });
}

TEST(CrossCheckTest, SavingsAndOrderingChecks) {
  auto rec = [](std::size_t idx, SitingMode mode, std::size_t n, double wait, double obj) {
    RunRecord r;
    r.index = idx;
    r.vehicle = "v";
    r.siting = mode;
    r.stations = n;
    r.max_wait_s = r.max_delay_s = wait;
    r.status = "optimal";
    r.objective = obj;
    return r;
  };
  Report ok;
  ok.records = {rec(0, SitingMode::kOptimal, 1, 0, 2.0), rec(1, SitingMode::kOptimal, 2, 0, 1.5),
                rec(2, SitingMode::kBetweenness, 1, 0, 2.5),
                rec(3, SitingMode::kOptimal, 1, 600, 1.5)};
  cross_check(ok);
  EXPECT_TRUE(ok.check_failures.empty());
  EXPECT_DOUBLE_EQ(*ok.records[0].pooling_savings, 0.0);
  EXPECT_DOUBLE_EQ(*ok.records[3].pooling_savings, 0.25);

  Report bad;
  bad.records = {rec(0, SitingMode::kOptimal, 1, 0, 2.0), rec(1, SitingMode::kOptimal, 2, 0, 2.5),
                 rec(2, SitingMode::kBetweenness, 1, 0, 1.0),
                 rec(3, SitingMode::kOptimal, 1, 600, 2.2)};
  cross_check(bad);
  EXPECT_EQ(bad.check_failures.size(), 3u);
}

TEST(ReportTest, CsvQuotesErrorsAndLeavesUnsolvedBlank) {
  Report r;
  RunRecord a;
  a.vehicle = "v";
  a.status = "error";
  a.error = "bad \"thing\", twice";
  r.records.push_back(a);
  std::ostringstream out;
  write_report_csv(out, r);
  const std::string csv = out.str();
  EXPECT_NE(csv.find("\"bad \"\"thing\"\", twice\""), std::string::npos);
  EXPECT_NE(csv.find(",error,,,"), std::string::npos);
  const auto j = report_to_json(r);
  EXPECT_EQ(j["runs"][0]["status"], "error");
  EXPECT_FALSE(j["runs"][0].contains("objective_vehicles"));
}

// Energy of a solution recounted from layer indices: every traversal that
// moves a vehicle one layer down costs one quantum.
TEST(MetricsTest, EnergyMatchesLayerRecount) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto inst_data = testing::random_instance(seed, 6, 4);
    const MilpInstance inst =
        assemble(inst_data.graph, inst_data.requests.requests, inst_data.charging);
    const MilpSolution sol = branch_and_bound(inst);
    if (sol.status != SolveStatus::kOptimal) continue;
    const MultiLayerGraph& g = *inst_data.graph;
    auto descends = [&](const MultiLayerGraph::Arc& a) {
      return !g.is_geo_node(a.tail) && !g.is_geo_node(a.head) &&
             g.layer_of(a.head) == g.layer_of(a.tail) + 1;
    };
    double user = 0.0, rebalance = 0.0;
    for (const auto& vars : inst.user_vars)
      for (auto [a, v] : vars)
        if (descends(g.arcs()[a])) user += sol.values[v];
    for (std::size_t a = 0; a < g.arc_count(); ++a)
      if (descends(g.arcs()[a])) rebalance += sol.values[inst.rebalance_var[a]];
    const FlowMetrics f = flow_metrics(inst, sol.values);
    EXPECT_NEAR(f.user_energy_wh_s, g.quantum_wh() * user, 1e-6 * f.user_energy_wh_s);
    EXPECT_NEAR(f.rebalance_energy_wh_s, g.quantum_wh() * rebalance,
                1e-6 * std::max(1e-9, f.rebalance_energy_wh_s));
    EXPECT_GT(f.user_energy_wh_s, 0.0);
  }
}

// Line A(1) - 5 - 6 - B(2), 300 m and 100 Wh per hop, with charging spurs
// S1(3) next to A and S2(4) next to B.
std::string SpurGraphCsv() {
  return "#nodes\nid,lat,lon\n"
         "1,40.7000,-74.0000\n5,40.7000,-73.9965\n6,40.7000,-73.9930\n2,40.7000,-73.9895\n"
         "3,40.7005,-74.0000\n4,40.7010,-73.9895\n"
         "#arcs\ntail,head,dist_m,time_s,energy_wh\n"
         "1,5,300,30,100\n5,1,300,30,100\n5,6,300,30,100\n6,5,300,30,100\n"
         "6,2,300,30,100\n2,6,300,30,100\n"
         "1,3,50,10,100\n3,1,50,10,100\n2,4,100,20,100\n4,2,100,20,100\n";
}

nlohmann::json SpurConfig(const fs::path& dir) {
  WriteFile(dir / "graph.csv", SpurGraphCsv());
  WriteFile(dir / "requests.csv", "origin,destination,rate_per_h\n1,2,1\n");
  return nlohmann::json{{"graph", "graph.csv"},
                        {"requests", "requests.csv"},
                        {"prune", {{"target_wh", 100}, {"ratio", 0.1}}},
                        {"geo_nodes", {1, 2, 3, 4}},
                        {"candidates", {3, 4}},
                        {"stations", {2}},
                        {"siting", {"optimal"}},
                        {"output_dir", "out"}};
}

nlohmann::json Vehicle(const std::string& name, double scale, double battery) {
  return {{"name", name}, {"energy_scale", scale}, {"battery_wh", battery}, {"seats", 2}};
}

TEST(CompareVehiclesTest, SmallBatteryForcesChargingDetour) {
  TempDir dir("spur");
  auto j = SpurConfig(dir.path());
  j["vehicles"] = {Vehicle("large", 1.0, 800), Vehicle("small", 1.0, 500)};
  const Report r = compare_vehicles(scenario_from_json(j, dir.path()));
  ASSERT_EQ(r.records.size(), 2u);
  ASSERT_TRUE(r.records[0].solved());
  ASSERT_TRUE(r.records[1].solved());
  // Large: B -> A -> S1 -> A; small: B -> S2 -> B -> A -> S1 -> A.
  EXPECT_NEAR(r.records[0].flows.rebalance_distance_m_s * 3600.0, 1000.0, 1e-6);
  EXPECT_NEAR(r.records[1].flows.rebalance_distance_m_s * 3600.0, 1200.0, 1e-6);
  EXPECT_NEAR(r.records[0].flows.user_distance_m_s * 3600.0, 900.0, 1e-6);
  EXPECT_NEAR(r.records[0].flows.rebalance_energy_wh_s * 3600.0, 500.0, 1e-6);
  EXPECT_NEAR(r.records[1].flows.rebalance_energy_wh_s * 3600.0, 700.0, 1e-6);
  EXPECT_EQ(r.extra["reference_vehicle"], "large");
  EXPECT_FALSE(r.extra["vehicles"][0]["below_threshold"].get<bool>());
  EXPECT_TRUE(r.extra["vehicles"][1]["below_threshold"].get<bool>());
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "compare.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "compare.json"));
}

TEST(CompareVehiclesTest, EnergyScalesWithVehicleEfficiency) {
  TempDir dir("scale");
  auto j = SpurConfig(dir.path());
  j["vehicles"] = {Vehicle("light", 0.85, 2000), Vehicle("base", 1.0, 2000),
                   Vehicle("base_copy", 1.0, 2000)};
  const Report r = compare_vehicles(scenario_from_json(j, dir.path()));
  ASSERT_EQ(r.records.size(), 3u);
  for (const auto& rec : r.records) ASSERT_TRUE(rec.solved()) << rec.vehicle;
  const auto& light = r.records[0].flows;
  const auto& base = r.records[1].flows;
  EXPECT_NEAR(light.user_energy_wh_s / base.user_energy_wh_s, 0.85, 1e-9);
  EXPECT_NEAR(light.rebalance_energy_wh_s / base.rebalance_energy_wh_s, 0.85, 1e-9);
  EXPECT_NEAR(light.rebalance_distance_m_s, base.rebalance_distance_m_s, 1e-12);
  for (std::size_t k = 0; k < 3; ++k)
    EXPECT_FALSE(r.extra["vehicles"][k]["below_threshold"].get<bool>());

  Report a = r, b = r;
  a.records = {r.records[1]};
  b.records = {r.records[2]};
  b.records[0].vehicle = a.records[0].vehicle;
  b.records[0].index = a.records[0].index;
  std::ostringstream ca, cb;
  write_report_csv(ca, a);
  write_report_csv(cb, b);
  EXPECT_EQ(ca.str(), cb.str());
}

TEST(CompareVehiclesTest, NeedsTwoVehicles) {
  TempDir dir("one");
  auto j = SpurConfig(dir.path());
  j["vehicles"] = {Vehicle("only", 1.0, 800)};
  EXPECT_THROW(compare_vehicles(scenario_from_json(j, dir.path())), InvalidArgument);
}

TEST(RunScenarioTest, GridPropertiesAndOutputs) {
  TempDir dir("run");
  auto j = SpurConfig(dir.path());
  WriteFile(dir.path() / "requests.csv",
            "origin,destination,rate_per_h\n1,2,3\n2,1,2\n3,4,1\n1,4,2\n");
  j["vehicles"] = {Vehicle("v", 1.0, 1200)};
  j["pooling"] = {{{"max_wait_s", 0}, {"max_delay_s", 0}},
                  {{"max_wait_s", 600}, {"max_delay_s", 600}}};
  j["stations"] = {1, 2};
  j["siting"] = {"optimal", "betweenness"};
  const Report r = run_scenario(scenario_from_json(j, dir.path()));
  ASSERT_EQ(r.records.size(), 8u);
  EXPECT_TRUE(r.check_failures.empty());
  for (const auto& rec : r.records) {
    ASSERT_TRUE(rec.solved()) << rec.index << " " << rec.status << " " << rec.error;
    ASSERT_TRUE(rec.pooling_savings.has_value());
    if (rec.max_wait_s == 0.0) {
      EXPECT_EQ(*rec.pooling_savings, 0.0);
    } else {
      EXPECT_GE(*rec.pooling_savings, -1e-9);
    }
  }
  for (const auto& a : r.records)
    for (const auto& b : r.records) {
      if (a.max_wait_s != b.max_wait_s) continue;
      if (a.siting == SitingMode::kOptimal && b.stations == a.stations) {
        EXPECT_LE(a.objective, b.objective + 1e-9);
      }
      if (a.siting == b.siting && a.siting == SitingMode::kOptimal && a.stations < b.stations) {
        EXPECT_LE(b.objective, a.objective + 1e-9);
      }
    }
  for (const char* f : {"report.csv", "report.json", "siting.csv", "pooling.csv",
                        "synthetic.csv", "requests.csv"})
    EXPECT_TRUE(fs::exists(dir.path() / "out" / f)) << f;
  const auto report = nlohmann::json::parse(ReadFile(dir.path() / "out" / "report.json"));
  EXPECT_EQ(report["runs"].size(), 8u);
  EXPECT_EQ(report["requests"], 4);
}

TEST(RunScenarioTest, UnpooledBaselineAddedAndFailuresIsolated) {
  TempDir dir("partial");
  auto j = SpurConfig(dir.path());
  j["vehicles"] = {Vehicle("v", 1.0, 800)};
  j["pooling"] = {{{"max_wait_s", 300}, {"max_delay_s", 300}}};
  j["stations"] = {1, 3};
  j["siting"] = {"betweenness"};
  const Report r = run_scenario(scenario_from_json(j, dir.path()));
  ASSERT_EQ(r.records.size(), 4u);
  EXPECT_EQ(r.records[0].max_wait_s, 0.0);
  EXPECT_TRUE(r.records[0].solved());
  EXPECT_EQ(r.records[1].status, "error");
  EXPECT_NE(r.records[1].error.find("station cap"), std::string::npos)
      << r.records[1].error;
  EXPECT_TRUE(r.records[2].solved());
  EXPECT_EQ(r.records[3].status, "error");
  EXPECT_TRUE(r.any_error());
}

#if defined(PLAN_BINARY) && defined(EAMOD_DATA_DIR)
int RunPlan(const std::string& args) {
  const std::string cmd = std::string(PLAN_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, RunIsDeterministic) {
  TempDir dir("cli");
  auto j = nlohmann::json::parse(ReadFile(fs::path(EAMOD_DATA_DIR) / "run.json"));
  j["graph"] = (fs::path(EAMOD_DATA_DIR) / "graph.csv").string();
  j["trips"] = (fs::path(EAMOD_DATA_DIR) / "trips.csv").string();
  j["vehicles"] = {Vehicle("4-seater", 0.93, 600)};
  j["pooling"] = {{{"max_wait_s", 600}, {"max_delay_s", 600}}};
  j["stations"] = {1};
  std::vector<std::string> csv;
  for (const char* name : {"a", "b"}) {
    j["output_dir"] = (dir.path() / name).string();
    const fs::path cfg = dir.path() / (std::string(name) + ".json");
    WriteFile(cfg, j.dump());
    ASSERT_EQ(RunPlan("run --config " + cfg.string()), 0);
    csv.push_back(ReadFile(dir.path() / name / "report.csv"));
  }
  EXPECT_FALSE(csv[0].empty());
  EXPECT_EQ(csv[0], csv[1]);
  EXPECT_EQ(ReadFile(dir.path() / "a" / "synthetic.csv"),
            ReadFile(dir.path() / "b" / "synthetic.csv"));
}

TEST(CliTest, ExitCodes) {
  TempDir dir("codes");
  auto j = SpurConfig(dir.path());
  j["vehicles"] = {Vehicle("v", 1.0, 800)};
  j["stations"] = {1, 3};
  j["siting"] = {"betweenness"};
  WriteFile(dir.path() / "partial.json", j.dump());
  EXPECT_EQ(RunPlan("run --config " + (dir.path() / "partial.json").string()), 2);
  j["stations"] = {1};
  WriteFile(dir.path() / "ok.json", j.dump());
  EXPECT_EQ(RunPlan("run --config " + (dir.path() / "ok.json").string()), 0);
  EXPECT_EQ(RunPlan("run --config " + (dir.path() / "missing.json").string()), 1);
  EXPECT_NE(RunPlan("bogus"), 0);

  const fs::path pooled = dir.path() / "pooled.csv";
  ASSERT_EQ(RunPlan("prune --graph " + (dir.path() / "graph.csv").string() +
                    " --target-wh 100 --ratio 0.1 --out " + (dir.path() / "s.csv").string()),
            0);
  EXPECT_EQ(RunPlan("pool --requests " + (dir.path() / "requests.csv").string() + " --graph " +
                    (dir.path() / "s.csv").string() + " --twait 600 --tdelay 600 --out " +
                    pooled.string()),
            0);
  EXPECT_TRUE(fs::exists(pooled));
}
#endif

}  // namespace
}  // namespace eamod
