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


#include "eamod/solve.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "eamod/scenarios.hpp"
#include "test_util.hpp"

namespace eamod {
namespace {

// Optimum over every station vector with at most N open stations, each
// solved as an LP with the stations fixed.
std::optional<double> EnumerateKappa(const MilpInstance& inst) {
  const std::size_t c = inst.station_var.size();
  std::optional<double> best;
  for (std::size_t mask = 0; mask < (1u << c); ++mask) {
    std::vector<int> kappa(c);
    std::size_t open = 0;
    for (std::size_t k = 0; k < c; ++k) open += kappa[k] = (mask >> k) & 1;
    if (open > inst.charging.max_stations) continue;
    const MilpSolution s = solve_lp(inst, kappa);
    if (s.status == SolveStatus::kOptimal && (!best || s.objective < *best))
      best = s.objective;
  }
  return best;
}

TEST(BranchAndBoundTest, MatchesStationEnumeration) {
  int feasible = 0, infeasible = 0;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    const auto r = testing::random_instance(seed, 8, 6, 1 + seed % 2);
    const MilpInstance inst = assemble(r.graph, r.requests.requests, r.charging);
    const MilpSolution s = branch_and_bound(inst);
    const auto oracle = EnumerateKappa(inst);
    if (!oracle) {
      EXPECT_EQ(s.status, SolveStatus::kInfeasible) << "seed " << seed;
      ++infeasible;
      continue;
    }
    ++feasible;
    ASSERT_EQ(s.status, SolveStatus::kOptimal) << "seed " << seed;
    EXPECT_NEAR(s.objective, *oracle, 1e-7 * std::max(1.0, *oracle)) << "seed " << seed;
    EXPECT_TRUE(validate_solution(inst, s.values, 1e-6).ok);
    std::size_t open = 0;
    for (int k : s.integers) {
      EXPECT_TRUE(k == 0 || k == 1);
      open += k;
    }
    EXPECT_LE(open, r.charging.max_stations);
  }
  EXPECT_GE(feasible, 4);
  RecordProperty("infeasible", infeasible);
}

TEST(BranchAndBoundTest, Sandwich) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto r = testing::random_instance(seed, 8, 6, 1);
    const MilpInstance inst = assemble(r.graph, r.requests.requests, r.charging);
    const MilpSolution relaxed = solve_lp(inst);
    const MilpSolution exact = branch_and_bound(inst);
    const auto kappa = heuristic_siting(r.synth, r.charging.candidates, 1);
    const MilpSolution heuristic = solve_lp(inst, kappa);
    if (exact.status != SolveStatus::kOptimal) {
      EXPECT_NE(heuristic.status, SolveStatus::kOptimal);
      continue;
    }
    ASSERT_EQ(relaxed.status, SolveStatus::kOptimal);
    EXPECT_LE(relaxed.objective, exact.objective + 1e-9);
    if (heuristic.status == SolveStatus::kOptimal) {
      EXPECT_LE(exact.objective, heuristic.objective + 1e-9);
    }
    // The trace never loses ground.
    for (std::size_t i = 1; i < exact.trace.size(); ++i) {
      EXPECT_LE(exact.trace[i].incumbent, exact.trace[i - 1].incumbent);
      EXPECT_LE(exact.trace[i].bound, exact.trace[i].incumbent);
    }
    EXPECT_LE(exact.bound, exact.objective);
  }
}

TEST(BranchAndBoundTest, IntegralRootNeedsNoBranching) {
  MilpProblem p;
  const auto x = p.add_variable("x", 1.0, 0.0, 10.0, true);
  const auto y = p.add_variable("y", 2.0, 0.0, kInf, false);
  p.add_row("c1", "c", {{x, 1}, {y, 1}}, Sense::kGe, 3);
  p.add_row("c2", "c", {{x, 1}}, Sense::kLe, 2);
  BranchOptions opt;
  opt.gap_tol = 0.0;
  const MilpSolution s = branch_and_bound(p, opt);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_EQ(s.nodes, 1u);
  EXPECT_EQ(s.integers, std::vector<int>{2});
  EXPECT_NEAR(s.objective, 4.0, 1e-12);
  EXPECT_EQ(s.gap, 0.0);
}

// 0/1 knapsack with a fractional relaxation.
MilpProblem Knapsack() {
  MilpProblem p;
  const double value[] = {10, 13, 7, 8, 9, 4};
  const double weight[] = {5, 7, 4, 5, 6, 3};
  std::vector<std::pair<std::size_t, double>> row;
  for (int i = 0; i < 6; ++i) {
    p.add_variable("z" + std::to_string(i), -value[i], 0.0, 1.0, true);
    row.emplace_back(i, weight[i]);
  }
  p.add_row("cap", "cap", row, Sense::kLe, 15);
  return p;
}

TEST(BranchAndBoundTest, KnapsackAgainstEnumeration) {
  const MilpProblem p = Knapsack();
  double best = 0.0;
  for (int mask = 0; mask < 64; ++mask) {
    std::vector<double> z(6);
    for (int i = 0; i < 6; ++i) z[i] = (mask >> i) & 1;
    if (p.lp.max_violation(z) <= 0) best = std::min(best, p.lp.objective(z));
  }
  const MilpSolution s = branch_and_bound(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective, best, 1e-9);
  EXPECT_GT(s.nodes, 1u);
}

TEST(BranchAndBoundTest, NodeLimitReported) {
  BranchOptions opt;
  opt.node_limit = 1;
  const MilpSolution s = branch_and_bound(Knapsack(), opt);
  EXPECT_EQ(s.status, SolveStatus::kIterationLimit);
  EXPECT_EQ(s.nodes, 1u);
  EXPECT_STREQ(to_string(s.status), "iteration-limit");
}

TEST(BranchAndBoundTest, ShortestCycleInstance) {
  // One demand, the only station at its origin. Each synthetic arc costs its
  // time plus one quantum of charging (7.2 s), so the optimum is alpha times
  // the sum of the two directed shortest paths under that weight.
  std::mt19937_64 rng(6);
  const SyntheticGraph synth = testing::ring_synthetic(7, rng);
  std::vector<NodeId> geo;
  for (NodeId i = 100; i < 107; ++i) geo.push_back(i);
  const ChargingConfig charging{{100}, 1e6, 1, 50000.0};
  const auto graph = std::make_shared<const MultiLayerGraph>(
      build_multilayer(synth, {"v", 1.0, 3000.0, 4, 1.0}, geo, charging));
  const double alpha = 0.004;
  const MilpInstance inst = assemble(graph, {{100, 104, alpha}}, charging);
  const MilpSolution s = branch_and_bound(inst);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);

  std::vector<std::tuple<std::size_t, std::size_t, double>> arcs;
  for (const auto& a : synth.arcs) arcs.emplace_back(a.tail, a.head, a.time_s + 7.2);
  const auto d = testing::floyd_warshall(synth.node_count(), arcs);
  EXPECT_NEAR(s.objective, alpha * (d[0][4] + d[4][0]), 1e-9);
}

TEST(BranchAndBoundTest, BatteryTooSmallIsInfeasible) {
  SyntheticGraph g;
  g.quantum_wh = 100.0;
  g.nodes = {{{40.000, -74.0}, 1}, {{40.001, -74.0}, 2}, {{40.002, -74.0}, 3}};
  g.arcs = {{0, 1, 100, 500}, {1, 0, 100, 500}, {1, 2, 100, 500}, {2, 1, 100, 500}};
  const ChargingConfig charging{{1, 3}, 1e6, 2, 50000.0};
  // Two layers: a vehicle can drive one quantum, the trip needs two.
  const auto graph = std::make_shared<const MultiLayerGraph>(
      build_multilayer(g, {"v", 1.0, 150.0, 4, 1.0}, {1, 2, 3}, charging));
  const MilpInstance inst = assemble(graph, {{1, 3, 0.001}}, charging);
  EXPECT_EQ(branch_and_bound(inst).status, SolveStatus::kInfeasible);
  EXPECT_EQ(solve_lp(inst).status, SolveStatus::kInfeasible);
}

TEST(BranchAndBoundTest, EmptyInstance) {
  const auto r = testing::random_instance(1);
  const MilpSolution s = branch_and_bound(assemble(r.graph, {}, r.charging));
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_EQ(s.objective, 0.0);
}

TEST(LpFileTest, RoundTrip) {
  const auto r = testing::random_instance(3);
  const MilpInstance inst = assemble(r.graph, r.requests.requests, r.charging);
  std::stringstream file;
  emit_lp_file(inst.problem, file);
  const std::string text = file.str();
  std::size_t longest = 0, start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i)
    if (i == text.size() || text[i] == '\n') {
      longest = std::max(longest, i - start);
      start = i + 1;
    }
  EXPECT_LE(longest, 200u);

  const MilpProblem back = parse_lp_file(file);
  ASSERT_EQ(back.variable_count(), inst.problem.variable_count());
  ASSERT_EQ(back.row_count(), inst.problem.row_count());
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < back.variable_count(); ++j) index[back.var_names[j]] = j;
  const MilpProblem& p = inst.problem;
  for (std::size_t j = 0; j < p.variable_count(); ++j) {
    ASSERT_TRUE(index.count(p.var_names[j])) << p.var_names[j];
    const std::size_t k = index[p.var_names[j]];
    EXPECT_EQ(back.lp.cost[k], p.lp.cost[j]);
    EXPECT_EQ(back.lp.lower[k], p.lp.lower[j]);
    EXPECT_EQ(back.lp.upper[k], p.lp.upper[j]);
    EXPECT_EQ(back.integer[k], p.integer[j]);
  }
  for (std::size_t i = 0; i < p.row_count(); ++i) {
    EXPECT_EQ(back.row_names[i], p.row_names[i]);
    EXPECT_EQ(back.row_tags[i], p.row_tags[i]);
    EXPECT_EQ(back.lp.rows[i].sense, p.lp.rows[i].sense);
    EXPECT_EQ(back.lp.rows[i].rhs, p.lp.rows[i].rhs);
    ASSERT_EQ(back.lp.rows[i].coefs.size(), p.lp.rows[i].coefs.size());
    for (std::size_t t = 0; t < p.lp.rows[i].coefs.size(); ++t) {
      EXPECT_EQ(back.var_names[back.lp.rows[i].coefs[t].first],
                p.var_names[p.lp.rows[i].coefs[t].first]);
      EXPECT_EQ(back.lp.rows[i].coefs[t].second, p.lp.rows[i].coefs[t].second);
    }
  }
  const MilpSolution a = branch_and_bound(p), b = branch_and_bound(back);
  ASSERT_EQ(a.status, b.status);
  if (a.status == SolveStatus::kOptimal) {
    EXPECT_NEAR(a.objective, b.objective, 1e-9);
  }
}

TEST(LpFileTest, HandWrittenToy) {
  std::istringstream in(
      "\\ toy\n"
      "Minimize\n"
      " obj: - x - y\n"
      "Subject To\n"
      " c1: x + 2 y <= 4\n"
      " c2: 3 x + y <= 6\n"
      "Bounds\n"
      " -inf <= w <= +inf\n"
      " 0 <= n <= 3\n"
      "Generals\n"
      " n\n"
      "End\n");
  const MilpProblem p = parse_lp_file(in);
  ASSERT_EQ(p.variable_count(), 4u);
  EXPECT_EQ(p.objective_name, "obj");
  EXPECT_EQ(p.row_tags[0], "c1");
  const MilpSolution s = branch_and_bound(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective, -2.8, 1e-12);
  EXPECT_NEAR(s.values[0], 1.6, 1e-12);
  EXPECT_NEAR(s.values[1], 1.2, 1e-12);
  for (std::size_t j = 0; j < p.variable_count(); ++j) {
    EXPECT_EQ(p.integer[j], p.var_names[j] == "n");
    if (p.var_names[j] == "w") {
      EXPECT_EQ(p.lp.lower[j], -kInf);
    }
    if (p.var_names[j] == "n") {
      EXPECT_EQ(p.lp.upper[j], 3.0);
    }
  }

  std::stringstream sol;
  write_solution_file(p, s.values, sol);
  const MilpSolution back = parse_solution_file(sol, p);
  EXPECT_EQ(back.values, s.values);
  EXPECT_NEAR(back.objective, -2.8, 1e-12);
}

TEST(LpFileTest, RejectsMalformedInput) {
  std::istringstream bad_char("Minimize\n obj: x ^ y\nEnd\n");
  EXPECT_THROW(parse_lp_file(bad_char), ParseError);
  std::istringstream max("Maximize\n obj: x\nEnd\n");
  EXPECT_THROW(parse_lp_file(max), Unsupported);
  std::istringstream no_rhs("Minimize\n obj: x\nSubject To\n c: x <= y\nEnd\n");
  EXPECT_THROW(parse_lp_file(no_rhs), ParseError);
}

TEST(SolutionFileTest, RoundTripAndErrors) {
  const auto r = testing::random_instance(2);
  const MilpInstance inst = assemble(r.graph, r.requests.requests, r.charging);
  const MilpSolution s = branch_and_bound(inst);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  std::stringstream file;
  write_solution_file(inst.problem, s.values, file);
  const MilpSolution back = parse_solution_file(file, inst.problem);
  EXPECT_EQ(back.values, s.values);
  EXPECT_EQ(back.integers, s.integers);

  std::istringstream unknown("objective 0\nxq7 1.5\n");
  try {
    parse_solution_file(unknown, inst.problem);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown variable xq7"), std::string::npos);
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream garbled("xr_a0 1 2\n");
  EXPECT_THROW(parse_solution_file(garbled, inst.problem), ParseError);
  std::istringstream wrong("objective 12345\nxr_a0 0\n");
  EXPECT_THROW(parse_solution_file(wrong, inst.problem), Error);
}

}  // namespace
}  // namespace eamod
