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

// Command-line front end: run, prune, pool, solve, compare-vehicles.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "eamod/ingest.hpp"
#include "eamod/isoprune.hpp"
#include "eamod/ridepool.hpp"
#include "eamod/scenarios.hpp"
#include "eamod/solve.hpp"

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw eamod::InvalidArgument("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw eamod::InvalidArgument("cannot write " + path);
  return out;
}

int summarize(const eamod::Report& r, const std::string& dir) {
  std::size_t solved = 0, errors = 0;
  for (const auto& rec : r.records) {
    solved += rec.solved();
    errors += rec.status == "error";
    if (!rec.error.empty())
      std::cerr << "run " << rec.index << ": " << rec.error << '\n';
  }
  for (const auto& f : r.check_failures) std::cerr << "check: " << f << '\n';
  std::cout << r.records.size() << " runs, " << solved << " optimal, " << errors
            << " failed; reports in " << dir << '\n';
  return errors ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electric fleet planning: pruning, pooling, siting and routing"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "run a scenario grid from a JSON config");
  run->add_option("--config", config, "scenario JSON")->required();

  std::string compare_config;
  auto* compare = app.add_subcommand("compare-vehicles", "compare vehicle designs");
  compare->add_option("--config", compare_config, "scenario JSON with >= 2 vehicles")
      ->required();

  std::string graph_path, synth_out = "synthetic.csv", prune_report;
  eamod::PruneConfig pc;
  auto* prune = app.add_subcommand("prune", "build an iso-energy synthetic graph");
  prune->add_option("--graph", graph_path, "road graph CSV")->required();
  prune->add_option("--target-wh", pc.target_wh, "energy quantum in Wh");
  prune->add_option("--ratio", pc.ratio, "fraction of nodes to remove");
  prune->add_option("--batch", pc.batch, "candidates per iteration");
  prune->add_option("--sample-pairs", pc.sample_pairs, "node pairs sampled per error");
  prune->add_option("--seed", pc.seed, "sampling seed");
  prune->add_option("--out", synth_out, "synthetic graph CSV");
  prune->add_option("--report", prune_report, "prune report JSON");

  std::string requests_path, pool_graph, pool_out = "pooled.csv";
  eamod::PoolingConfig pool_cfg;
  auto* pool = app.add_subcommand("pool", "transform requests for ride-pooling");
  pool->add_option("--requests", requests_path, "request CSV")->required();
  pool->add_option("--graph", pool_graph, "synthetic graph CSV for travel times")
      ->required();
  pool->add_option("--twait", pool_cfg.max_wait_s, "maximum wait in seconds");
  pool->add_option("--tdelay", pool_cfg.max_delay_s, "maximum delay in seconds");
  pool->add_option("--capacity", pool_cfg.capacity, "seats per vehicle");
  pool->add_option("--out", pool_out, "pooled request CSV");

  std::string instance, solution_out = "solution.txt";
  eamod::BranchOptions bo;
  auto* solve = app.add_subcommand("solve", "solve an LP-format instance");
  solve->add_option("--instance", instance, "CPLEX LP file")->required();
  solve->add_option("--gap", bo.gap_tol, "relative optimality gap");
  solve->add_option("--node-limit", bo.node_limit, "branch-and-bound node limit");
  solve->add_option("--out", solution_out, "solution file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = eamod::load_scenario(config);
      return summarize(eamod::run_scenario(cfg), cfg.output_dir);
    }
    if (*compare) {
      const auto cfg = eamod::load_scenario(compare_config);
      return summarize(eamod::compare_vehicles(cfg), cfg.output_dir);
    }
    if (*prune) {
      const auto graph = eamod::load_road_graph(graph_path);
      auto [synth, report] = eamod::prune(graph, pc);
      auto out = open_out(synth_out);
      eamod::write_synthetic_csv(out, synth);
      if (!prune_report.empty())
        open_out(prune_report) << eamod::prune_report_to_json(report).dump(2) << '\n';
      std::cout << report.original_nodes << " -> " << report.synthetic_nodes
                << " nodes, mean error " << report.mean_abs_error_wh << " Wh\n";
      return 0;
    }
    if (*pool) {
      auto gin = open_in(pool_graph);
      const auto synth = eamod::parse_synthetic_csv(gin);
      auto rin = open_in(requests_path);
      const auto requests = eamod::parse_requests_csv(rin);
      std::vector<eamod::NodeId> ids;
      for (const auto& r : requests.requests) {
        ids.push_back(r.origin);
        ids.push_back(r.destination);
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      const auto tt = eamod::travel_times(synth, ids);
      const auto pooled = eamod::pool_requests(requests, tt, pool_cfg);
      auto out = open_out(pool_out);
      eamod::write_pooled_csv(out, pooled);
      const double before = eamod::in_vehicle_vht(requests.requests, tt);
      const double after = eamod::in_vehicle_vht(pooled.as_requests(), tt);
      std::cout << requests.size() << " requests -> " << pooled.requests.size()
                << " equivalent requests, in-vehicle time " << before << " -> " << after
                << " vehicle-s/s\n";
      return 0;
    }
    if (*solve) {
      auto in = open_in(instance);
      const auto problem = eamod::parse_lp_file(in);
      const auto sol = eamod::branch_and_bound(problem, bo);
      std::cout << "status " << eamod::to_string(sol.status) << ", objective "
                << sol.objective << ", " << sol.nodes << " nodes\n";
      if (sol.values.empty()) return sol.status == eamod::SolveStatus::kInfeasible ? 0 : 2;
      auto out = open_out(solution_out);
      eamod::write_solution_file(problem, sol.values, out);
      return sol.status == eamod::SolveStatus::kOptimal ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
