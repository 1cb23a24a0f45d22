#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aia/coordinator.hpp"
#include "aia/scenario.hpp"
#include "aia/sweep.hpp"
#include "aia/trace.hpp"

namespace {

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  return out;
}

int run_command(const std::string& scenario_path, std::int64_t seed_override,
                const std::string& out_path, bool timings) {
  aia::Scenario sc = aia::load_scenario(scenario_path);
  if (seed_override >= 0) sc.seed = static_cast<std::uint64_t>(seed_override);

  aia::Simulation sim(sc);
  aia::RunResult result = sim.run();

  if (out_path == "-") {
    aia::write_trace(std::cout, result.trace, timings);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open output file: " << out_path << "\n";
      return 2;
    }
    aia::write_trace(out, result.trace, timings);
  }

  std::cerr << (result.timeout ? "timeout" : "finished") << " at step " << result.terminal_step
            << " (" << result.trace.summary.plan_calls << " plan calls, mean "
            << result.trace.summary.plan_seconds_mean << " s)\n";
  return result.timeout ? 1 : 0;
}

int sweep_command(const std::string& scenario_path, const std::string& axis,
                  const std::string& values_csv, const std::string& seeds_csv,
                  const std::string& deployment, const std::string& out_prefix, int jobs) {
  aia::Scenario base = aia::load_scenario(scenario_path);

  aia::SweepSpec spec;
  if (axis == "robots") {
    spec.axis = aia::SweepAxis::Robots;
  } else if (axis == "landmarks") {
    spec.axis = aia::SweepAxis::Landmarks;
  } else if (axis == "comm") {
    spec.axis = aia::SweepAxis::CommPeriod;
  } else if (axis == "mode") {
    spec.axis = aia::SweepAxis::ModeAxis;
  } else {
    std::cerr << "error: unknown axis: " << axis << "\n";
    return 2;
  }
  if (spec.axis == aia::SweepAxis::ModeAxis) {
    std::stringstream ss(values_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "online") {
        spec.values.push_back(0.0);
      } else if (item == "offline") {
        spec.values.push_back(1.0);
      } else if (!item.empty()) {
        std::cerr << "error: mode values must be online/offline\n";
        return 2;
      }
    }
  } else {
    spec.values = parse_doubles(values_csv);
  }
  spec.seeds = parse_seeds(seeds_csv);
  spec.deployment =
      deployment == "grid" ? aia::Deployment::UniformGrid : aia::Deployment::CornerCluster;
  spec.jobs = jobs;

  aia::SweepTable table = aia::run_sweep(base, spec);
  aia::write_sweep_text(std::cout, table);
  if (!out_prefix.empty()) {
    std::ofstream jf(out_prefix + ".json");
    std::ofstream tf(out_prefix + ".txt");
    if (!jf || !tf) {
      std::cerr << "error: cannot open sweep output files\n";
      return 2;
    }
    aia::write_sweep_json(jf, table);
    aia::write_sweep_text(tf, table);
  }
  return 0;
}

int tree_debug_command(const std::string& scenario_path, int robot, std::int64_t seed_override) {
  aia::Scenario sc = aia::load_scenario(scenario_path);
  if (seed_override >= 0) sc.seed = static_cast<std::uint64_t>(seed_override);
  if (robot < 0 || robot >= static_cast<int>(sc.robots.size())) {
    std::cerr << "error: robot index out of range\n";
    return 2;
  }

  aia::Workspace ws = sc.make_workspace();
  aia::GlobalBelief prior;
  std::vector<aia::LandmarkDynamics> dynamics;
  for (std::size_t i = 0; i < sc.landmarks.size(); ++i) {
    aia::LandmarkBelief b;
    b.id = static_cast<int>(i);
    b.mean = sc.landmarks[i].prior_mean;
    b.cov = sc.landmarks[i].prior_cov;
    prior.landmarks.push_back(b);
    dynamics.push_back(sc.landmarks[i].dynamics);
  }

  std::vector<Eigen::Vector2d> positions;
  for (const auto& p : sc.initial_poses()) positions.push_back(p.position());
  auto sets = aia::compute_assigned_sets(positions, prior, sc.delta);
  const auto& mine = sets[static_cast<std::size_t>(robot)];
  if (mine.empty()) {
    std::cout << "robot " << robot << " owns no landmarks at t=0 (exploration role)\n";
    return 0;
  }

  std::vector<aia::ScopeLandmark> scope;
  for (int id : mine) {
    scope.push_back(aia::ScopeLandmark{prior.landmarks[static_cast<std::size_t>(id)],
                                       dynamics[static_cast<std::size_t>(id)]});
  }
  aia::PlannerParams params = sc.planner;
  if (sc.mode == aia::Mode::Offline) params.goal_mode = aia::GoalMode::AllOfScope;
  aia::LocalPlanner planner(ws, sc.sensor, scope, sc.control_set(), params);
  aia::Rng rng(aia::mix_seed(sc.seed, 0x706c616eULL, 0, static_cast<std::uint64_t>(robot)));
  aia::PlanResult result = planner.plan(sc.robots[static_cast<std::size_t>(robot)].pose(), rng);

  std::cout << "robot " << robot << " scope:";
  for (int id : mine) std::cout << " " << id;
  std::cout << "\nfeasible " << (result.feasible ? "yes" : "no") << ", horizon "
            << result.horizon << "\n";
  std::cout << "tree: nodes " << result.stats.nodes << ", buckets " << result.stats.buckets
            << ", max_depth " << result.stats.max_depth << ", goal_nodes "
            << result.stats.goal_nodes << ", iterations " << result.stats.iterations << "\n";
  std::cout << "achieved determinants:";
  for (double d : result.achieved_dets) std::cout << " " << d;
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot information-gathering simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::int64_t seed_override = -1;
  std::string out_path = "-";
  bool timings = false;

  auto* run = app.add_subcommand("run", "Run one scenario and write its trace");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--seed", seed_override, "Override the scenario seed");
  run->add_option("--out", out_path, "Trace output path, '-' for stdout");
  run->add_flag("--timings", timings, "Include wall-clock fields in the trace");

  std::string axis = "robots", values_csv, seeds_csv = "1", deployment = "corner",
              out_prefix;
  int jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario family and tabulate results");
  sweep->add_option("scenario", scenario_path, "Base scenario JSON file")->required();
  sweep->add_option("--axis", axis, "robots | landmarks | comm | mode")->required();
  sweep->add_option("--values", values_csv, "Comma-separated axis values")->required();
  sweep->add_option("--seeds", seeds_csv, "Comma-separated seeds");
  sweep->add_option("--deployment", deployment, "corner | grid");
  sweep->add_option("--out", out_prefix, "Write <prefix>.json and <prefix>.txt");
  sweep->add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  int robot = 0;
  auto* debug = app.add_subcommand("tree-debug", "Grow one robot's t=0 tree and print stats");
  debug->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  debug->add_option("--robot", robot, "Robot index");
  debug->add_option("--seed", seed_override, "Override the scenario seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(scenario_path, seed_override, out_path, timings);
    if (sweep->parsed()) {
      return sweep_command(scenario_path, axis, values_csv, seeds_csv, deployment, out_prefix,
                           jobs);
    }
    if (debug->parsed()) return tree_debug_command(scenario_path, robot, seed_override);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
