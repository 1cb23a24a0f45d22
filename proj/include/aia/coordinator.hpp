#pragma once

#include <deque>
#include <vector>

#include "aia/estimation.hpp"
#include "aia/geometry.hpp"
#include "aia/planner.hpp"
#include "aia/rng.hpp"
#include "aia/scenario.hpp"
#include "aia/trace.hpp"

namespace aia {

// Landmarks with unsettled uncertainty, grouped by the robot whose Voronoi
// cell contains their current mean. Index j of the result lists landmark ids
// assigned to robot j; together the lists cover exactly the landmarks with
// det > delta, disjointly.
std::vector<std::vector<int>> compute_assigned_sets(
    const std::vector<Eigen::Vector2d>& robot_positions, const GlobalBelief& belief,
    double delta);

struct RobotAgent {
  int id = 0;
  Pose pose;
  Role role = Role::Explore;
  std::vector<int> assigned;  // landmark ids, ascending
  std::deque<ControlInput> queue;
  GlobalBelief local_belief;
  int plan_age = 0;
  bool plan_feasible = true;
  bool needs_replan = false;
  bool planned_once = false;
};

struct BufferedMeasurement {
  int t = 0;  // timestep label of the reading
  int robot = 0;
  int landmark = 0;
  double value = 0.0;
  Pose pose;  // sensing pose at the time of the reading
};

struct RunResult {
  Trace trace;
  int terminal_step = 0;
  bool timeout = false;
};

// Steps the whole team: per-robot control decisions (planned paths for
// robots that own landmarks, centroid-seeking motion for the rest), true
// world advance, measurement collection, periodic fusion, and assignment
// refresh from the freshest commonly known estimates.
class Simulation {
 public:
  explicit Simulation(const Scenario& scenario);

  void step();
  bool done() const;  // every fused landmark determinant at or below delta
  RunResult run();

  int t() const { return t_; }
  const std::vector<RobotAgent>& agents() const { return agents_; }
  const GlobalBelief& fused_belief() const { return fused_; }
  const std::vector<Eigen::Vector2d>& true_positions() const { return truth_; }
  const std::vector<BufferedMeasurement>& measurement_log() const { return all_measurements_; }
  const TraceRecord& last_record() const { return last_record_; }
  const Workspace& workspace() const { return ws_; }

  ControlInput exploration_control(int agent_index) const;

 private:
  void replan(RobotAgent& agent);
  void fuse_buffered();
  bool has_local_work(const RobotAgent& agent) const;
  void refresh_assignments();
  std::vector<Eigen::Vector2d> agent_positions() const;

  Scenario scenario_;
  Workspace ws_;
  std::vector<ControlInput> controls_;
  std::vector<LandmarkDynamics> dynamics_;

  std::vector<RobotAgent> agents_;
  std::vector<Eigen::Vector2d> truth_;
  GlobalBelief fused_;
  std::vector<BufferedMeasurement> buffer_;
  std::vector<BufferedMeasurement> all_measurements_;
  std::vector<Eigen::Vector2d> explore_points_;      // free low-discrepancy samples
  std::vector<Eigen::Vector2d> frozen_generators_;   // voronoi generators in offline mode

  int t_ = 0;
  int last_fused_t_ = 0;
  Rng world_rng_;

  TraceRecord last_record_;
  double plan_seconds_sum_ = 0.0;
  double plan_seconds_sq_sum_ = 0.0;
  int plan_calls_ = 0;
  double voronoi_seconds_sum_ = 0.0;
  int voronoi_calls_ = 0;
};

}  // namespace aia
