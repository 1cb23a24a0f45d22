#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aia/estimation.hpp"
#include "aia/geometry.hpp"
#include "aia/planner.hpp"

namespace aia {

enum class Mode {
  Online,   // re-plan whenever the assigned set changes
  Offline,  // single plan per robot at t = 0, executed open loop
};

struct RobotStart {
  double x = 0.0;
  double y = 0.0;
  double theta_deg = 0.0;  // stored in file units so emit round-trips exactly

  Pose pose() const;
};

struct LandmarkSpec {
  Eigen::Vector2d true_position = Eigen::Vector2d::Zero();
  Eigen::Vector2d prior_mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d prior_cov = Eigen::Matrix2d::Identity();
  LandmarkDynamics dynamics;  // defaults to static
};

// Complete description of one experiment. Angles are kept in degrees (the
// file unit) and converted where consumed.
struct Scenario {
  double width = 10.0;
  double height = 10.0;
  double grid_resolution = 0.1;
  std::vector<Rect> obstacles;

  std::vector<RobotStart> robots;
  std::vector<LandmarkSpec> landmarks;

  SensorModel sensor;
  std::vector<double> speeds = {0.0, 0.1};          // m/s
  std::vector<double> turn_rates_deg = {};          // deg/s; empty = 0..355 by 5

  double delta = 1.8e-6;
  int comm_period = 1;
  Mode mode = Mode::Online;
  PlannerParams planner;
  std::uint64_t seed = 1;
  int step_cap = 5000;

  Workspace make_workspace() const;
  std::vector<ControlInput> control_set() const;  // speeds x turn rates, file order
  std::vector<Pose> initial_poses() const;
  std::vector<double> effective_turn_rates_deg() const;
};

// Throws std::runtime_error with line context on malformed input and
// std::invalid_argument naming the offending field on invariant violations.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string emit_scenario(const Scenario& sc);

bool operator==(const Scenario& a, const Scenario& b);

// Generators used by sweeps: robot placement pattern plus quasi-random
// landmark placement derived from the seed.
enum class Deployment {
  CornerCluster,  // all robots packed near the origin corner
  UniformGrid,    // robots spread on a regular lattice
};

Scenario make_generated_scenario(const Scenario& base, Deployment deployment, int n_robots,
                                 int m_landmarks, std::uint64_t seed);

// Low-discrepancy point set used for placement and cell-centroid estimates.
double halton(std::uint64_t index, std::uint64_t base);

}  // namespace aia
