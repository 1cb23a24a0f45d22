#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aia/scenario.hpp"

namespace aia {

enum class SweepAxis { Robots, Landmarks, CommPeriod, ModeAxis };

struct SweepSpec {
  SweepAxis axis = SweepAxis::Robots;
  std::vector<double> values;            // ignored for the mode axis
  std::vector<std::uint64_t> seeds;
  Deployment deployment = Deployment::CornerCluster;
  int jobs = 0;                          // 0 = hardware concurrency
};

struct SweepCell {
  std::string label;
  std::vector<int> terminal_steps;       // one per seed, seed order
  std::vector<bool> timeouts;
  double f_mean = 0.0;
  double f_std = 0.0;
  double f_median = 0.0;
  int timeout_count = 0;
  double plan_seconds_mean = 0.0;
  double voronoi_seconds_mean = 0.0;
  double wall_seconds_mean = 0.0;
};

struct SweepTable {
  std::string axis;
  std::string deployment;
  std::vector<SweepCell> cells;
};

// Runs every (value, seed) combination, in parallel across combinations.
// Terminal steps and timeout flags are pure functions of (base, spec);
// timing columns are measured.
SweepTable run_sweep(const Scenario& base, const SweepSpec& spec);

// Scenario for one sweep cell. Robot/landmark axes regenerate placements
// from the seed; other axes reuse the base placements.
Scenario cell_scenario(const Scenario& base, const SweepSpec& spec, double value,
                       std::uint64_t seed);

void write_sweep_text(std::ostream& out, const SweepTable& table);
void write_sweep_json(std::ostream& out, const SweepTable& table);

}  // namespace aia
