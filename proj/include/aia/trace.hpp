#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aia/geometry.hpp"

namespace aia {

enum class Role {
  Aia,      // has assigned landmarks, follows a planned path
  Explore,  // empty assigned set, drifts toward its cell centroid
};

struct RobotTraceEntry {
  int id = 0;
  Pose pose;
  Role role = Role::Explore;
  std::vector<int> assigned;
  ControlInput control{};
  int plan_age = 0;
  bool replanned = false;
  double plan_seconds = 0.0;  // wall clock; only written with timings enabled
};

struct LandmarkTraceEntry {
  int id = 0;
  double det = 0.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
};

struct TraceRecord {
  int t = 0;
  bool fusion = false;
  std::vector<RobotTraceEntry> robots;
  std::vector<LandmarkTraceEntry> landmarks;
};

struct RunSummary {
  int terminal_step = 0;
  bool timeout = false;
  int records = 0;
  std::uint64_t seed = 0;
  int plan_calls = 0;
  double plan_seconds_mean = 0.0;
  double plan_seconds_std = 0.0;
  double voronoi_seconds_mean = 0.0;
  double wall_seconds = 0.0;
};

struct Trace {
  std::vector<TraceRecord> records;
  RunSummary summary;
};

// Newline-delimited records, one JSON object per step, then one trailing
// object flagged "summary". Wall-clock fields are emitted only when
// include_timings is set, so default output is byte-identical across
// same-seed runs.
void write_trace(std::ostream& out, const Trace& trace, bool include_timings = false);
std::string trace_to_string(const Trace& trace, bool include_timings = false);

}  // namespace aia
