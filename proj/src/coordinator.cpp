#include "aia/coordinator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aia {

namespace {

constexpr double kDt = 1.0;
constexpr std::uint64_t kWorldSalt = 0x776f726c64ULL;
constexpr std::uint64_t kPlanSalt = 0x706c616eULL;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<std::vector<int>> compute_assigned_sets(
    const std::vector<Eigen::Vector2d>& robot_positions, const GlobalBelief& belief,
    double delta) {
  if (robot_positions.empty()) throw std::invalid_argument("no robots");
  std::vector<std::vector<int>> assigned(robot_positions.size());
  for (const auto& lm : belief.landmarks) {
    if (lm.cov.determinant() <= delta) continue;
    int owner = voronoi_owner(lm.mean, robot_positions);
    assigned[static_cast<std::size_t>(owner)].push_back(lm.id);
  }
  return assigned;
}

Simulation::Simulation(const Scenario& scenario)
    : scenario_(scenario),
      ws_(scenario.make_workspace()),
      controls_(scenario.control_set()),
      world_rng_(mix_seed(scenario.seed, kWorldSalt)) {
  GlobalBelief prior;
  for (std::size_t i = 0; i < scenario_.landmarks.size(); ++i) {
    const auto& spec = scenario_.landmarks[i];
    LandmarkBelief b;
    b.id = static_cast<int>(i);
    b.mean = spec.prior_mean;
    b.cov = spec.prior_cov;
    prior.landmarks.push_back(b);
    truth_.push_back(spec.true_position);
    dynamics_.push_back(spec.dynamics);
  }
  fused_ = prior;

  auto poses = scenario_.initial_poses();
  for (std::size_t j = 0; j < poses.size(); ++j) {
    RobotAgent agent;
    agent.id = static_cast<int>(j);
    agent.pose = poses[j];
    agent.local_belief = prior;
    agents_.push_back(std::move(agent));
  }
  frozen_generators_ = agent_positions();

  // Free low-discrepancy samples reused by every centroid estimate.
  std::uint64_t idx = 1;
  while (explore_points_.size() < 512 && idx < 512 * 16) {
    Eigen::Vector2d p{halton(idx, 2) * scenario_.width, halton(idx, 3) * scenario_.height};
    ++idx;
    if (ws_.is_free(p)) explore_points_.push_back(p);
  }

  refresh_assignments();
}

std::vector<Eigen::Vector2d> Simulation::agent_positions() const {
  std::vector<Eigen::Vector2d> positions;
  positions.reserve(agents_.size());
  for (const auto& a : agents_) positions.push_back(a.pose.position());
  return positions;
}

void Simulation::refresh_assignments() {
  auto start = std::chrono::steady_clock::now();
  auto sets = compute_assigned_sets(agent_positions(), fused_, scenario_.delta);
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    RobotAgent& agent = agents_[j];
    if (sets[j] != agent.assigned) {
      agent.assigned = std::move(sets[j]);
      agent.needs_replan = true;
    }
    agent.role = agent.assigned.empty() ? Role::Explore : Role::Aia;
  }
  voronoi_seconds_sum_ += seconds_since(start);
  ++voronoi_calls_;
}

ControlInput Simulation::exploration_control(int agent_index) const {
  const RobotAgent& agent = agents_[static_cast<std::size_t>(agent_index)];
  const std::vector<Eigen::Vector2d> generators =
      scenario_.mode == Mode::Offline ? frozen_generators_ : agent_positions();

  Eigen::Vector2d centroid = agent.pose.position();
  int owned = 0;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (const auto& p : explore_points_) {
    if (voronoi_owner(p, generators) == agent_index) {
      sum += p;
      ++owned;
    }
  }
  if (owned > 0) centroid = sum / owned;

  ControlInput best{0.0, 0.0};
  double best_d = std::numeric_limits<double>::infinity();
  for (const ControlInput& u : controls_) {
    Pose succ = apply_motion(agent.pose, u, kDt);
    if (!ws_.is_free(succ.position())) continue;
    double d = (succ.position() - centroid).norm();
    if (d < best_d) {
      best_d = d;
      best = u;
    }
  }
  return best;
}

void Simulation::replan(RobotAgent& agent) {
  std::vector<ScopeLandmark> scope;
  scope.reserve(agent.assigned.size());
  for (int id : agent.assigned) {
    ScopeLandmark s;
    s.belief = agent.local_belief.landmarks[static_cast<std::size_t>(id)];
    // Skip work this robot has already finished by its own account; the
    // shared view catches up at the next exchange. The caller guarantees at
    // least one block stays.
    if (scenario_.mode == Mode::Online && s.belief.cov.determinant() <= scenario_.delta) continue;
    s.dynamics = dynamics_[static_cast<std::size_t>(id)];
    scope.push_back(std::move(s));
  }

  PlannerParams params = scenario_.planner;
  if (scenario_.mode == Mode::Offline) params.goal_mode = GoalMode::AllOfScope;

  LocalPlanner planner(ws_, scenario_.sensor, std::move(scope), controls_, params, t_);
  Rng rng(mix_seed(scenario_.seed, kPlanSalt, static_cast<std::uint64_t>(t_),
                   static_cast<std::uint64_t>(agent.id)));

  auto start = std::chrono::steady_clock::now();
  PlanResult result = planner.plan(agent.pose, rng);
  double elapsed = seconds_since(start);
  plan_seconds_sum_ += elapsed;
  plan_seconds_sq_sum_ += elapsed * elapsed;
  ++plan_calls_;

  agent.queue.assign(result.controls.begin(), result.controls.end());
  agent.plan_feasible = result.feasible;
  agent.plan_age = 0;
  agent.needs_replan = false;
  agent.planned_once = true;

  auto& entry = last_record_.robots[static_cast<std::size_t>(agent.id)];
  entry.replanned = true;
  entry.plan_seconds = elapsed;
}

void Simulation::fuse_buffered() {
  // Replay everything since the last fusion through the shared belief:
  // predict once per elapsed step, then that step's readings in robot order.
  std::size_t cursor = 0;
  for (int tau = last_fused_t_ + 1; tau <= t_; ++tau) {
    for (auto& lm : fused_.landmarks) {
      const auto& dyn = dynamics_[static_cast<std::size_t>(lm.id)];
      if (dyn.is_static()) continue;
      lm.mean = predict_mean(lm, dyn, tau - 1);
      lm.cov = dyn.A * lm.cov * dyn.A.transpose() + dyn.Q;
    }
    while (cursor < buffer_.size() && buffer_[cursor].t == tau) {
      const auto& m = buffer_[cursor];
      auto& lm = fused_.landmarks[static_cast<std::size_t>(m.landmark)];
      lm = ekf_update(lm, m.pose, m.value, scenario_.sensor);
      ++cursor;
    }
  }
  buffer_.clear();
  last_fused_t_ = t_;
  for (auto& agent : agents_) agent.local_belief = fused_;
}

bool Simulation::has_local_work(const RobotAgent& agent) const {
  for (int id : agent.assigned) {
    if (agent.local_belief.landmarks[static_cast<std::size_t>(id)].cov.determinant() >
        scenario_.delta) {
      return true;
    }
  }
  return false;
}

void Simulation::step() {
  last_record_ = TraceRecord{};
  last_record_.robots.resize(agents_.size());

  // Control decisions, in index order.
  std::vector<ControlInput> chosen(agents_.size());
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    RobotAgent& agent = agents_[j];
    ControlInput u{0.0, 0.0};
    if (agent.role == Role::Explore) {
      u = exploration_control(static_cast<int>(j));
    } else if (scenario_.mode == Mode::Online && !has_local_work(agent)) {
      // Own readings already settled everything assigned here; the rest of
      // the team finds out at the next exchange. Hold position until then.
    } else {
      bool want_plan = scenario_.mode == Mode::Online
                           ? (agent.needs_replan || agent.queue.empty())
                           : !agent.planned_once;
      if (want_plan) replan(agent);
      if (!agent.queue.empty()) {
        u = agent.queue.front();
        agent.queue.pop_front();
      }
    }
    chosen[j] = u;
  }

  // Motion. Planned and exploration controls are collision-checked at
  // construction and the world is static, so successors stay free.
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    agents_[j].pose = apply_motion(agents_[j].pose, chosen[j], kDt);
  }

  // True mobile landmarks advance with process noise.
  for (std::size_t i = 0; i < truth_.size(); ++i) {
    const auto& dyn = dynamics_[i];
    if (dyn.is_static()) continue;
    LandmarkBelief tmp;
    tmp.mean = truth_[i];
    Eigen::Vector2d next = predict_mean(tmp, dyn, t_);
    if (!dyn.Q.isZero(0.0)) {
      Eigen::LLT<Eigen::Matrix2d> llt(dyn.Q);
      Eigen::Vector2d w{gaussian(world_rng_), gaussian(world_rng_)};
      next += llt.matrixL() * w;
    }
    truth_[i] = next;
  }

  // Local predictions and measurements. Readings gate on the true distance;
  // the filters weight them at the estimated distance.
  int label = t_ + 1;
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    RobotAgent& agent = agents_[j];
    for (auto& lm : agent.local_belief.landmarks) {
      const auto& dyn = dynamics_[static_cast<std::size_t>(lm.id)];
      if (dyn.is_static()) continue;
      lm.mean = predict_mean(lm, dyn, t_);
      lm.cov = dyn.A * lm.cov * dyn.A.transpose() + dyn.Q;
    }
    for (std::size_t i = 0; i < truth_.size(); ++i) {
      auto reading = simulate_measurement(agent.pose, truth_[i], scenario_.sensor, world_rng_);
      if (!reading) continue;
      auto& lm = agent.local_belief.landmarks[i];
      lm = ekf_update(lm, agent.pose, *reading, scenario_.sensor);
      BufferedMeasurement m{label, static_cast<int>(j), static_cast<int>(i), *reading, agent.pose};
      buffer_.push_back(m);
      all_measurements_.push_back(m);
    }
  }

  ++t_;
  bool fused_now = t_ % scenario_.comm_period == 0;
  if (fused_now) fuse_buffered();
  // Ownership follows the robots every step, but reads the shared belief,
  // which sits still between exchanges.
  if (scenario_.mode == Mode::Online) refresh_assignments();

  last_record_.t = t_;
  last_record_.fusion = fused_now;
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    RobotAgent& agent = agents_[j];
    auto& entry = last_record_.robots[j];
    entry.id = agent.id;
    entry.pose = agent.pose;
    entry.role = agent.role;
    entry.assigned = agent.assigned;
    entry.control = chosen[j];
    if (agent.role == Role::Aia && !entry.replanned) agent.plan_age += 1;
    entry.plan_age = agent.plan_age;
  }
  for (const auto& lm : fused_.landmarks) {
    last_record_.landmarks.push_back(LandmarkTraceEntry{lm.id, lm.cov.determinant(), lm.mean});
  }
}

bool Simulation::done() const {
  for (const auto& lm : fused_.landmarks) {
    if (lm.cov.determinant() > scenario_.delta) return false;
  }
  return true;
}

RunResult Simulation::run() {
  auto start = std::chrono::steady_clock::now();
  RunResult result;
  while (!done() && t_ < scenario_.step_cap) {
    step();
    result.trace.records.push_back(last_record_);
  }
  result.terminal_step = t_;
  result.timeout = !done();

  RunSummary& s = result.trace.summary;
  s.terminal_step = t_;
  s.timeout = result.timeout;
  s.records = static_cast<int>(result.trace.records.size());
  s.seed = scenario_.seed;
  s.plan_calls = plan_calls_;
  if (plan_calls_ > 0) {
    s.plan_seconds_mean = plan_seconds_sum_ / plan_calls_;
    double var = plan_seconds_sq_sum_ / plan_calls_ - s.plan_seconds_mean * s.plan_seconds_mean;
    s.plan_seconds_std = std::sqrt(std::max(0.0, var));
  }
  if (voronoi_calls_ > 0) s.voronoi_seconds_mean = voronoi_seconds_sum_ / voronoi_calls_;
  s.wall_seconds = seconds_since(start);
  return result;
}

}  // namespace aia
