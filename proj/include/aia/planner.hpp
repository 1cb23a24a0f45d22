#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "aia/estimation.hpp"
#include "aia/geometry.hpp"
#include "aia/rng.hpp"

namespace aia {

enum class GoalMode {
  AnyOfScope,  // some landmark in scope meets the uncertainty bound
  AllOfScope,  // every landmark in scope meets it
};

struct PlannerParams {
  double p_v = 0.9;   // probability of sampling a deepest-level bucket
  double p_u = 0.9;   // probability of the distance-minimizing control
  int n_max = 1000;   // sampling iterations
  GoalMode goal_mode = GoalMode::AnyOfScope;
  double delta = 1.8e-6;
  // By default the search spends the full n_max budget and returns the
  // cheapest goal found. Enabling this returns the first goal instead, which
  // is much faster and rarely longer (the deepest-level bias means later
  // goals are mostly descendants of the first).
  bool stop_at_first_goal = false;
  std::size_t node_budget = 200000;  // hard cap on tree size
};

// One landmark as seen by a single planning episode: prior belief frozen at
// plan time plus its dynamics for mid-plan prediction.
struct ScopeLandmark {
  LandmarkBelief belief;
  LandmarkDynamics dynamics;
};

struct TreeNode {
  Pose pose;
  std::vector<Eigen::Matrix2d> cov_blocks;  // one per scope landmark
  int time = 0;                             // equals depth (hops to root)
  double cost = 0.0;       // accumulated sum of per-landmark determinants
  int parent = -1;
  ControlInput incoming{};  // control that produced this node
  int assigned = -1;        // scope index steering the control bias
};

// Nodes grouped by quantized pose. All nodes of a bucket share the pose, so
// one sampled control extends every one of them.
class PlanTree {
 public:
  explicit PlanTree(TreeNode root);

  int size() const { return static_cast<int>(nodes_.size()); }
  const TreeNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  int bucket_count() const { return static_cast<int>(buckets_.size()); }
  int max_depth() const { return max_depth_; }

  const Pose& bucket_pose(int bucket) const { return buckets_[bucket].pose; }
  const std::vector<int>& bucket_nodes(int bucket) const { return buckets_[bucket].nodes; }
  int find_bucket(const Pose& p) const;  // -1 when no node has this quantized pose
  const std::vector<int>& deepest_buckets() const { return kmax_; }
  bool in_deepest(int bucket) const {
    return buckets_[bucket].kmax_depth == max_depth_;
  }

  // evict_slot >= 0 replaces that member of the target bucket instead of
  // growing it; the displaced node stays in the tree but stops being extended.
  int add_node(TreeNode node, int evict_slot = -1);

 private:
  struct Bucket {
    Pose pose;
    std::vector<int> nodes;
    int kmax_depth = -1;  // depth at which this bucket last joined kmax_
  };
  struct KeyHash {
    std::size_t operator()(const std::array<std::int64_t, 3>& k) const;
  };

  static std::array<std::int64_t, 3> pose_key(const Pose& p);

  std::vector<TreeNode> nodes_;
  std::vector<Bucket> buckets_;
  std::unordered_map<std::array<std::int64_t, 3>, int, KeyHash> bucket_index_;
  std::vector<int> kmax_;  // buckets containing a deepest node
  int max_depth_ = 0;
};

struct PlanStats {
  int nodes = 0;
  int buckets = 0;
  int max_depth = 0;
  int goal_nodes = 0;
  int iterations = 0;
};

struct PlanResult {
  bool feasible = false;
  int horizon = 0;
  std::vector<ControlInput> controls;     // length == horizon
  std::vector<double> achieved_dets;      // per scope landmark at the end node
  PlanStats stats;
};

// Single-robot sampling planner over (pose, covariance, time). Grows a tree
// biased toward the deepest level and toward controls that close the gap to
// the currently assigned landmark, and extracts the path whose accumulated
// uncertainty is smallest among goal nodes.
class LocalPlanner {
 public:
  LocalPlanner(const Workspace& ws, SensorModel sensor, std::vector<ScopeLandmark> scope,
               std::vector<ControlInput> controls, PlannerParams params, int start_time = 0);

  PlanResult plan(const Pose& root_pose, Rng& rng);

  // Individual steps, exposed for testing.
  int sample_bucket(const PlanTree& tree, Rng& rng) const;
  ControlInput sample_control(const PlanTree& tree, int node_id, Rng& rng);
  std::vector<int> extend(PlanTree& tree, int bucket, const ControlInput& u);
  int assign_targets(int parent_assigned, const std::vector<Eigen::Matrix2d>& cov_blocks,
                     const Eigen::Vector2d& robot_position, int time);

  const Eigen::Vector2d& predicted_mean_at(int scope_index, int time);
  bool node_is_goal(const std::vector<Eigen::Matrix2d>& cov_blocks) const;

 private:
  double geodesic_to_target(const Eigen::Vector2d& from, const Eigen::Vector2d& target);
  bool is_dominated_state(const PlanTree& tree, const TreeNode& child) const;

  const Workspace& ws_;
  SensorModel sensor_;
  std::vector<ScopeLandmark> scope_;
  std::vector<ControlInput> controls_;
  PlannerParams params_;
  int start_time_ = 0;

  std::vector<std::vector<Eigen::Vector2d>> mean_memo_;  // [scope][node time]
  std::map<int, std::unique_ptr<GeodesicField>> field_cache_;  // by target cell
  std::vector<int> goals_;
};

}  // namespace aia
