#include "aia/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aia {

namespace {
constexpr double kDt = 1.0;
constexpr double kQuant = 1e6;  // pose quantization for bucket keys
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStateTol = 1e-12;  // covariance/cost slack when comparing node states
// Incomparable belief states (e.g. successive passes around a target, each
// later but better informed) accumulate at revisited poses, and every
// extension copies the whole pile. Cap the extendable states per pose,
// keeping the lowest-uncertainty ones.
constexpr std::size_t kBucketCap = 64;
}  // namespace

std::size_t PlanTree::KeyHash::operator()(const std::array<std::int64_t, 3>& k) const {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(k[0]));
  h = splitmix64(h ^ static_cast<std::uint64_t>(k[1]));
  return splitmix64(h ^ static_cast<std::uint64_t>(k[2]));
}

std::array<std::int64_t, 3> PlanTree::pose_key(const Pose& p) {
  return {static_cast<std::int64_t>(std::llround(p.x * kQuant)),
          static_cast<std::int64_t>(std::llround(p.y * kQuant)),
          static_cast<std::int64_t>(std::llround(p.theta * kQuant))};
}

PlanTree::PlanTree(TreeNode root) {
  root.parent = -1;
  root.time = 0;
  add_node(std::move(root));
}

int PlanTree::find_bucket(const Pose& p) const {
  auto it = bucket_index_.find(pose_key(p));
  return it == bucket_index_.end() ? -1 : it->second;
}

int PlanTree::add_node(TreeNode node, int evict_slot) {
  int id = static_cast<int>(nodes_.size());
  int depth = node.time;

  auto key = pose_key(node.pose);
  auto [it, inserted] = bucket_index_.try_emplace(key, static_cast<int>(buckets_.size()));
  if (inserted) {
    buckets_.push_back(Bucket{node.pose, {}, -1});
  }
  int b = it->second;
  if (evict_slot >= 0 && !inserted) {
    // Replace a bucket member: the evicted node stays in the tree as a leaf
    // but is no longer extended.
    buckets_[b].nodes[static_cast<std::size_t>(evict_slot)] = id;
  } else {
    buckets_[b].nodes.push_back(id);
  }
  nodes_.push_back(std::move(node));

  if (depth > max_depth_) {
    max_depth_ = depth;
    kmax_.clear();
  }
  if (depth == max_depth_ && buckets_[b].kmax_depth != max_depth_) {
    buckets_[b].kmax_depth = max_depth_;
    kmax_.push_back(b);
  }
  return id;
}

LocalPlanner::LocalPlanner(const Workspace& ws, SensorModel sensor,
                           std::vector<ScopeLandmark> scope, std::vector<ControlInput> controls,
                           PlannerParams params, int start_time)
    : ws_(ws),
      sensor_(sensor),
      scope_(std::move(scope)),
      controls_(std::move(controls)),
      params_(params),
      start_time_(start_time) {
  if (controls_.empty()) throw std::invalid_argument("empty control set");
  mean_memo_.resize(scope_.size());
  for (std::size_t i = 0; i < scope_.size(); ++i) {
    mean_memo_[i].push_back(scope_[i].belief.mean);
  }
}

const Eigen::Vector2d& LocalPlanner::predicted_mean_at(int scope_index, int time) {
  auto& memo = mean_memo_[static_cast<std::size_t>(scope_index)];
  const auto& dyn = scope_[static_cast<std::size_t>(scope_index)].dynamics;
  while (static_cast<int>(memo.size()) <= time) {
    int t = start_time_ + static_cast<int>(memo.size()) - 1;
    LandmarkBelief step;
    step.mean = memo.back();
    memo.push_back(predict_mean(step, dyn, t));
  }
  return memo[static_cast<std::size_t>(time)];
}

bool LocalPlanner::node_is_goal(const std::vector<Eigen::Matrix2d>& cov_blocks) const {
  bool any = false, all = true;
  for (const auto& blk : cov_blocks) {
    bool sat = blk.determinant() <= params_.delta;
    any = any || sat;
    all = all && sat;
  }
  return params_.goal_mode == GoalMode::AllOfScope ? all : any;
}

int LocalPlanner::sample_bucket(const PlanTree& tree, Rng& rng) const {
  const auto& deepest = tree.deepest_buckets();
  int total = tree.bucket_count();
  bool take_deepest = uniform01(rng) < params_.p_v;
  if (!take_deepest && total > static_cast<int>(deepest.size())) {
    for (;;) {
      int b = uniform_index(rng, total);
      if (!tree.in_deepest(b)) return b;
    }
  }
  return deepest[static_cast<std::size_t>(uniform_index(rng, static_cast<int>(deepest.size())))];
}

double LocalPlanner::geodesic_to_target(const Eigen::Vector2d& from,
                                        const Eigen::Vector2d& target) {
  int cell = ws_.cell_of(target);
  auto it = field_cache_.find(cell);
  if (it == field_cache_.end()) {
    it = field_cache_.emplace(cell, std::make_unique<GeodesicField>(ws_, target)).first;
  }
  auto d = it->second->distance_to(from);
  return d ? *d : kInf;
}

ControlInput LocalPlanner::sample_control(const PlanTree& tree, int node_id, Rng& rng) {
  const TreeNode& q = tree.node(node_id);
  int n = static_cast<int>(controls_.size());
  if (q.assigned < 0) return controls_[static_cast<std::size_t>(uniform_index(rng, n))];

  const Eigen::Vector2d& target = predicted_mean_at(q.assigned, q.time + 1);
  double dist = (target - q.pose.position()).norm();
  if (dist <= sensor_.range) {
    // Close enough to measure: no pull toward the target.
    return controls_[static_cast<std::size_t>(uniform_index(rng, n))];
  }

  int best = -1;
  double best_d = kInf;
  double best_e = kInf;
  for (int i = 0; i < n; ++i) {
    Pose succ = apply_motion(q.pose, controls_[static_cast<std::size_t>(i)], kDt);
    if (!ws_.is_free(succ.position())) continue;
    double d = geodesic_to_target(succ.position(), target);
    // Geodesic distance is cell-granular, so one step often ties; break ties by
    // straight-line distance or the argmin degenerates to "stay put".
    double e = (target - succ.position()).norm();
    if (d < best_d || (d == best_d && e < best_e)) {
      best_d = d;
      best_e = e;
      best = i;
    }
  }
  if (best < 0) return controls_[static_cast<std::size_t>(uniform_index(rng, n))];
  if (uniform01(rng) < params_.p_u) return controls_[static_cast<std::size_t>(best)];
  return controls_[static_cast<std::size_t>(uniform_index(rng, n))];
}

int LocalPlanner::assign_targets(int parent_assigned, const std::vector<Eigen::Matrix2d>& blocks,
                                 const Eigen::Vector2d& robot_position, int time) {
  auto satisfied = [&](int i) {
    return blocks[static_cast<std::size_t>(i)].determinant() <= params_.delta;
  };
  if (parent_assigned >= 0 && !satisfied(parent_assigned)) return parent_assigned;

  int n = static_cast<int>(scope_.size());
  int best = -1;
  double best_d = kInf;
  for (int i = 0; i < n; ++i) {
    if (i == parent_assigned || satisfied(i)) continue;
    double d = (predicted_mean_at(i, time) - robot_position).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best >= 0) return best;
  // Nothing new to take: fall back to any unsatisfied target, else keep.
  for (int i = 0; i < n; ++i) {
    if (satisfied(i)) continue;
    double d = (predicted_mean_at(i, time) - robot_position).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best >= 0 ? best : parent_assigned;
}

bool LocalPlanner::is_dominated_state(const PlanTree& tree, const TreeNode& child) const {
  int b = tree.find_bucket(child.pose);
  if (b < 0) return false;
  for (int eid : tree.bucket_nodes(b)) {
    const TreeNode& e = tree.node(eid);
    if (e.time > child.time || e.assigned != child.assigned) continue;
    if (e.cost > child.cost + kStateTol) continue;
    bool dominates = true;
    for (std::size_t i = 0; i < child.cov_blocks.size() && dominates; ++i) {
      // child.cov - e.cov must be PSD: for a symmetric 2x2, diagonal and
      // determinant nonnegative.
      Eigen::Matrix2d d =
          child.cov_blocks[i] - e.cov_blocks[i] + kStateTol * Eigen::Matrix2d::Identity();
      dominates = d(0, 0) >= 0.0 && d(1, 1) >= 0.0 && d.determinant() >= 0.0;
    }
    if (dominates) return true;
  }
  return false;
}

std::vector<int> LocalPlanner::extend(PlanTree& tree, int bucket, const ControlInput& u) {
  Pose p_new = apply_motion(tree.bucket_pose(bucket), u, kDt);
  if (!ws_.is_free(p_new.position())) return {};

  std::vector<int> parents = tree.bucket_nodes(bucket);  // copy: u may refill this bucket
  std::vector<int> created;
  created.reserve(parents.size());
  for (int pid : parents) {
    const TreeNode& parent = tree.node(pid);
    int t_child = parent.time + 1;

    TreeNode child;
    child.pose = p_new;
    child.time = t_child;
    child.parent = pid;
    child.incoming = u;
    child.cov_blocks.reserve(scope_.size());
    double sum_det = 0.0;
    for (std::size_t i = 0; i < scope_.size(); ++i) {
      LandmarkBelief b;
      b.cov = parent.cov_blocks[i];
      Eigen::Matrix2d post = riccati_update(b, p_new, sensor_, scope_[i].dynamics,
                                            predicted_mean_at(static_cast<int>(i), t_child));
      sum_det += post.determinant();
      child.cov_blocks.push_back(post);
    }
    child.cost = parent.cost + sum_det;
    child.assigned = assign_targets(parent.assigned, child.cov_blocks, p_new.position(), t_child);

    // Control cycles and reshuffled measurement orders revisit a pose carrying
    // a belief no better than one already there, and re-extending such copies
    // multiplies bucket sizes without adding reachable information states. The
    // covariance recursion preserves the ordering, so a node that is no later,
    // no costlier, and no less certain makes the newcomer redundant.
    if (is_dominated_state(tree, child)) continue;

    int evict = -1;
    int target = tree.find_bucket(p_new);
    if (target >= 0 && tree.bucket_nodes(target).size() >= kBucketCap) {
      const auto& members = tree.bucket_nodes(target);
      double worst_sum = -1.0;
      for (std::size_t s = 0; s < members.size(); ++s) {
        double sum = 0.0;
        for (const auto& blk : tree.node(members[s]).cov_blocks) sum += blk.determinant();
        if (sum > worst_sum) {
          worst_sum = sum;
          evict = static_cast<int>(s);
        }
      }
      if (sum_det >= worst_sum) continue;  // newcomer would be the first out
    }

    bool goal = node_is_goal(child.cov_blocks);
    int id = tree.add_node(std::move(child), evict);
    if (goal) goals_.push_back(id);
    created.push_back(id);
  }
  return created;
}

PlanResult LocalPlanner::plan(const Pose& root_pose, Rng& rng) {
  if (scope_.empty()) throw std::invalid_argument("no targets in scope");
  if (!ws_.is_free(root_pose.position())) throw std::invalid_argument("root pose in collision");
  goals_.clear();

  TreeNode root;
  root.pose = root_pose;
  root.cost = 0.0;
  root.cov_blocks.reserve(scope_.size());
  for (const auto& s : scope_) {
    root.cov_blocks.push_back(s.belief.cov);
    root.cost += s.belief.cov.determinant();
  }
  root.assigned = assign_targets(-1, root.cov_blocks, root_pose.position(), 0);

  bool root_goal = node_is_goal(root.cov_blocks);
  PlanTree tree(std::move(root));
  if (root_goal) goals_.push_back(0);

  int iterations = 0;
  for (int it = 0; it < params_.n_max; ++it) {
    if (params_.stop_at_first_goal && !goals_.empty()) break;
    if (static_cast<std::size_t>(tree.size()) >= params_.node_budget) break;
    ++iterations;
    int bucket = sample_bucket(tree, rng);
    const auto& members = tree.bucket_nodes(bucket);
    int rep = members[static_cast<std::size_t>(uniform_index(rng, static_cast<int>(members.size())))];
    ControlInput u = sample_control(tree, rep, rng);
    extend(tree, bucket, u);
  }

  PlanResult result;
  result.stats.nodes = tree.size();
  result.stats.buckets = tree.bucket_count();
  result.stats.max_depth = tree.max_depth();
  result.stats.goal_nodes = static_cast<int>(goals_.size());
  result.stats.iterations = iterations;

  int best = -1;
  if (!goals_.empty()) {
    result.feasible = true;
    double best_cost = kInf;
    for (int id : goals_) {
      double c = tree.node(id).cost;
      if (c < best_cost) {
        best_cost = c;
        best = id;
      }
    }
  } else {
    // Best effort: the node with the least current total uncertainty.
    double best_sum = kInf;
    for (int id = 0; id < tree.size(); ++id) {
      double sum = 0.0;
      for (const auto& blk : tree.node(id).cov_blocks) sum += blk.determinant();
      if (sum < best_sum) {
        best_sum = sum;
        best = id;
      }
    }
  }

  const TreeNode* n = &tree.node(best);
  result.horizon = n->time;
  for (const auto& blk : n->cov_blocks) result.achieved_dets.push_back(blk.determinant());
  std::vector<ControlInput> controls;
  while (n->parent >= 0) {
    controls.push_back(n->incoming);
    n = &tree.node(n->parent);
  }
  std::reverse(controls.begin(), controls.end());
  result.controls = std::move(controls);
  return result;
}

}  // namespace aia
