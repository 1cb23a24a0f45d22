#include "aia/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace aia {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double wrap_angle(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

Workspace::Workspace(double width, double height, std::vector<Rect> obstacles,
                     double grid_resolution)
    : width_(width), height_(height), resolution_(grid_resolution), obstacles_(std::move(obstacles)) {
  if (!(width_ > 0.0) || !(height_ > 0.0)) {
    throw std::invalid_argument("workspace dimensions must be positive");
  }
  if (!(resolution_ > 0.0) || resolution_ > std::min(width_, height_) / 4.0) {
    throw std::invalid_argument("grid_resolution must be positive and at most min(width,height)/4");
  }
  for (const Rect& r : obstacles_) {
    if (!(r.x_max > r.x_min) || !(r.y_max > r.y_min)) {
      throw std::invalid_argument("obstacle rectangle must have positive area");
    }
    if (r.x_min < 0.0 || r.y_min < 0.0 || r.x_max > width_ || r.y_max > height_) {
      throw std::invalid_argument("obstacle rectangle must lie within workspace bounds");
    }
  }
  nx_ = static_cast<int>(std::ceil(width_ / resolution_ - 1e-9));
  ny_ = static_cast<int>(std::ceil(height_ / resolution_ - 1e-9));
}

bool Workspace::is_free(const Eigen::Vector2d& p) const {
  if (p.x() < 0.0 || p.x() > width_ || p.y() < 0.0 || p.y() > height_) return false;
  for (const Rect& r : obstacles_) {
    if (r.contains(p)) return false;
  }
  return true;
}

Eigen::Vector2d Workspace::cell_center(int ix, int iy) const {
  return {(ix + 0.5) * resolution_, (iy + 0.5) * resolution_};
}

int Workspace::cell_of(const Eigen::Vector2d& p, int* ix_out, int* iy_out) const {
  int ix = static_cast<int>(std::floor(p.x() / resolution_));
  int iy = static_cast<int>(std::floor(p.y() / resolution_));
  ix = std::max(0, std::min(nx_ - 1, ix));
  iy = std::max(0, std::min(ny_ - 1, iy));
  if (ix_out) *ix_out = ix;
  if (iy_out) *iy_out = iy;
  return iy * nx_ + ix;
}

Pose apply_motion(const Pose& p, const ControlInput& u, double dt) {
  Pose out;
  out.x = p.x + u.v * dt * std::cos(p.theta);
  out.y = p.y + u.v * dt * std::sin(p.theta);
  out.theta = wrap_angle(p.theta + u.omega * dt);
  return out;
}

int voronoi_owner(const Eigen::Vector2d& point,
                  const std::vector<Eigen::Vector2d>& robot_positions) {
  if (robot_positions.empty()) throw std::invalid_argument("no robots");
  int best = 0;
  double best_d2 = (point - robot_positions[0]).squaredNorm();
  for (int j = 1; j < static_cast<int>(robot_positions.size()); ++j) {
    double d2 = (point - robot_positions[j]).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = j;
    }
  }
  return best;
}

int GeodesicField::snap_to_free_cell(const Eigen::Vector2d& p) const {
  int ix, iy;
  ws_.cell_of(p, &ix, &iy);
  if (ws_.is_free(ws_.cell_center(ix, iy))) return iy * ws_.grid_nx() + ix;

  // Expand in rings until a free cell center appears; pick the one closest
  // to p in Euclidean distance.
  int nx = ws_.grid_nx(), ny = ws_.grid_ny();
  int max_ring = std::max(nx, ny);
  for (int ring = 1; ring <= max_ring; ++ring) {
    int best = -1;
    double best_d2 = kInf;
    for (int dy = -ring; dy <= ring; ++dy) {
      for (int dx = -ring; dx <= ring; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
        int cx = ix + dx, cy = iy + dy;
        if (cx < 0 || cx >= nx || cy < 0 || cy >= ny) continue;
        Eigen::Vector2d c = ws_.cell_center(cx, cy);
        if (!ws_.is_free(c)) continue;
        double d2 = (c - p).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best = cy * nx + cx;
        }
      }
    }
    if (best >= 0) return best;
  }
  return -1;
}

GeodesicField::GeodesicField(const Workspace& ws, const Eigen::Vector2d& target) : ws_(ws) {
  int nx = ws.grid_nx(), ny = ws.grid_ny();
  dist_.assign(static_cast<std::size_t>(nx) * ny, kInf);
  target_cell_ = snap_to_free_cell(target);
  if (target_cell_ < 0) return;

  const double res = ws.grid_resolution();
  const double diag = std::numbers::sqrt2 * res;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist_[target_cell_] = 0.0;
  heap.emplace(0.0, target_cell_);
  while (!heap.empty()) {
    auto [d, cell] = heap.top();
    heap.pop();
    if (d > dist_[cell]) continue;
    int cx = cell % nx, cy = cell / nx;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        int mx = cx + dx, my = cy + dy;
        if (mx < 0 || mx >= nx || my < 0 || my >= ny) continue;
        if (!ws.is_free(ws.cell_center(mx, my))) continue;
        double nd = d + ((dx != 0 && dy != 0) ? diag : res);
        int ncell = my * nx + mx;
        if (nd < dist_[ncell]) {
          dist_[ncell] = nd;
          heap.emplace(nd, ncell);
        }
      }
    }
  }
}

std::optional<double> GeodesicField::distance_to(const Eigen::Vector2d& p) const {
  if (target_cell_ < 0) return std::nullopt;
  int cell = snap_to_free_cell(p);
  if (cell < 0) return std::nullopt;
  double d = dist_[cell];
  if (d == kInf) return std::nullopt;
  return d;
}

std::optional<double> geodesic_distance(const Workspace& ws, const Eigen::Vector2d& a,
                                        const Eigen::Vector2d& b) {
  if (!ws.is_free(a) || !ws.is_free(b)) {
    throw std::invalid_argument("query point in obstacle");
  }
  GeodesicField field(ws, b);
  return field.distance_to(a);
}

}  // namespace aia
