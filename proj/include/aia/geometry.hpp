#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace aia {

// Heading stored normalized to [0, 2*pi).
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }
};

double wrap_angle(double theta);

struct ControlInput {
  double v = 0.0;      // forward speed, m/s
  double omega = 0.0;  // turn rate, rad/s

  bool operator==(const ControlInput&) const = default;
};

// Axis-aligned obstacle. Closed: boundary points count as occupied.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
};

class Workspace {
 public:
  Workspace(double width, double height, std::vector<Rect> obstacles = {},
            double grid_resolution = 0.1);

  double width() const { return width_; }
  double height() const { return height_; }
  double grid_resolution() const { return resolution_; }
  const std::vector<Rect>& obstacles() const { return obstacles_; }

  // Inside the (closed) bounds and outside every obstacle.
  bool is_free(const Eigen::Vector2d& p) const;

  int grid_nx() const { return nx_; }
  int grid_ny() const { return ny_; }
  Eigen::Vector2d cell_center(int ix, int iy) const;
  int cell_of(const Eigen::Vector2d& p, int* ix = nullptr, int* iy = nullptr) const;

 private:
  double width_;
  double height_;
  double resolution_;
  std::vector<Rect> obstacles_;
  int nx_;
  int ny_;
};

// Unicycle step: exact for the piecewise-constant control over dt.
// Collision checking is the caller's job.
Pose apply_motion(const Pose& p, const ControlInput& u, double dt);

// Index of the closest robot (squared Euclidean); ties go to the lowest index.
// Throws std::invalid_argument when robot_positions is empty.
int voronoi_owner(const Eigen::Vector2d& point,
                  const std::vector<Eigen::Vector2d>& robot_positions);

// Shortest-path distances over the workspace occupancy grid, 8-connected,
// diagonal steps cost sqrt(2) * resolution. Built once per target point and
// queried many times.
class GeodesicField {
 public:
  GeodesicField(const Workspace& ws, const Eigen::Vector2d& target);

  // nullopt when p (after snapping to the nearest free cell) is unreachable
  // from the target.
  std::optional<double> distance_to(const Eigen::Vector2d& p) const;

  bool target_snapped() const { return target_cell_ >= 0; }

 private:
  const Workspace& ws_;
  std::vector<double> dist_;  // infinity = unreachable
  int target_cell_ = -1;

  int snap_to_free_cell(const Eigen::Vector2d& p) const;

  friend std::optional<double> geodesic_distance(const Workspace&, const Eigen::Vector2d&,
                                                 const Eigen::Vector2d&);
};

// Grid-geodesic distance between two free points, endpoints snapped to the
// nearest free cell centers. nullopt when no path exists. Throws
// std::invalid_argument when either endpoint is not free.
std::optional<double> geodesic_distance(const Workspace& ws, const Eigen::Vector2d& a,
                                        const Eigen::Vector2d& b);

}  // namespace aia
