#include "aia/estimation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aia {

namespace {
constexpr double kDegenerateDet = 1e-300;
}

std::optional<Eigen::RowVector2d> measurement_jacobian(const Pose& p,
                                                       const Eigen::Vector2d& x_hat,
                                                       double range) {
  Eigen::Vector2d diff = x_hat - p.position();
  double dist = diff.norm();
  if (dist > range) return std::nullopt;
  if (dist < 1e-9) return Eigen::RowVector2d(1.0, 0.0);
  return Eigen::RowVector2d(diff.x() / dist, diff.y() / dist);
}

double measurement_noise_variance(const SensorModel& model, double distance) {
  if (distance > model.range) return std::numeric_limits<double>::infinity();
  double sigma = std::max(model.noise_floor, model.noise_slope * distance);
  return sigma * sigma;
}

Eigen::Vector2d predict_mean(const LandmarkBelief& belief, const LandmarkDynamics& dyn, int t) {
  if (dyn.is_static()) return belief.mean;
  Eigen::Vector2d mean = dyn.A * belief.mean;
  if (!dyn.B.isZero(0.0)) {
    if (t < 0 || t >= static_cast<int>(dyn.input_sequence.size())) {
      throw std::out_of_range("missing landmark control");
    }
    mean += dyn.B * dyn.input_sequence[static_cast<std::size_t>(t)];
  }
  return mean;
}

Eigen::Matrix2d riccati_update(const LandmarkBelief& belief, const Pose& p,
                               const SensorModel& model, const LandmarkDynamics& dyn,
                               const std::optional<Eigen::Vector2d>& predicted_mean) {
  if (belief.cov.determinant() < kDegenerateDet) {
    throw std::invalid_argument("degenerate prior");
  }
  Eigen::Matrix2d pred = dyn.A * belief.cov * dyn.A.transpose() + dyn.Q;
  Eigen::Vector2d mean = predicted_mean ? *predicted_mean : Eigen::Vector2d(dyn.A * belief.mean);

  auto H = measurement_jacobian(p, mean, model.range);
  if (!H) return pred;

  double dist = (mean - p.position()).norm();
  double r = measurement_noise_variance(model, dist);
  Eigen::Matrix2d info = pred.inverse() + H->transpose() * (*H) / r;
  Eigen::Matrix2d post = info.inverse();
  return 0.5 * (post + post.transpose());
}

std::optional<double> simulate_measurement(const Pose& p, const Eigen::Vector2d& x_true,
                                           const SensorModel& model, Rng& rng) {
  double dist = (x_true - p.position()).norm();
  if (dist > model.range) return std::nullopt;
  double sigma = std::sqrt(measurement_noise_variance(model, dist));
  return dist + sigma * gaussian(rng);
}

LandmarkBelief ekf_update(const LandmarkBelief& belief, const Pose& p, double measurement,
                          const SensorModel& model) {
  Eigen::Vector2d diff = belief.mean - p.position();
  double est_dist = diff.norm();
  Eigen::RowVector2d H = est_dist < 1e-9 ? Eigen::RowVector2d(1.0, 0.0)
                                         : Eigen::RowVector2d(diff.x() / est_dist,
                                                              diff.y() / est_dist);
  // R at the estimated distance; an estimate beyond range gives infinite R
  // and the reading carries no weight.
  double r = measurement_noise_variance(model, est_dist);
  double s = (H * belief.cov * H.transpose())(0, 0) + r;
  if (!(s > 0.0) || std::isnan(s)) {
    throw std::runtime_error("numerical failure");
  }
  Eigen::Vector2d gain = belief.cov * H.transpose() / s;
  double innovation = measurement - est_dist;

  LandmarkBelief out = belief;
  out.mean = belief.mean + gain * innovation;
  Eigen::Matrix2d cov = (Eigen::Matrix2d::Identity() - gain * H) * belief.cov;
  out.cov = 0.5 * (cov + cov.transpose());
  return out;
}

std::vector<double> det_per_landmark(const GlobalBelief& belief) {
  std::vector<double> dets;
  dets.reserve(belief.landmarks.size());
  for (const auto& lm : belief.landmarks) dets.push_back(lm.cov.determinant());
  return dets;
}

}  // namespace aia
