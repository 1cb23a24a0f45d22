#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "aia/geometry.hpp"
#include "aia/rng.hpp"

namespace aia {

// Gaussian belief over one landmark's planar position.
struct LandmarkBelief {
  int id = 0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

// Per-landmark blocks; cross-covariances between landmarks stay zero because
// measurements are landmark-local, so the joint belief is block-diagonal.
struct GlobalBelief {
  std::vector<LandmarkBelief> landmarks;
};

// Range-only sensor: reading = distance + zero-mean Gaussian noise whose
// standard deviation grows linearly with distance. No reading beyond range.
struct SensorModel {
  double range = 2.0;
  double noise_slope = 0.25;
  double noise_floor = 0.01;
};

// x(t+1) = A x(t) + B a(t) + w,  w ~ N(0, Q). Static landmarks are the
// A = I, B = 0, Q = 0 special case and need no input sequence.
struct LandmarkDynamics {
  Eigen::Matrix2d A = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d B = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
  std::vector<Eigen::Vector2d> input_sequence;

  bool is_static() const {
    return A.isIdentity(0.0) && B.isZero(0.0) && Q.isZero(0.0);
  }
};

// Row Jacobian of the range measurement w.r.t. the landmark position,
// evaluated at estimate x_hat from sensing pose p. nullopt beyond range.
// Degenerate case (estimate on top of the sensor) falls back to +x.
std::optional<Eigen::RowVector2d> measurement_jacobian(const Pose& p,
                                                       const Eigen::Vector2d& x_hat,
                                                       double range);

// Variance of the range noise at the given distance; +infinity beyond range.
double measurement_noise_variance(const SensorModel& model, double distance);

// One-step mean prediction. Throws std::out_of_range ("missing landmark
// control") when a needed input at time t is not supplied.
Eigen::Vector2d predict_mean(const LandmarkBelief& belief, const LandmarkDynamics& dyn, int t);

// Covariance-only filter step: predict through the dynamics, then (when the
// predicted mean is within sensor range of p) the information-form range
// update. predicted_mean overrides the internally predicted A*mean when the
// caller has already propagated the mean (mobile landmarks mid-plan).
Eigen::Matrix2d riccati_update(const LandmarkBelief& belief, const Pose& p,
                               const SensorModel& model, const LandmarkDynamics& dyn,
                               const std::optional<Eigen::Vector2d>& predicted_mean = std::nullopt);

// Noisy range reading against the true landmark position; nullopt when the
// true distance exceeds the sensor range. Uses only the supplied generator.
std::optional<double> simulate_measurement(const Pose& p, const Eigen::Vector2d& x_true,
                                           const SensorModel& model, Rng& rng);

// Mean-and-covariance filter update for one real measurement. R is evaluated
// at the estimated distance. Throws std::runtime_error on numerical failure.
LandmarkBelief ekf_update(const LandmarkBelief& belief, const Pose& p, double measurement,
                          const SensorModel& model);

std::vector<double> det_per_landmark(const GlobalBelief& belief);

}  // namespace aia
