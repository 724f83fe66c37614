#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "uavloc/crlb.hpp"
#include "uavloc/errors.hpp"
#include "uavloc/measurement_model.hpp"
#include "uavloc/wls_estimator.hpp"

namespace uavloc {

struct MlOptions {
  int max_iterations = 50;
  double step_tolerance_m = 1e-8;
  Eigen::Vector3d initial_guess = Eigen::Vector3d::Zero();
};

// Maximum-likelihood reference estimator: undamped Gauss-Newton on the raw
// measurement residuals, azimuth residual wrapped to (-pi, pi]. Non-convergence
// within max_iterations is reported via the converged flag, with the last
// iterate returned.
inline PositionEstimate ml_locate(const MeasurementVector& m,
                                  const SensorPair& sensors,
                                  const NoiseModel& noise,
                                  const MlOptions& opts) {
  if (opts.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (opts.step_tolerance_m <= 0.0) throw ConfigError("step_tolerance_m must be > 0");

  const Eigen::Vector3d inv_var = detail::inverse_variances(noise);
  const Eigen::Matrix3d weight = inv_var.asDiagonal();

  PositionEstimate est;
  est.position = opts.initial_guess;
  est.converged = false;
  Eigen::Matrix3d normal = Eigen::Matrix3d::Identity();
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    const MeasurementVector pred = true_measurement(est.position, sensors);
    Eigen::Vector3d residual(m.range_diff_m - pred.range_diff_m,
                             wrap_angle(m.azimuth_rad - pred.azimuth_rad),
                             m.elevation_rad - pred.elevation_rad);
    const Eigen::Matrix3d jac = measurement_jacobian(est.position, sensors);
    normal = jac.transpose() * weight * jac;
    double cond = 0.0;
    if (detail::spd_rcond(normal, &cond) < kDefaultSingularTolerance) {
      throw SingularSystem("Gauss-Newton normal equations numerically singular");
    }
    est.condition_number = std::max(est.condition_number, cond);
    const Eigen::Vector3d step = Eigen::FullPivLU<Eigen::Matrix3d>(normal).solve(
        jac.transpose() * (weight * residual));
    est.position += step;
    est.iterations_used = iter;
    if (step.norm() < opts.step_tolerance_m) {
      est.converged = true;
      break;
    }
  }
  const Eigen::Matrix3d cov = Eigen::FullPivLU<Eigen::Matrix3d>(normal).inverse();
  est.covariance = 0.5 * (cov + cov.transpose());
  return est;
}

}  // namespace uavloc
