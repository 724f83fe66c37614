#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "uavloc/errors.hpp"
#include "uavloc/measurement_model.hpp"
#include "uavloc/wls_estimator.hpp"

namespace uavloc {

struct CrlbResult {
  Eigen::Matrix3d fim = Eigen::Matrix3d::Zero();   // J^T Q_m^{-1} J
  Eigen::Matrix3d crlb = Eigen::Matrix3d::Zero();  // fim^{-1}, m^2
  double rmse_bound_m = 0.0;                       // sqrt(trace(crlb))
};

// Analytic Jacobian of (r, azimuth, elevation) with respect to the source
// position, rows in measurement order:
//   grad r  = (u-s2)/||u-s2|| - (u-s1)/||u-s1||
//   grad az = -alpha / (||u-s1|| cos(el))
//   grad el = -beta / ||u-s1||
// Signs follow the gradients of atan2; per-row sign flips would leave the
// Fisher information unchanged.
inline Eigen::Matrix3d measurement_jacobian(const Eigen::Vector3d& source,
                                            const SensorPair& sensors) {
  const MeasurementVector m = true_measurement(source, sensors);
  const double cel = std::cos(m.elevation_rad);
  if (cel < kMinCosElevation) {
    throw NearSingularElevation("elevation at +-90 deg: azimuth gradient undefined");
  }
  const Eigen::Vector3d p1 = source - sensors.s1;
  const Eigen::Vector3d p2 = source - sensors.s2;
  const double range1 = p1.norm();
  const auto [alpha, beta] = aoa_basis(m.azimuth_rad, m.elevation_rad);

  Eigen::Matrix3d jac;
  jac.row(0) = p2.normalized() - p1.normalized();
  jac.row(1) = -alpha / (range1 * cel);
  jac.row(2) = -beta / range1;
  return jac;
}

// Cramer-Rao lower bound for an unbiased estimator of the source position
// under the Gaussian noise model.
inline CrlbResult crlb(const Eigen::Vector3d& source, const SensorPair& sensors,
                       const NoiseModel& noise) {
  if (noise.sigma_r_m <= 0.0 || noise.sigma_az_rad <= 0.0 || noise.sigma_el_rad <= 0.0) {
    throw ConfigError("crlb requires strictly positive noise sigmas");
  }
  const Eigen::Matrix3d jac = measurement_jacobian(source, sensors);
  const Eigen::Vector3d inv_var(1.0 / (noise.sigma_r_m * noise.sigma_r_m),
                                1.0 / (noise.sigma_az_rad * noise.sigma_az_rad),
                                1.0 / (noise.sigma_el_rad * noise.sigma_el_rad));
  CrlbResult out;
  out.fim = jac.transpose() * inv_var.asDiagonal() * jac;
  if (detail::spd_rcond(out.fim) < kDefaultSingularTolerance) {
    throw SingularSystem("Fisher information matrix numerically singular");
  }
  const Eigen::Matrix3d inv = Eigen::FullPivLU<Eigen::Matrix3d>(out.fim).inverse();
  out.crlb = 0.5 * (inv + inv.transpose());
  out.rmse_bound_m = std::sqrt(out.crlb.trace());
  return out;
}

}  // namespace uavloc
