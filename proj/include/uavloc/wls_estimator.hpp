#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "uavloc/errors.hpp"
#include "uavloc/measurement_model.hpp"

namespace uavloc {

// Pseudo-linear 3x3 system h = G u built from one TDOA/AOA measurement.
// At noise-free measurements of a true source u, h - G u = 0 to round-off.
struct PseudoLinearSystem {
  Eigen::Vector3d h;  // [h_r, h_az, h_el]
  Eigen::Matrix3d G;  // rows: g_r^T, alpha^T, beta^T
};

// Diagonal first-order map from measurement noise to pseudo-linear equation
// error: eps ~ B * dm. Only B Q_m B^T enters the weights, so per-entry signs
// are immaterial; entries are stored positive.
struct LinearizedNoiseMap {
  double b_r = 0.0;
  double b_az = 0.0;
  double b_el = 0.0;

  Eigen::Matrix3d as_matrix() const {
    return Eigen::Vector3d(b_r, b_az, b_el).asDiagonal();
  }
};

struct EstimatorOptions {
  int refinement_iterations = 2;            // total WLS solves; 1 = plain Q^-1 weighting
  double singular_tolerance = 1e-12;        // reciprocal condition threshold
};

struct PositionEstimate {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // meters
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // m^2
  int iterations_used = 0;
  double condition_number = 0.0;  // worst normal-equation condition seen
  bool converged = true;          // Gauss-Newton only; WLS is non-iterative
};

namespace detail {

// Reciprocal condition number of a symmetric PSD 3x3 matrix.
inline double spd_rcond(const Eigen::Matrix3d& m, double* cond_out = nullptr) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m, Eigen::EigenvaluesOnly);
  const double lo = std::abs(es.eigenvalues()(0));
  const double hi = std::abs(es.eigenvalues()(2));
  if (cond_out) *cond_out = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  return (hi > 0.0) ? lo / hi : 0.0;
}

// Weights 1/sigma^2 per channel; zero-noise channels fall back to unit
// variance. The estimate is weight-independent for this square system, so the
// fallback only keeps the normal equations finite.
inline Eigen::Vector3d inverse_variances(const NoiseModel& noise) {
  auto inv = [](double sigma) {
    return sigma > 0.0 ? 1.0 / (sigma * sigma) : 1.0;
  };
  return {inv(noise.sigma_r_m), inv(noise.sigma_az_rad), inv(noise.sigma_el_rad)};
}

}  // namespace detail

// Stack the squared-range equation and the two AOA plane equations.
inline PseudoLinearSystem build_system(const MeasurementVector& m,
                                       const SensorPair& sensors) {
  if (std::cos(m.elevation_rad) < kMinCosElevation) {
    throw NearSingularElevation("elevation at +-90 deg: AOA planes degenerate");
  }
  const Eigen::Vector3d d = direction_vector(m.azimuth_rad, m.elevation_rad);
  const auto [alpha, beta] = aoa_basis(m.azimuth_rad, m.elevation_rad);
  const double r = m.range_diff_m;

  PseudoLinearSystem sys;
  sys.h(0) = r * r + sensors.s1.squaredNorm() - sensors.s2.squaredNorm() -
             2.0 * r * d.dot(sensors.s1);
  sys.h(1) = alpha.dot(sensors.s1);
  sys.h(2) = beta.dot(sensors.s1);
  sys.G.row(0) = 2.0 * (sensors.s1 - sensors.s2 - r * d);
  sys.G.row(1) = alpha;
  sys.G.row(2) = beta;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(sys.G);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(2);
  if (smax <= 0.0 || smin / smax < kDefaultSingularTolerance) {
    throw DegenerateGeometry("pseudo-linear system is rank-deficient");
  }
  return sys;
}

// First-order noise map evaluated at the (noisy) measurement and the current
// position estimate. b_r = 2(r - s1.d + d.u), which equals 2||u - s2|| at the
// true values.
inline LinearizedNoiseMap b_matrix(const MeasurementVector& m,
                                   const SensorPair& sensors,
                                   const Eigen::Vector3d& u_current) {
  const double cel = std::cos(m.elevation_rad);
  if (cel < kMinCosElevation) {
    throw NearSingularElevation("elevation at +-90 deg: B_az vanishes");
  }
  const Eigen::Vector3d d = direction_vector(m.azimuth_rad, m.elevation_rad);
  const double range1 = (u_current - sensors.s1).norm();
  if (range1 <= kMinSourceRangeM) {
    throw DegenerateGeometry("current estimate coincides with the ground sensor");
  }
  LinearizedNoiseMap b;
  b.b_r = 2.0 * (m.range_diff_m - sensors.s1.dot(d) + d.dot(u_current));
  b.b_az = range1 * cel;
  b.b_el = range1;
  return b;
}

// Minimizer of (h - G u)^T W (h - G u). Solved as the equivalent
// least-squares problem min ||L^T (h - G u)|| with W = L L^T, by a pivoted
// Householder QR; forming G^T W G and back-solving would square the
// conditioning and lose half the digits at kilometer scales. The normal
// matrix is still formed for the singularity check and the condition
// diagnostic, matching the covariance expression.
inline Eigen::Vector3d wls_solve(const PseudoLinearSystem& sys,
                                 const Eigen::Matrix3d& weight,
                                 double singular_tolerance = kDefaultSingularTolerance,
                                 double* cond_out = nullptr) {
  const Eigen::Matrix3d normal = sys.G.transpose() * weight * sys.G;
  if (detail::spd_rcond(normal, cond_out) < singular_tolerance) {
    throw SingularSystem("normal equations G^T W G numerically singular");
  }
  const Eigen::LLT<Eigen::Matrix3d> llt(weight);
  if (llt.info() != Eigen::Success) {
    throw SingularSystem("weight matrix is not positive definite");
  }
  const Eigen::Matrix3d scaled_g = llt.matrixL().transpose() * sys.G;
  const Eigen::Vector3d scaled_h = llt.matrixL().transpose() * sys.h;
  return scaled_g.colPivHouseholderQr().solve(scaled_h);
}

// (G^T W G)^{-1}, symmetrized to kill round-off asymmetry.
inline Eigen::Matrix3d estimate_covariance(const PseudoLinearSystem& sys,
                                           const Eigen::Matrix3d& weight,
                                           double singular_tolerance = kDefaultSingularTolerance) {
  const Eigen::Matrix3d normal = sys.G.transpose() * weight * sys.G;
  if (detail::spd_rcond(normal) < singular_tolerance) {
    throw SingularSystem("normal equations G^T W G numerically singular");
  }
  const Eigen::Matrix3d cov = Eigen::FullPivLU<Eigen::Matrix3d>(normal).inverse();
  return 0.5 * (cov + cov.transpose());
}

// Full closed-form pipeline. Iteration 1 solves with W = Q_m^{-1}; each
// further iteration rebuilds B from the latest estimate and re-solves with
// W = (B Q_m B^T)^{-1}. Errors are rethrown with the iteration attached.
inline PositionEstimate locate(const MeasurementVector& m,
                               const SensorPair& sensors,
                               const NoiseModel& noise,
                               const EstimatorOptions& opts = {}) {
  if (opts.refinement_iterations < 1) {
    throw ConfigError("refinement_iterations must be >= 1");
  }
  const PseudoLinearSystem sys = build_system(m, sensors);
  const Eigen::Vector3d inv_var = detail::inverse_variances(noise);

  PositionEstimate est;
  Eigen::Matrix3d weight = inv_var.asDiagonal();
  for (int iter = 1; iter <= opts.refinement_iterations; ++iter) {
    try {
      if (iter > 1) {
        const LinearizedNoiseMap b = b_matrix(m, sensors, est.position);
        weight = Eigen::Vector3d(inv_var(0) / (b.b_r * b.b_r),
                                 inv_var(1) / (b.b_az * b.b_az),
                                 inv_var(2) / (b.b_el * b.b_el))
                     .asDiagonal();
      }
      double cond = 0.0;
      est.position = wls_solve(sys, weight, opts.singular_tolerance, &cond);
      est.condition_number = std::max(est.condition_number, cond);
      est.iterations_used = iter;
    } catch (const NearSingularElevation& e) {
      throw NearSingularElevation(std::string(e.what()) + " (iteration " +
                                  std::to_string(iter) + ")");
    } catch (const SingularSystem& e) {
      throw SingularSystem(std::string(e.what()) + " (iteration " +
                           std::to_string(iter) + ")");
    }
  }
  est.covariance = estimate_covariance(sys, weight, opts.singular_tolerance);
  return est;
}

}  // namespace uavloc
