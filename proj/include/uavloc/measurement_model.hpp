#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "uavloc/errors.hpp"
#include "uavloc/rng.hpp"

namespace uavloc {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Guard tolerances. Well inside double-precision headroom, far outside any
// sensible operating geometry.
inline constexpr double kMinSensorSeparationM = 1e-9;   // s1 != s2
inline constexpr double kMinSourceRangeM = 1e-9;        // source off the sensors
inline constexpr double kMinHorizontalRangeM = 1e-6;    // azimuth defined
inline constexpr double kMinCosElevation = 1e-9;        // B_phi stays nonzero
inline constexpr double kDefaultSingularTolerance = 1e-12;  // reciprocal condition

// Ground sensor s1 and UAV relay s2, meters.
struct SensorPair {
  Eigen::Vector3d s1;
  Eigen::Vector3d s2;
};

// One hybrid measurement: TDOA expressed as a range difference, plus the
// azimuth/elevation pair observed at the ground sensor.
struct MeasurementVector {
  double range_diff_m = 0.0;   // ||u - s2|| - ||u - s1||
  double azimuth_rad = 0.0;    // in (-pi, pi]
  double elevation_rad = 0.0;  // in (-pi/2, pi/2)
};

// Per-channel standard deviations of the additive zero-mean Gaussian noise.
// The implied covariance Q_m = diag(sigma_r^2, sigma_az^2, sigma_el^2).
struct NoiseModel {
  double sigma_r_m = 0.0;
  double sigma_az_rad = 0.0;
  double sigma_el_rad = 0.0;

  Eigen::Matrix3d covariance() const {
    return Eigen::Vector3d(sigma_r_m * sigma_r_m, sigma_az_rad * sigma_az_rad,
                           sigma_el_rad * sigma_el_rad)
        .asDiagonal();
  }
};

// Wrap an angle to (-pi, pi].
inline double wrap_angle(double rad) {
  double a = std::remainder(rad, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

inline void validate_sensors(const SensorPair& sensors) {
  if (!sensors.s1.allFinite() || !sensors.s2.allFinite()) {
    throw DegenerateGeometry("sensor positions must be finite");
  }
  if ((sensors.s1 - sensors.s2).norm() <= kMinSensorSeparationM) {
    throw DegenerateGeometry("ground sensor and UAV positions coincide");
  }
}

// Unit line-of-sight vector for a given azimuth/elevation.
inline Eigen::Vector3d direction_vector(double azimuth_rad, double elevation_rad) {
  const double caz = std::cos(azimuth_rad), saz = std::sin(azimuth_rad);
  const double cel = std::cos(elevation_rad), sel = std::sin(elevation_rad);
  return {cel * caz, cel * saz, sel};
}

// Unit normals of the two AOA plane equations. alpha spans the vertical plane
// through the bearing, beta the elevation plane; both are orthogonal to
// direction_vector(azimuth, elevation).
struct AoaBasis {
  Eigen::Vector3d alpha;
  Eigen::Vector3d beta;
};

inline AoaBasis aoa_basis(double azimuth_rad, double elevation_rad) {
  const double caz = std::cos(azimuth_rad), saz = std::sin(azimuth_rad);
  const double cel = std::cos(elevation_rad), sel = std::sin(elevation_rad);
  return {Eigen::Vector3d(saz, -caz, 0.0),
          Eigen::Vector3d(sel * caz, sel * saz, -cel)};
}

// Noise-free forward model: range difference via both sensors, azimuth and
// elevation at the ground sensor. Elevation uses the four-quadrant arctangent
// of the height against the horizontal projection length, which is
// nonnegative by construction of the azimuth.
inline MeasurementVector true_measurement(const Eigen::Vector3d& source,
                                          const SensorPair& sensors) {
  const Eigen::Vector3d p1 = source - sensors.s1;
  const Eigen::Vector3d p2 = source - sensors.s2;
  const double range1 = p1.norm();
  const double range2 = p2.norm();
  if (range1 <= kMinSourceRangeM || range2 <= kMinSourceRangeM) {
    throw DegenerateGeometry("source coincides with a sensor (range < 1e-9 m)");
  }
  const double horizontal = std::hypot(p1.x(), p1.y());
  if (horizontal < kMinHorizontalRangeM) {
    throw NearSingularElevation(
        "source directly above/below the ground sensor: azimuth undefined");
  }
  MeasurementVector m;
  m.range_diff_m = range2 - range1;
  double az = std::atan2(p1.y(), p1.x());
  if (az <= -kPi) az = kPi;  // atan2(-0, x<0) returns -pi; domain is (-pi, pi]
  m.azimuth_rad = az;
  m.elevation_rad = std::atan2(p1.z(), p1.x() * std::cos(az) + p1.y() * std::sin(az));
  return m;
}

// True measurement plus independent zero-mean Gaussian noise per channel
// (Q_m is diagonal). Consumption order is fixed: range, azimuth, elevation.
// A zero standard deviation leaves that channel noise-free.
inline MeasurementVector sample_measurement(const Eigen::Vector3d& source,
                                            const SensorPair& sensors,
                                            const NoiseModel& noise,
                                            SplitMix64& rng) {
  MeasurementVector m = true_measurement(source, sensors);
  m.range_diff_m += noise.sigma_r_m * rng.normal();
  m.azimuth_rad = wrap_angle(m.azimuth_rad + noise.sigma_az_rad * rng.normal());
  m.elevation_rad += noise.sigma_el_rad * rng.normal();
  return m;
}

}  // namespace uavloc
