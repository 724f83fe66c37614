#pragma once

#include <stdexcept>
#include <string>

namespace uavloc {

// Base class for geometry/numerics failures raised by the estimators.
// name() returns the stable error identifier used in CLI messages.
class LocalizationError : public std::runtime_error {
public:
  explicit LocalizationError(const std::string& msg) : std::runtime_error(msg) {}
  virtual const char* name() const noexcept { return "LocalizationError"; }
};

// Source coincides with a sensor, or the stacked system lost rank.
class DegenerateGeometry : public LocalizationError {
public:
  using LocalizationError::LocalizationError;
  const char* name() const noexcept override { return "DegenerateGeometry"; }
};

// Elevation at (or wrapped past) +-90 deg: azimuth undefined, B_phi -> 0.
class NearSingularElevation : public LocalizationError {
public:
  using LocalizationError::LocalizationError;
  const char* name() const noexcept override { return "NearSingularElevation"; }
};

// Normal equations numerically rank-deficient.
class SingularSystem : public LocalizationError {
public:
  using LocalizationError::LocalizationError;
  const char* name() const noexcept override { return "SingularSystem"; }
};

// Invalid scenario/configuration input (bad file, missing field, bad value).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace uavloc
