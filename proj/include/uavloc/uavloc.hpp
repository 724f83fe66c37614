#pragma once

// Hybrid TDOA/AOA source localization from a single ground sensor and a UAV
// relay: forward measurement model, closed-form WLS estimator, CRLB,
// Gauss-Newton ML reference, and the Monte Carlo evaluation harness.

#include "uavloc/csv.hpp"
#include "uavloc/crlb.hpp"
#include "uavloc/errors.hpp"
#include "uavloc/measurement_model.hpp"
#include "uavloc/ml_estimator.hpp"
#include "uavloc/montecarlo.hpp"
#include "uavloc/rng.hpp"
#include "uavloc/scenario_config.hpp"
#include "uavloc/version.hpp"
#include "uavloc/wls_estimator.hpp"
