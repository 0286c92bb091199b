#pragma once

// Fits aerodynamic coefficients so that simulated descent metrics match
// measured ones, using a bounded simplex search.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "tumblerpod/aerodynamics.hpp"

namespace tumblerpod::aero {

struct CalibrationTargets {
    double mean_descent_rate = 0.0;  // m/s
    double glide_ratio = 0.0;
    std::optional<double> oscillation_period;  // s
    std::optional<double> peak_limit;          // m/s, penalised only when exceeded
    double weight_descent = 1.0;
    double weight_glide = 1.0;
    double weight_period = 0.25;
    double weight_peak = 1.0;
};

struct CalibrationBounds {
    AeroCoefficients lower{0.1, 0.0, 0.0, 0.2, 0.0, 0.0};
    AeroCoefficients upper{4.0, 1.5, 0.5, 4.0, 0.1, 0.0};
};

struct CalibrationSetup {
    tumbler::TumblerDesign design{};
    DescentEnvironment environment{};
    DescentConfig descent{};
    double release_height = 15.0;
    std::uint64_t seed = 0;
    AeroCoefficients initial{1.5, 0.39, 0.10, 2.35, 0.001, 0.0};
    CalibrationBounds bounds{};
    std::size_t budget = 500;       // descent simulations
    double stop_error = 0.01;       // stop once every relative error is below this
};

struct CalibrationResult {
    AeroCoefficients coeffs{};
    double residual = 0.0;  // weighted sum of squared relative errors
    double descent_error = 0.0;  // signed relative errors of the best fit
    double glide_error = 0.0;
    std::optional<double> period_error;
    TrajectoryMetrics metrics{};
    std::size_t evaluations = 0;
    bool tumbling = false;
    bool success = false;  // best fit tumbles and reached the water
    std::string report;
};

// Coefficients whose lower bound equals the upper bound are held at their
// initial value.
CalibrationResult calibrate_coefficients(const CalibrationSetup& setup,
                                         const CalibrationTargets& targets);

}  // namespace tumblerpod::aero
