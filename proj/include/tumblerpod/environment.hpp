#pragma once

// Air and water column properties shared by the aerial and underwater models.

#include <random>

namespace tumblerpod::environment {

inline constexpr double kKnot = 0.5144;  // m/s

struct FluidProperties {
    double air_density = 1.225;                // kg/m^3
    double air_kinematic_viscosity = 1.46e-5;  // m^2/s
    double water_density = 1000.0;             // kg/m^3, fresh water
    double gravity = 9.81;                     // m/s^2
    double atmospheric_pressure = 101325.0;    // Pa absolute

    bool operator==(const FluidProperties&) const = default;
};

// Throws DomainError unless every field is positive and water is denser than air.
void validate(const FluidProperties& fluid);

// Horizontal wind vector. Only `x` lies in the tumbling plane.
struct Horizontal {
    double x = 0.0;
    double y = 0.0;

    double norm() const;
    bool operator==(const Horizontal&) const = default;
};

enum class WindKind { Still, Constant, Gusty };

struct WindModel {
    WindKind kind = WindKind::Still;
    Horizontal mean_velocity{};
    double gust_std = 0.0;               // stationary std of each component, m/s
    double gust_correlation_time = 2.0;  // s
    double gust_cap = 0.0;               // max |fluctuation|, m/s

    // Ornstein-Uhlenbeck state, owned by one run.
    Horizontal gust{};
    bool gust_initialised = false;

    // Configuration equality; the gust state is ignored.
    bool operator==(const WindModel& o) const;
};

void validate(const WindModel& wind);

struct ThermoclineProfile {
    double surface_temp = 20.0;      // degC
    double bottom_temp = 8.0;        // degC
    double thermocline_depth = 4.0;  // m
    double thermocline_width = 1.0;  // m

    bool operator==(const ThermoclineProfile&) const = default;
};

void validate(const ThermoclineProfile& profile);

// Absolute hydrostatic pressure at `depth` metres below the surface.
double water_pressure(double depth, const FluidProperties& fluid);

// Logistic profile T_b + (T_s - T_b) / (1 + exp((z - z_tc) / w)).
double water_temperature(double depth, const ThermoclineProfile& profile);

// Advances the gust process by `dt` and returns the wind to use for that
// interval. Still and Constant models never touch the generator.
Horizontal wind_sample(WindModel& model, double dt, std::mt19937_64& rng);

}  // namespace tumblerpod::environment
