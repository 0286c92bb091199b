#pragma once

// The detached sensing pod underwater: vertical dynamics with quadratic drag
// and added mass, bottom and surface clamps, and the logged sensor records.

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tumblerpod/buoyancy.hpp"
#include "tumblerpod/environment.hpp"

namespace tumblerpod::pod {

struct PodState {
    double depth = 0.0;              // m, positive down
    double vertical_velocity = 0.0;  // m/s, positive down
    environment::Horizontal horizontal_drift{};  // m
    bool attached = true;            // still glued to the tumbler
    bool inflation_latched = false;  // bladder re-equilibrates with depth
    buoyancy::BladderState bladder{};
    double time = 0.0;               // s

    bool operator==(const PodState&) const = default;
};

struct HydroParams {
    double drag_coefficient = 0.8;    // engineering estimate
    double reference_area = 2.5e-3;   // m^2, engineering estimate
    double dissolution_time = 30.0;   // s, adhesive release delay
    double added_mass_fraction = 0.5; // of displaced water mass

    bool operator==(const HydroParams&) const = default;
};

void validate(const HydroParams& h);

struct UnderwaterEnvironment {
    environment::FluidProperties fluid{};
    environment::ThermoclineProfile thermocline{};
    double water_depth = 3.0;              // m
    environment::Horizontal current{};     // m/s
    buoyancy::BladderCompliance compliance{};

    bool operator==(const UnderwaterEnvironment&) const = default;
};

void validate(const UnderwaterEnvironment& env);

struct SensorNoise {
    double pressure_std = 0.0;     // Pa
    double temperature_std = 0.0;  // degC
    double gps_error = 2.5;        // m, horizontal std when a fix is available

    bool operator==(const SensorNoise&) const = default;
};

inline constexpr double kSensorMaxDepth = 300.0;  // m

struct SensorRecord {
    double time = 0.0;
    double depth = 0.0;
    double pressure = 0.0;     // Pa absolute
    double temperature = 0.0;  // degC
    std::string phase;
    bool saturated = false;    // beyond the transducer range; pressure pinned
    bool gps_fix = false;
    double gps_x = 0.0;        // m
    double gps_y = 0.0;

    bool operator==(const SensorRecord&) const = default;
};

// Positive down: weight - buoyancy - drag.
double net_vertical_force(const PodState& pod, const buoyancy::PodGeometry& geometry,
                          const HydroParams& hydro, const environment::FluidProperties& fluid);

double terminal_sink_speed(const buoyancy::PodGeometry& geometry, const HydroParams& hydro,
                           const environment::FluidProperties& fluid);

// `origin` is the pod's horizontal position offset (e.g. the landing point)
// used for GPS fixes.
SensorRecord sample_sensors(const PodState& pod, const UnderwaterEnvironment& env,
                            const SensorNoise& noise, std::mt19937_64& rng, std::string phase,
                            environment::Horizontal origin = {});

bool detach_check(double time_on_surface, const HydroParams& hydro);

// Gas temperature (K) at the pod's depth.
double gas_temperature(double depth, const UnderwaterEnvironment& env);

struct SensorSchedule {
    double interval = 1.0;  // s
    double next_time = 0.0; // absolute time of the next record
    SensorNoise noise{};
    std::string phase;
    environment::Horizontal origin{};
};

using StopPredicate = std::function<bool(const PodState&)>;

struct UnderwaterResult {
    PodState state;
    std::vector<SensorRecord> records;
    bool stopped = false;  // predicate fired before max_duration
};

// Integrates until `until` holds or `max_duration` elapses. Records are due
// whenever the clock passes schedule.next_time, which is advanced in place.
UnderwaterResult simulate_underwater(const PodState& start, const buoyancy::PodGeometry& geometry,
                                     const HydroParams& hydro, const UnderwaterEnvironment& env,
                                     double dt, const StopPredicate& until, double max_duration,
                                     SensorSchedule& schedule, std::mt19937_64& rng);

}  // namespace tumblerpod::pod
