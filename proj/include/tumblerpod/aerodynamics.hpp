#pragma once

// Planar quasi-steady falling-plate model of the tumbler (x, z, pitch).
//
// Frame: x horizontal, z positive down from the release point, pitch is the
// chord angle measured from +x toward +z. All aerodynamic forces act at the
// centre of pressure and are built from the air-relative velocity of that
// point, so lift-like terms are perpendicular to it and drag opposes it. In
// still air the aerodynamic power is therefore never positive.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tumblerpod/environment.hpp"
#include "tumblerpod/tumbler.hpp"
#include "tumblerpod/vec2.hpp"

namespace tumblerpod::aero {

struct AeroCoefficients {
    double c_translational_lift = 0.0;
    double c_rotational_lift = 0.0;
    double c_drag_edgewise = 0.0;
    double c_drag_broadside = 0.0;
    double c_rotational_damping = 0.0;
    double c_lateral_drift = 0.0;

    bool operator==(const AeroCoefficients&) const = default;
};

void validate(const AeroCoefficients& c);

// Coefficients as a function of carried payload: piecewise linear between
// anchors, held constant outside them. A single anchor is a fixed set.
struct CoefficientSchedule {
    struct Anchor {
        double payload_mass = 0.0;  // kg
        AeroCoefficients coeffs{};
        bool operator==(const Anchor&) const = default;
    };
    std::vector<Anchor> anchors;  // sorted by payload_mass

    static CoefficientSchedule constant(const AeroCoefficients& c) { return {{{0.0, c}}}; }
    AeroCoefficients at(double payload_mass) const;
    bool operator==(const CoefficientSchedule&) const = default;
};

void validate(const CoefficientSchedule& s);

// Calibrated schedules shipped with the tumbler presets.
std::optional<CoefficientSchedule> preset_schedule(std::string_view design_name);
AeroCoefficients preset_coefficients(std::string_view design_name, double payload_mass);

struct FallState {
    Vec2 position{};      // m, centre of mass
    Vec2 velocity{};      // m/s
    double pitch = 0.0;   // rad
    double pitch_rate = 0.0;  // rad/s
    double time = 0.0;    // s

    bool operator==(const FallState&) const = default;
};

bool is_finite(const FallState& s);

struct ForceBreakdown {
    Vec2 gravity{};
    Vec2 translational_lift{};
    Vec2 rotational_lift{};
    Vec2 drag{};
    Vec2 lateral{};
    Vec2 force{};           // sum of the above
    double torque = 0.0;    // about the centre of mass, N m
    Vec2 relative_velocity{};  // air-relative velocity of the centre of pressure
    Vec2 pressure_centre{};    // centre of pressure relative to the centre of mass
    double angle_of_attack = 0.0;  // rad, in [0, pi/2]
};

// Distance of the centre of pressure ahead of the geometric centre at zero
// incidence, as a fraction of the chord.
inline constexpr double kPressureCentreFraction = 0.25;

// `cg_offset` is the signed position of the centre of mass relative to the
// geometric centre along the chord direction (cos pitch, sin pitch).
ForceBreakdown quasi_steady_forces(const FallState& state, const tumbler::EffectiveDisc& disc,
                                   double total_mass, double cg_offset,
                                   const AeroCoefficients& coeffs, Vec2 wind,
                                   const environment::FluidProperties& fluid);

struct StateRate {
    Vec2 velocity{};
    Vec2 acceleration{};
    double pitch_rate = 0.0;
    double pitch_acceleration = 0.0;
};

using RateFunction = std::function<StateRate(const FallState&)>;

// One classical fourth-order Runge-Kutta step. Throws ModelError if the
// result is not finite.
FallState step(const FallState& state, double dt, const RateFunction& rate);

// Rigid-body parameters derived from a design.
struct BodyModel {
    tumbler::EffectiveDisc disc{};
    double area = 0.0;          // m^2
    double mass = 0.0;          // kg
    double inertia = 0.0;       // kg m^2 about the centre of mass
    double cg_offset = 0.0;     // m along the chord, see quasi_steady_forces
};

// Payload is a point mass at `payload_offset` (signed, along the chord from
// the geometric centre); the sheet is a uniform disc.
BodyModel body_model(const tumbler::TumblerDesign& design, const environment::FluidProperties& fluid,
                     double payload_offset);

struct DescentEnvironment {
    environment::FluidProperties fluid{};
    environment::WindModel wind{};

    bool operator==(const DescentEnvironment&) const = default;
};

struct DescentConfig {
    double dt = 1e-3;                   // s, integrator step
    double output_interval = 0.01;      // s
    double timeout = 60.0;              // s
    double payload_offset_fraction = -0.10;  // of d_eq, negative = behind centre
    double payload_cap = 0.120;         // kg; heavier payloads cannot tumble
    tumbler::RegimeThresholds regime{};
    double divergence_speed = 1e3;      // m/s

    bool operator==(const DescentConfig&) const = default;
};

enum class TerminalEvent { HitWater, Timeout, Diverged };

std::string_view to_string(TerminalEvent e);

struct Trajectory {
    std::vector<FallState> samples;
    TerminalEvent terminal = TerminalEvent::Timeout;
    bool steep_mode = false;            // rotation suppressed by the tumbling gate
    std::vector<std::string> warnings;
    tumbler::FallRegime regime = tumbler::FallRegime::Tumbling;
    double i_star = 0.0;
    double mass = 0.0;
    double inertia = 0.0;
    std::uint64_t seed = 0;
};

// Regime the gate assigns to a loaded design (uses the Reynolds number of the
// broadside terminal speed).
tumbler::FallRegime loaded_regime(const tumbler::TumblerDesign& design,
                                  const environment::FluidProperties& fluid,
                                  const AeroCoefficients& coeffs,
                                  const tumbler::RegimeThresholds& thresholds);

Trajectory simulate_descent(const tumbler::TumblerDesign& design, const DescentEnvironment& env,
                            const AeroCoefficients& coeffs, double release_height,
                            std::uint64_t seed, const DescentConfig& config = {});

struct TrajectoryMetrics {
    double mean_descent_rate = 0.0;   // m/s
    double peak_descent_rate = 0.0;   // m/s
    double glide_ratio = 0.0;
    int flip_count = 0;
    std::optional<double> tumbling_onset_time;  // s
    std::optional<double> oscillation_period;   // s
};

// Throws ModelError unless the trajectory ended on the water.
TrajectoryMetrics trajectory_metrics(const Trajectory& traj);

// Translational + rotational kinetic energy plus potential energy (z down).
double mechanical_energy(const FallState& s, double mass, double inertia, double gravity);

}  // namespace tumblerpod::aero
