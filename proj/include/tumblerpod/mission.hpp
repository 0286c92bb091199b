#pragma once

// End-to-end mission: an explicit phase machine driving the aerial descent,
// the underwater pod and the buoyancy system, plus Monte Carlo ensembles.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tumblerpod/aerodynamics.hpp"
#include "tumblerpod/buoyancy.hpp"
#include "tumblerpod/calibration.hpp"
#include "tumblerpod/errors.hpp"
#include "tumblerpod/pod.hpp"

namespace tumblerpod::mission {

enum class PhaseKind {
    PreFlight,
    Transit,
    Release,
    TumblingDescent,
    Splashdown,
    SurfaceAttached,
    Sinking,
    BenthicSensing,
    InflationTriggered,
    Ascent,
    SurfaceDrift,
    Retrieved,
    Failed
};

struct MissionPhase {
    PhaseKind kind = PhaseKind::PreFlight;
    std::string reason;  // Failed only

    static MissionPhase failed(std::string why) { return {PhaseKind::Failed, std::move(why)}; }
    bool operator==(const MissionPhase&) const = default;
};

std::string_view to_string(PhaseKind k);
// "Failed(reason)" for failures, the bare name otherwise.
std::string to_string(const MissionPhase& p);
bool is_terminal(const MissionPhase& p);

enum class EventKind {
    Start,
    ArriveOnStation,
    Drop,
    HitWater,
    Floating,
    Detached,
    ReachedBottom,
    TriggerFired,
    ReactionComplete,
    Surfaced,
    Collected,
    Fail
};

std::string_view to_string(EventKind k);

struct MissionEvent {
    EventKind kind = EventKind::Start;
    std::string reason;  // Fail only
};

class TransitionError : public ModelError {
public:
    using ModelError::ModelError;
};

// Declared edges only; anything else throws TransitionError naming both the
// phase and the event.
MissionPhase advance(const MissionPhase& phase, const MissionEvent& event);

enum class TriggerMode { ElapsedTime, DepthLimit, Either };

std::string_view to_string(TriggerMode m);
std::optional<TriggerMode> trigger_mode_from_string(std::string_view s);

struct TriggerConfig {
    TriggerMode mode = TriggerMode::Either;
    double max_benthic_time = 600.0;  // s
    double depth_limit = 10.0;        // m

    bool operator==(const TriggerConfig&) const = default;
};

bool trigger_check(const pod::PodState& pod, double benthic_elapsed, const TriggerConfig& cfg);

struct MissionTiming {
    double preflight_duration = 0.0;   // s
    double transit_duration = 0.0;     // s
    double reaction_delay = 60.0;      // s from trigger to full inflation
    double sma_available_force = 3.0;  // N
    double sma_required_force = 1.0;   // N to break the reactant wall
    double drift_factor = 0.03;        // surface drift speed per unit wind speed
    double shoreline_distance = 50.0;  // m of drift that counts as beached
    double retrieval_timeout = 300.0;  // s on the surface before pickup
    double max_sink_time = 3600.0;     // s
    double max_ascent_time = 600.0;    // s
    double underwater_dt = 0.01;       // s

    bool operator==(const MissionTiming&) const = default;
};

struct EnsembleSettings {
    double pitch_band = 0.17453292519943295;  // rad, half-width around the preset pitch
    double grid_step = 0.1;                   // m, vertical resampling step

    bool operator==(const EnsembleSettings&) const = default;
};

struct CalibrationSettings {
    double mean_descent_rate = 1.4;  // m/s
    double glide_ratio = 1.5;
    double oscillation_period = 0.0; // s, 0 = not fitted
    double peak_limit = 0.0;         // m/s, 0 = unconstrained
    int budget = 500;

    bool operator==(const CalibrationSettings&) const = default;
};

inline constexpr double kDronePayloadLimit = 0.450;  // kg

struct MissionConfig {
    std::string preset = "dodecagon3";
    tumbler::TumblerDesign design{};
    aero::CoefficientSchedule aero{};
    aero::DescentConfig descent{};
    environment::FluidProperties fluid{};
    environment::WindModel wind{};
    environment::ThermoclineProfile thermocline{};
    double water_depth = 3.0;  // m
    environment::Horizontal current{};
    double release_height = 15.0;  // m
    buoyancy::PodGeometry pod{};
    buoyancy::ReactantCharge charge{};
    buoyancy::BladderCompliance compliance{};
    pod::HydroParams hydro{};
    pod::SensorNoise sensor_noise{};
    double sensor_interval = 1.0;  // s
    TriggerConfig trigger{};
    MissionTiming timing{};
    EnsembleSettings ensemble{};
    CalibrationSettings calibration{};
    std::uint64_t seed = 1;

    bool operator==(const MissionConfig&) const = default;
};

// Default lake scenario: dodecagon3 carrying the 70 g pod electronics,
// reference charge, 15 m release over 3 m of water, still air.
MissionConfig default_config();

// Applies a tumbler preset (design and coefficient schedule), keeping the
// configured payload.
void apply_preset(MissionConfig& cfg, const std::string& name);

// Cross-field checks; messages name the offending key path.
void validate(const MissionConfig& cfg);

struct PhaseEvent {
    double time = 0.0;  // s since mission start
    MissionPhase from;
    MissionPhase to;
    EventKind event = EventKind::Start;
    std::string cause;
};

struct Outcome {
    MissionPhase final_phase;
    double release_time = 0.0;
    double splashdown_time = 0.0;
    environment::Horizontal landing_point{};
    double benthic_duration = 0.0;  // s at the bottom before lift-off
    double max_depth = 0.0;
    bool resurfaced = false;
    std::optional<environment::Horizontal> retrieval_position;
    std::string retrieval_mode;  // "shoreline", "timeout" or empty
    double end_time = 0.0;
};

struct MissionLog {
    std::uint64_t seed = 0;
    double initial_pitch = 0.0;
    std::vector<PhaseEvent> events;
    aero::Trajectory trajectory;
    std::optional<aero::TrajectoryMetrics> descent_metrics;
    std::vector<pod::SensorRecord> sensors;
    std::vector<std::string> warnings;
    Outcome outcome;
};

// Throws ModelError describing the first violation: the events must form a
// path through the declared graph from PreFlight to exactly one terminal
// phase, with non-decreasing times.
void validate_transitions(const MissionLog& log);

// Aerial leg alone, exactly as run_mission performs it.
aero::Trajectory simulate_aerial(const MissionConfig& cfg);

MissionLog run_mission(const MissionConfig& cfg);

struct RunSummary {
    std::uint64_t seed = 0;
    double initial_pitch = 0.0;
    MissionPhase final_phase;
    bool landed = false;
    environment::Horizontal landing_point{};
    std::optional<aero::TrajectoryMetrics> metrics;
    bool resurfaced = false;
    std::size_t warning_count = 0;
};

struct GridRow {
    double z = 0.0;
    double mean_x = 0.0;
    double std_x = 0.0;
    double mean_descent_rate = 0.0;
    std::size_t count = 0;
};

struct Statistic {
    double mean = 0.0;
    double std = 0.0;  // population
    std::size_t count = 0;
};

struct EnsembleSummary {
    std::uint64_t base_seed = 0;
    std::vector<RunSummary> runs;
    std::vector<aero::Trajectory> trajectories;  // per run, index order
    std::vector<GridRow> grid;
    double dispersion_radius = 0.0;  // m
    environment::Horizontal mean_landing{};
    Statistic mean_descent_rate, peak_descent_rate, glide_ratio, flip_count;
    std::size_t completed = 0;  // reached Retrieved
    std::size_t failed = 0;
};

// Horizontal position and descent rate where the trajectory first reaches
// depth z, linearly interpolated between samples; nullopt if never reached.
std::optional<std::pair<double, double>> resample_at(const aero::Trajectory& traj, double z);

EnsembleSummary run_batch(const MissionConfig& cfg, int n_runs, std::uint64_t base_seed, int jobs = 1);

}  // namespace tumblerpod::mission
