#include "tumblerpod/pod.hpp"

#include <algorithm>
#include <cmath>

#include "tumblerpod/errors.hpp"

namespace tumblerpod::pod {

void validate(const HydroParams& h) {
    if (!(h.drag_coefficient >= 0.0) || !(h.reference_area >= 0.0) || !(h.dissolution_time >= 0.0) ||
        !(h.added_mass_fraction >= 0.0)) {
        throw DomainError("hydro parameters must be >= 0");
    }
}

void validate(const UnderwaterEnvironment& env) {
    environment::validate(env.fluid);
    environment::validate(env.thermocline);
    buoyancy::validate(env.compliance);
    if (!(env.water_depth > 0.0)) throw DomainError("water_depth must be > 0");
}

namespace {

double displaced_volume(const PodState& pod, const buoyancy::PodGeometry& g) {
    return g.displacement_volume * (1.0 + pod.bladder.delta_v_fraction);
}

}  // namespace

double net_vertical_force(const PodState& pod, const buoyancy::PodGeometry& g, const HydroParams& hydro,
                          const environment::FluidProperties& fluid) {
    const double v = pod.vertical_velocity;
    return g.dry_mass * fluid.gravity - fluid.water_density * fluid.gravity * displaced_volume(pod, g) -
           0.5 * fluid.water_density * hydro.drag_coefficient * hydro.reference_area * v * std::abs(v);
}

double terminal_sink_speed(const buoyancy::PodGeometry& g, const HydroParams& hydro,
                           const environment::FluidProperties& fluid) {
    const double excess = g.dry_mass - fluid.water_density * g.displacement_volume;
    if (!(excess > 0.0)) return 0.0;
    return std::sqrt(2.0 * excess * fluid.gravity /
                     (fluid.water_density * hydro.drag_coefficient * hydro.reference_area));
}

double gas_temperature(double depth, const UnderwaterEnvironment& env) {
    return buoyancy::kZeroCelsius + environment::water_temperature(depth, env.thermocline);
}

SensorRecord sample_sensors(const PodState& pod, const UnderwaterEnvironment& env,
                            const SensorNoise& noise, std::mt19937_64& rng, std::string phase,
                            environment::Horizontal origin) {
    SensorRecord r;
    r.time = pod.time;
    r.depth = pod.depth;
    r.phase = std::move(phase);
    r.saturated = pod.depth > kSensorMaxDepth;
    r.pressure = environment::water_pressure(std::min(pod.depth, kSensorMaxDepth), env.fluid);
    r.temperature = environment::water_temperature(pod.depth, env.thermocline);
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (noise.pressure_std > 0.0) r.pressure += noise.pressure_std * gauss(rng);
    if (noise.temperature_std > 0.0) r.temperature += noise.temperature_std * gauss(rng);
    if (pod.depth == 0.0) {
        r.gps_fix = true;
        r.gps_x = origin.x + pod.horizontal_drift.x;
        r.gps_y = origin.y + pod.horizontal_drift.y;
        if (noise.gps_error > 0.0) {
            r.gps_x += noise.gps_error * gauss(rng);
            r.gps_y += noise.gps_error * gauss(rng);
        }
    }
    return r;
}

bool detach_check(double time_on_surface, const HydroParams& hydro) {
    if (!(time_on_surface >= 0.0)) throw DomainError("detach_check: time must be >= 0");
    return time_on_surface >= hydro.dissolution_time;
}

UnderwaterResult simulate_underwater(const PodState& start, const buoyancy::PodGeometry& g,
                                     const HydroParams& hydro, const UnderwaterEnvironment& env,
                                     double dt, const StopPredicate& until, double max_duration,
                                     SensorSchedule& schedule, std::mt19937_64& rng) {
    if (!(dt > 0.0)) throw DomainError("simulate_underwater: dt must be > 0");
    if (!(schedule.interval > 0.0)) throw DomainError("sensor interval must be > 0");
    validate(hydro);

    UnderwaterResult out;
    PodState s = start;
    const double t0 = start.time;

    auto record_due = [&] {
        while (s.time >= schedule.next_time - 1e-9) {
            out.records.push_back(sample_sensors(s, env, schedule.noise, rng, schedule.phase, schedule.origin));
            schedule.next_time += schedule.interval;
        }
    };
    auto mass = [&](const PodState& p) {
        return g.dry_mass + hydro.added_mass_fraction * env.fluid.water_density * displaced_volume(p, g);
    };

    record_due();
    if (until && until(s)) {
        out.state = s;
        out.stopped = true;
        return out;
    }

    const long steps = std::lround(std::ceil(max_duration / dt - 1e-9));
    for (long k = 1; k <= steps; ++k) {
        if (!s.attached) {
            const double previous_depth = s.depth;
            const double m = mass(s);
            auto accel = [&](double v) {
                PodState p = s;
                p.vertical_velocity = v;
                return net_vertical_force(p, g, hydro, env.fluid) / m;
            };
            const double v = s.vertical_velocity;
            const double k1v = accel(v);
            const double k2v = accel(v + 0.5 * dt * k1v);
            const double k3v = accel(v + 0.5 * dt * k2v);
            const double k4v = accel(v + dt * k3v);
            const double k1x = v;
            const double k2x = v + 0.5 * dt * k1v;
            const double k3x = v + 0.5 * dt * k2v;
            const double k4x = v + dt * k3v;
            s.depth += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
            s.vertical_velocity += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);

            if (s.depth >= env.water_depth) {
                s.depth = env.water_depth;
                s.vertical_velocity = std::min(s.vertical_velocity, 0.0);
            } else if (s.depth <= 0.0) {
                s.depth = 0.0;
                s.vertical_velocity = std::max(s.vertical_velocity, 0.0);
            }
            s.horizontal_drift.x += env.current.x * dt;
            s.horizontal_drift.y += env.current.y * dt;
            // Ambient pressure and temperature only change with depth.
            if (s.inflation_latched && s.depth != previous_depth) {
                s.bladder = buoyancy::equilibrium_for_gas(
                    s.bladder.gas_moles, g, environment::water_pressure(s.depth, env.fluid),
                    gas_temperature(s.depth, env), env.compliance);
            }
        }
        s.time = t0 + static_cast<double>(k) * dt;
        record_due();
        if (until && until(s)) {
            out.stopped = true;
            break;
        }
    }
    out.state = s;
    return out;
}

}  // namespace tumblerpod::pod
