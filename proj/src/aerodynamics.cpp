#include "tumblerpod/aerodynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tumblerpod/errors.hpp"

namespace tumblerpod::aero {

namespace {

constexpr double kTiny = 1e-12;

Vec2 chord_direction(double pitch) { return {std::cos(pitch), std::sin(pitch)}; }

}  // namespace

void validate(const AeroCoefficients& c) {
    const double all[] = {c.c_translational_lift, c.c_rotational_lift, c.c_drag_edgewise,
                          c.c_drag_broadside,     c.c_rotational_damping, c.c_lateral_drift};
    for (double v : all) {
        if (!std::isfinite(v)) throw DomainError("aero coefficients must be finite");
    }
    if (c.c_drag_edgewise < 0.0 || c.c_drag_broadside < 0.0 || c.c_rotational_damping < 0.0) {
        throw DomainError("drag and damping coefficients must be >= 0");
    }
    if (c.c_drag_broadside < c.c_drag_edgewise) {
        throw DomainError("c_drag_broadside must be >= c_drag_edgewise");
    }
}

bool is_finite(const FallState& s) {
    return tumblerpod::is_finite(s.position) && tumblerpod::is_finite(s.velocity) &&
           std::isfinite(s.pitch) && std::isfinite(s.pitch_rate) && std::isfinite(s.time);
}

std::string_view to_string(TerminalEvent e) {
    switch (e) {
        case TerminalEvent::HitWater: return "HitWater";
        case TerminalEvent::Timeout: return "Timeout";
        case TerminalEvent::Diverged: return "Diverged";
    }
    return "?";
}

ForceBreakdown quasi_steady_forces(const FallState& state, const tumbler::EffectiveDisc& disc,
                                   double total_mass, double cg_offset,
                                   const AeroCoefficients& c, Vec2 wind,
                                   const environment::FluidProperties& fluid) {
    ForceBreakdown out;
    out.gravity = {0.0, total_mass * fluid.gravity};

    const double d = disc.equivalent_diameter;
    const double area = std::numbers::pi * d * d / 4.0;
    const double rho = fluid.air_density;
    const double omega = state.pitch_rate;
    const Vec2 e = chord_direction(state.pitch);
    const Vec2 n{-e.z, e.x};

    // Centre of pressure: a quarter chord ahead of the centre when moving
    // edgewise, at the centre when broadside.
    const Vec2 centre = e * (-cg_offset);
    const Vec2 v_centre = state.velocity - wind + omega * perp(centre);
    const double speed_centre = v_centre.norm();
    Vec2 cp = centre;
    if (speed_centre > kTiny) {
        cp += e * (kPressureCentreFraction * d * dot(v_centre, e) / speed_centre);
    }
    out.pressure_centre = cp;

    const Vec2 v = state.velocity - wind + omega * perp(cp);
    out.relative_velocity = v;
    const double speed = v.norm();

    if (speed > kTiny) {
        const Vec2 u = v / speed;
        const double sn = dot(u, n);  // sin of signed incidence
        const double sin2 = std::min(1.0, sn * sn);
        out.angle_of_attack = std::asin(std::sqrt(sin2));
        const double q = 0.5 * rho * area * speed * speed;

        const double cd = c.c_drag_edgewise + (c.c_drag_broadside - c.c_drag_edgewise) * sin2;
        out.drag = u * (-q * cd);

        // Component of the plate-normal force perpendicular to the flow:
        // magnitude q * c_TL * |sin 2 alpha|.
        const Vec2 normal_perp = n - u * sn;
        out.translational_lift = normal_perp * (-2.0 * q * c.c_translational_lift * sn);

        out.rotational_lift = perp(v) * (c.c_rotational_lift * rho * area * d * omega);
        out.lateral = perp(v) * (0.5 * rho * area * speed * c.c_lateral_drift);
    }

    const Vec2 aero = out.translational_lift + out.rotational_lift + out.drag + out.lateral;
    out.force = out.gravity + aero;
    out.torque = cross(cp, aero) -
                 c.c_rotational_damping * rho * area * d * d * d * omega * std::abs(omega);
    return out;
}

FallState step(const FallState& s, double dt, const RateFunction& rate) {
    auto advance = [](const FallState& base, const StateRate& r, double h) {
        FallState out = base;
        out.position += r.velocity * h;
        out.velocity += r.acceleration * h;
        out.pitch += r.pitch_rate * h;
        out.pitch_rate += r.pitch_acceleration * h;
        out.time += h;
        return out;
    };

    const StateRate k1 = rate(s);
    const StateRate k2 = rate(advance(s, k1, 0.5 * dt));
    const StateRate k3 = rate(advance(s, k2, 0.5 * dt));
    const StateRate k4 = rate(advance(s, k3, dt));

    FallState out = s;
    const double w = dt / 6.0;
    out.position += (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity) * w;
    out.velocity +=
        (k1.acceleration + 2.0 * k2.acceleration + 2.0 * k3.acceleration + k4.acceleration) * w;
    out.pitch += (k1.pitch_rate + 2.0 * k2.pitch_rate + 2.0 * k3.pitch_rate + k4.pitch_rate) * w;
    out.pitch_rate += (k1.pitch_acceleration + 2.0 * k2.pitch_acceleration +
                       2.0 * k3.pitch_acceleration + k4.pitch_acceleration) *
                      w;
    out.time = s.time + dt;
    if (!is_finite(out)) throw ModelError("integration produced a non-finite state");
    return out;
}

BodyModel body_model(const tumbler::TumblerDesign& design,
                     const environment::FluidProperties& fluid, double payload_offset) {
    BodyModel b;
    b.disc = tumbler::effective_disc(design, fluid);
    const double d = b.disc.equivalent_diameter;
    b.area = std::numbers::pi * d * d / 4.0;
    const double ms = tumbler::structure_mass(design);
    const double mp = design.payload_mass;
    b.mass = ms + mp;
    b.cg_offset = mp * payload_offset / b.mass;
    const double about_centre = ms * d * d / 16.0 + mp * payload_offset * payload_offset;
    b.inertia = about_centre - b.mass * b.cg_offset * b.cg_offset;
    return b;
}

tumbler::FallRegime loaded_regime(const tumbler::TumblerDesign& design,
                                  const environment::FluidProperties& fluid,
                                  const AeroCoefficients& coeffs,
                                  const tumbler::RegimeThresholds& thresholds) {
    const auto disc = tumbler::effective_disc(design, fluid);
    const double d = disc.equivalent_diameter;
    const double area = std::numbers::pi * d * d / 4.0;
    const double cd = coeffs.c_drag_broadside > 0.0 ? coeffs.c_drag_broadside : 1.0;
    const double v_ref =
        std::sqrt(2.0 * tumbler::total_mass(design) * fluid.gravity / (fluid.air_density * area * cd));
    return tumbler::classify_regime(disc.i_star, tumbler::reynolds(v_ref, d, fluid), thresholds);
}

Trajectory simulate_descent(const tumbler::TumblerDesign& design, const DescentEnvironment& env,
                            const AeroCoefficients& coeffs, double release_height,
                            std::uint64_t seed, const DescentConfig& cfg) {
    if (!(release_height > 0.0)) throw DomainError("simulate_descent: release_height must be > 0");
    if (!(cfg.dt > 0.0) || !(cfg.output_interval >= cfg.dt) || !(cfg.timeout > 0.0)) {
        throw DomainError("simulate_descent: invalid time stepping");
    }
    tumbler::validate(design);
    environment::validate(env.fluid);
    environment::validate(env.wind);
    validate(coeffs);

    Trajectory traj;
    traj.seed = seed;
    const BodyModel body = body_model(
        design, env.fluid, cfg.payload_offset_fraction * tumbler::effective_disc(design, env.fluid).equivalent_diameter);
    traj.i_star = body.disc.i_star;
    traj.mass = body.mass;
    traj.inertia = body.inertia;
    traj.regime = loaded_regime(design, env.fluid, coeffs, cfg.regime);

    // Fluttering designs are still integrated: the equal-area reduction puts
    // very light sandwich sheets below the flutter bound although they tumble.
    if (traj.regime == tumbler::FallRegime::SteadyFalling ||
        traj.regime == tumbler::FallRegime::Chaotic) {
        traj.steep_mode = true;
        traj.warnings.push_back(std::string("tumbling_failure: loaded design is ") +
                                std::string(tumbler::to_string(traj.regime)));
    } else if (design.payload_mass > cfg.payload_cap) {
        traj.steep_mode = true;
        traj.warnings.emplace_back("tumbling_failure: payload exceeds tumbling cap");
    } else if (traj.regime == tumbler::FallRegime::Fluttering) {
        traj.warnings.emplace_back("equal-area disc classifies as Fluttering");
    }

    environment::WindModel wind = env.wind;
    wind.gust = {};
    wind.gust_initialised = false;
    std::mt19937_64 rng(seed);

    FallState state;
    state.pitch = traj.steep_mode ? std::numbers::pi / 2.0 : design.initial_pitch;
    traj.samples.push_back(state);

    const bool steep = traj.steep_mode;
    Vec2 current_wind{};
    const RateFunction rate = [&](const FallState& s) {
        const ForceBreakdown f = quasi_steady_forces(s, body.disc, body.mass, body.cg_offset, coeffs,
                                                     current_wind, env.fluid);
        StateRate r;
        r.velocity = s.velocity;
        r.acceleration = f.force / body.mass;
        if (!steep) {
            r.pitch_rate = s.pitch_rate;
            r.pitch_acceleration = f.torque / body.inertia;
        }
        return r;
    };

    const auto steps_per_sample =
        std::max<long>(1, std::lround(cfg.output_interval / cfg.dt));
    const long max_steps = std::lround(cfg.timeout / cfg.dt);

    for (long k = 0; k < max_steps; ++k) {
        const auto w = environment::wind_sample(wind, cfg.dt, rng);
        current_wind = {w.x, 0.0};

        FallState next;
        try {
            next = step(state, cfg.dt, rate);
        } catch (const ModelError&) {
            traj.terminal = TerminalEvent::Diverged;
            return traj;
        }
        next.time = static_cast<double>(k + 1) * cfg.dt;
        if (next.velocity.norm() > cfg.divergence_speed) {
            traj.terminal = TerminalEvent::Diverged;
            traj.samples.push_back(next);
            return traj;
        }

        if (next.position.z >= release_height) {
            // Shorten the last step so the final sample sits on the surface.
            double lo = 0.0;
            double hi = cfg.dt;
            FallState hit = next;
            for (int i = 0; i < 80 && hi - lo > 1e-15; ++i) {
                const double mid = 0.5 * (lo + hi);
                FallState trial = step(state, mid, rate);
                if (trial.position.z >= release_height) {
                    hi = mid;
                    hit = trial;
                } else {
                    lo = mid;
                }
            }
            hit.position.z = release_height;
            traj.samples.push_back(hit);
            traj.terminal = TerminalEvent::HitWater;
            return traj;
        }

        state = next;
        if ((k + 1) % steps_per_sample == 0) traj.samples.push_back(state);
    }
    traj.terminal = TerminalEvent::Timeout;
    return traj;
}

double mechanical_energy(const FallState& s, double mass, double inertia, double gravity) {
    return 0.5 * mass * s.velocity.squared_norm() + 0.5 * inertia * s.pitch_rate * s.pitch_rate -
           mass * gravity * s.position.z;
}

TrajectoryMetrics trajectory_metrics(const Trajectory& traj) {
    if (traj.terminal != TerminalEvent::HitWater) {
        throw ModelError(std::string("trajectory_metrics: descent ended with ") +
                         std::string(to_string(traj.terminal)));
    }
    if (traj.samples.size() < 2) throw ModelError("trajectory_metrics: need at least 2 samples");

    const auto& first = traj.samples.front();
    const auto& last = traj.samples.back();
    TrajectoryMetrics m;
    const double drop = last.position.z - first.position.z;
    const double duration = last.time - first.time;
    m.mean_descent_rate = drop / duration;
    m.glide_ratio = std::abs(last.position.x - first.position.x) / drop;
    for (const auto& s : traj.samples) m.peak_descent_rate = std::max(m.peak_descent_rate, s.velocity.z);

    std::size_t onset = traj.samples.size();
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        if (std::abs(traj.samples[i].pitch - first.pitch) >= std::numbers::pi / 2.0) {
            onset = i;
            break;
        }
    }
    if (onset == traj.samples.size()) return m;

    m.tumbling_onset_time = traj.samples[onset].time;
    m.flip_count = static_cast<int>(
        std::floor(std::abs(last.pitch - traj.samples[onset].pitch) / std::numbers::pi));

    // Descent-rate maxima after onset; a peak dominates +-5 samples.
    constexpr std::size_t kWindow = 5;
    std::vector<double> peak_times;
    for (std::size_t i = std::max(onset, kWindow); i + kWindow < traj.samples.size(); ++i) {
        const double vz = traj.samples[i].velocity.z;
        bool is_peak = true;
        for (std::size_t j = i - kWindow; j <= i + kWindow && is_peak; ++j) {
            if (j == i) continue;
            const double other = traj.samples[j].velocity.z;
            if (other > vz || (other == vz && j < i)) is_peak = false;
        }
        if (is_peak) peak_times.push_back(traj.samples[i].time);
    }
    if (peak_times.size() >= 2) {
        m.oscillation_period =
            (peak_times.back() - peak_times.front()) / static_cast<double>(peak_times.size() - 1);
    }
    return m;
}

AeroCoefficients CoefficientSchedule::at(double payload_mass) const {
    if (anchors.empty()) throw DomainError("coefficient schedule has no anchors");
    if (payload_mass <= anchors.front().payload_mass) return anchors.front().coeffs;
    if (payload_mass >= anchors.back().payload_mass) return anchors.back().coeffs;
    std::size_t k = 1;
    while (anchors[k].payload_mass < payload_mass) ++k;
    const auto& a = anchors[k - 1];
    const auto& b = anchors[k];
    const double t = (payload_mass - a.payload_mass) / (b.payload_mass - a.payload_mass);
    auto mix = [t](double x, double y) { return x + t * (y - x); };
    return {mix(a.coeffs.c_translational_lift, b.coeffs.c_translational_lift),
            mix(a.coeffs.c_rotational_lift, b.coeffs.c_rotational_lift),
            mix(a.coeffs.c_drag_edgewise, b.coeffs.c_drag_edgewise),
            mix(a.coeffs.c_drag_broadside, b.coeffs.c_drag_broadside),
            mix(a.coeffs.c_rotational_damping, b.coeffs.c_rotational_damping),
            mix(a.coeffs.c_lateral_drift, b.coeffs.c_lateral_drift)};
}

void validate(const CoefficientSchedule& s) {
    if (s.anchors.empty()) throw DomainError("coefficient schedule has no anchors");
    for (std::size_t i = 0; i < s.anchors.size(); ++i) {
        if (!(s.anchors[i].payload_mass >= 0.0)) throw DomainError("schedule anchor payload must be >= 0");
        if (i > 0 && !(s.anchors[i].payload_mass > s.anchors[i - 1].payload_mass)) {
            throw DomainError("schedule anchors must be strictly increasing in payload");
        }
        validate(s.anchors[i].coeffs);
    }
}

std::optional<CoefficientSchedule> preset_schedule(std::string_view name) {
    // Fitted with calibrate_coefficients against the measured descent rate and
    // glide ratio of each design (empty and with a 60 g payload where needed).
    if (name == "circle1") return CoefficientSchedule::constant({1.5118, 0.2172, 0.093921, 0.96249, 0.011729, 0.0});
    if (name == "circle2") return CoefficientSchedule::constant({1.4315, 0.2273, 0.073723, 1.0585, 0.011168, 0.0});
    if (name == "square") return CoefficientSchedule::constant({1.7085, 0.34293, 0.094229, 2.0244, 0.017931, 0.15});
    if (name == "dodecagon1") return CoefficientSchedule::constant({2.4457, 0.24667, 0.12287, 1.1647, 0.015505, 0.0});
    if (name == "dodecagon2") return CoefficientSchedule::constant({2.0977, 0.3932, 0.1062, 2.3499, 0.0, 0.0});
    if (name == "dodecagon3") {
        return CoefficientSchedule{{{0.0, {2.6405, 0.1522, 0.0625, 0.2011, 0.00204, 0.0}},
                                    {0.030, {2.1062, 0.31535, 0.058717, 0.89547, 0.00028065, 0.0}},
                                    {0.060, {1.5522, 0.38064, 0.065325, 1.295, 0.0002137, 0.0}}}};
    }
    return std::nullopt;
}

AeroCoefficients preset_coefficients(std::string_view name, double payload_mass) {
    const auto s = preset_schedule(name);
    if (!s) throw DomainError("no calibrated coefficients for design '" + std::string(name) + "'");
    return s->at(payload_mass);
}

}  // namespace tumblerpod::aero
