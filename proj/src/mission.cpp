#include "tumblerpod/mission.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace tumblerpod::mission {

std::string_view to_string(PhaseKind k) {
    switch (k) {
        case PhaseKind::PreFlight: return "PreFlight";
        case PhaseKind::Transit: return "Transit";
        case PhaseKind::Release: return "Release";
        case PhaseKind::TumblingDescent: return "TumblingDescent";
        case PhaseKind::Splashdown: return "Splashdown";
        case PhaseKind::SurfaceAttached: return "SurfaceAttached";
        case PhaseKind::Sinking: return "Sinking";
        case PhaseKind::BenthicSensing: return "BenthicSensing";
        case PhaseKind::InflationTriggered: return "InflationTriggered";
        case PhaseKind::Ascent: return "Ascent";
        case PhaseKind::SurfaceDrift: return "SurfaceDrift";
        case PhaseKind::Retrieved: return "Retrieved";
        case PhaseKind::Failed: return "Failed";
    }
    return "?";
}

std::string to_string(const MissionPhase& p) {
    if (p.kind == PhaseKind::Failed) return "Failed(" + p.reason + ")";
    return std::string(to_string(p.kind));
}

bool is_terminal(const MissionPhase& p) {
    return p.kind == PhaseKind::Retrieved || p.kind == PhaseKind::Failed;
}

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::Start: return "Start";
        case EventKind::ArriveOnStation: return "ArriveOnStation";
        case EventKind::Drop: return "Drop";
        case EventKind::HitWater: return "HitWater";
        case EventKind::Floating: return "Floating";
        case EventKind::Detached: return "Detached";
        case EventKind::ReachedBottom: return "ReachedBottom";
        case EventKind::TriggerFired: return "TriggerFired";
        case EventKind::ReactionComplete: return "ReactionComplete";
        case EventKind::Surfaced: return "Surfaced";
        case EventKind::Collected: return "Collected";
        case EventKind::Fail: return "Fail";
    }
    return "?";
}

MissionPhase advance(const MissionPhase& phase, const MissionEvent& event) {
    if (event.kind == EventKind::Fail && !is_terminal(phase)) {
        return MissionPhase::failed(event.reason.empty() ? "unspecified" : event.reason);
    }
    struct Edge {
        PhaseKind from;
        EventKind on;
        PhaseKind to;
    };
    static constexpr Edge kEdges[] = {
        {PhaseKind::PreFlight, EventKind::Start, PhaseKind::Transit},
        {PhaseKind::Transit, EventKind::ArriveOnStation, PhaseKind::Release},
        {PhaseKind::Release, EventKind::Drop, PhaseKind::TumblingDescent},
        {PhaseKind::TumblingDescent, EventKind::HitWater, PhaseKind::Splashdown},
        {PhaseKind::Splashdown, EventKind::Floating, PhaseKind::SurfaceAttached},
        {PhaseKind::SurfaceAttached, EventKind::Detached, PhaseKind::Sinking},
        {PhaseKind::Sinking, EventKind::ReachedBottom, PhaseKind::BenthicSensing},
        {PhaseKind::BenthicSensing, EventKind::TriggerFired, PhaseKind::InflationTriggered},
        {PhaseKind::InflationTriggered, EventKind::ReactionComplete, PhaseKind::Ascent},
        {PhaseKind::Ascent, EventKind::Surfaced, PhaseKind::SurfaceDrift},
        {PhaseKind::SurfaceDrift, EventKind::Collected, PhaseKind::Retrieved},
    };
    for (const auto& e : kEdges) {
        if (e.from == phase.kind && e.on == event.kind) return {e.to, ""};
    }
    throw TransitionError("no transition from " + to_string(phase) + " on event " +
                          std::string(to_string(event.kind)));
}

std::string_view to_string(TriggerMode m) {
    switch (m) {
        case TriggerMode::ElapsedTime: return "ElapsedTime";
        case TriggerMode::DepthLimit: return "DepthLimit";
        case TriggerMode::Either: return "Either";
    }
    return "?";
}

std::optional<TriggerMode> trigger_mode_from_string(std::string_view s) {
    for (auto m : {TriggerMode::ElapsedTime, TriggerMode::DepthLimit, TriggerMode::Either}) {
        if (s == to_string(m)) return m;
    }
    return std::nullopt;
}

bool trigger_check(const pod::PodState& pod, double elapsed, const TriggerConfig& cfg) {
    if (!(elapsed >= 0.0)) throw DomainError("trigger_check: elapsed time must be >= 0");
    const bool by_time = elapsed >= cfg.max_benthic_time;
    const bool by_depth = pod.depth >= cfg.depth_limit;
    switch (cfg.mode) {
        case TriggerMode::ElapsedTime: return by_time;
        case TriggerMode::DepthLimit: return by_depth;
        case TriggerMode::Either: return by_time || by_depth;
    }
    return false;
}

void apply_preset(MissionConfig& cfg, const std::string& name) {
    auto design = tumbler::preset(name);
    auto schedule = aero::preset_schedule(name);
    if (!design || !schedule) throw DomainError("preset: unknown design '" + name + "'");
    const double payload = cfg.design.payload_mass;
    cfg.preset = name;
    cfg.design = *design;
    cfg.design.payload_mass = payload;
    cfg.aero = *schedule;
}

MissionConfig default_config() {
    MissionConfig cfg;
    cfg.design.payload_mass = 0.070;
    apply_preset(cfg, "dodecagon3");
    cfg.charge = buoyancy::reference_charge();
    return cfg;
}

namespace {

template <typename F>
void checked(const std::string& prefix, F&& f) {
    try {
        f();
    } catch (const DomainError& e) {
        throw DomainError(prefix + e.what());
    }
}

void require(bool ok, const std::string& message) {
    if (!ok) throw DomainError(message);
}

}  // namespace

void validate(const MissionConfig& c) {
    require(c.release_height > 0.0, "release_height must be > 0");
    require(c.water_depth > 0.0, "water_depth must be > 0");
    checked("tumbler.", [&] { tumbler::validate(c.design); });
    checked("aero: ", [&] { aero::validate(c.aero); });
    checked("air/water: ", [&] { environment::validate(c.fluid); });
    checked("wind.", [&] { environment::validate(c.wind); });
    checked("thermocline.", [&] { environment::validate(c.thermocline); });
    checked("pod: ", [&] { buoyancy::validate(c.pod, c.fluid); });
    checked("charge: ", [&] { buoyancy::validate(c.charge); });
    checked("compliance: ", [&] { buoyancy::validate(c.compliance); });
    checked("hydro: ", [&] { pod::validate(c.hydro); });
    require(c.sensor_interval > 0.0, "sensors.interval must be > 0");
    require(c.sensor_noise.pressure_std >= 0.0 && c.sensor_noise.temperature_std >= 0.0 &&
                c.sensor_noise.gps_error >= 0.0,
            "sensors noise values must be >= 0");
    require(c.trigger.max_benthic_time > 0.0, "trigger.max_benthic_time must be > 0");
    require(c.trigger.depth_limit > 0.0, "trigger.depth_limit must be > 0");
    const auto& t = c.timing;
    require(t.preflight_duration >= 0.0, "mission.preflight_duration must be >= 0");
    require(t.transit_duration >= 0.0, "mission.transit_duration must be >= 0");
    require(t.reaction_delay >= 0.0, "mission.reaction_delay must be >= 0");
    require(t.sma_available_force >= 0.0 && t.sma_required_force >= 0.0,
            "mission.sma forces must be >= 0");
    require(t.drift_factor >= 0.0, "mission.drift_factor must be >= 0");
    require(t.shoreline_distance > 0.0, "mission.shoreline_distance must be > 0");
    require(t.retrieval_timeout > 0.0, "mission.retrieval_timeout must be > 0");
    require(t.max_sink_time > 0.0 && t.max_ascent_time > 0.0, "mission time limits must be > 0");
    require(t.underwater_dt > 0.0, "mission.underwater_dt must be > 0");
    require(c.ensemble.pitch_band >= 0.0, "batch.pitch_band_deg must be >= 0");
    require(c.ensemble.grid_step > 0.0, "batch.grid_step must be > 0");
    require(c.descent.dt > 0.0 && c.descent.output_interval >= c.descent.dt && c.descent.timeout > 0.0,
            "descent: need dt > 0, output_interval >= dt, timeout > 0");
    require(c.descent.payload_cap >= 0.0, "descent.payload_cap must be >= 0");
    const double carried = tumbler::total_mass(c.design) + c.pod.dry_mass;
    require(carried <= kDronePayloadLimit,
            "drone payload exceeded: tumbler total mass (tumbler.structure_mass + tumbler.payload_mass) + "
            "pod.dry_mass = " + std::to_string(carried) + " kg > " + std::to_string(kDronePayloadLimit) +
                " kg");
}

void validate_transitions(const MissionLog& log) {
    MissionPhase phase{PhaseKind::PreFlight, ""};
    double last = -INFINITY;
    std::size_t terminals = 0;
    for (std::size_t i = 0; i < log.events.size(); ++i) {
        const auto& e = log.events[i];
        const std::string where = "event " + std::to_string(i) + ": ";
        if (!(e.from == phase)) throw ModelError(where + "starts from " + to_string(e.from) + ", expected " + to_string(phase));
        if (!(e.time >= last)) throw ModelError(where + "time goes backwards");
        MissionPhase next;
        try {
            next = advance(e.from, {e.event, e.to.reason});
        } catch (const TransitionError& err) {
            throw ModelError(where + err.what());
        }
        if (!(next == e.to)) throw ModelError(where + "recorded target " + to_string(e.to) + " is not reachable");
        if (is_terminal(next)) ++terminals;
        phase = next;
        last = e.time;
    }
    if (terminals != 1 || !is_terminal(phase)) throw ModelError("log must end in exactly one terminal phase");
    if (!(log.outcome.final_phase == phase)) throw ModelError("outcome phase disagrees with the event log");
}

aero::Trajectory simulate_aerial(const MissionConfig& cfg) {
    const aero::DescentEnvironment env{cfg.fluid, cfg.wind};
    return aero::simulate_descent(cfg.design, env, cfg.aero.at(cfg.design.payload_mass), cfg.release_height,
                                  cfg.seed, cfg.descent);
}

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
}

class Runner {
public:
    explicit Runner(const MissionConfig& cfg)
        : cfg_(cfg), sensor_rng_(stream(cfg.seed, 2)), surface_rng_(stream(cfg.seed, 1)) {
        env_.fluid = cfg.fluid;
        env_.thermocline = cfg.thermocline;
        env_.water_depth = cfg.water_depth;
        env_.current = cfg.current;
        env_.compliance = cfg.compliance;
        log_.seed = cfg.seed;
        log_.initial_pitch = cfg.design.initial_pitch;
    }

    MissionLog run() {
        fire(EventKind::Start, t_ += cfg_.timing.preflight_duration, "preflight complete");
        fire(EventKind::ArriveOnStation, t_ += cfg_.timing.transit_duration, "on station above the target");
        fire(EventKind::Drop, t_, "gripper opened");
        log_.outcome.release_time = t_;
        if (!descend()) return finish();
        underwater();
        return finish();
    }

private:
    void fire(EventKind kind, double time, std::string cause, std::string reason = {}) {
        const MissionPhase next = advance(phase_, {kind, reason});
        log_.events.push_back({time, phase_, next, kind, std::move(cause)});
        phase_ = next;
    }

    void fail(const std::string& reason, const std::string& cause) {
        fire(EventKind::Fail, t_, cause, reason);
    }

    bool descend() {
        log_.trajectory = simulate_aerial(cfg_);
        const auto& traj = log_.trajectory;
        for (const auto& w : tumbler::design_warnings(cfg_.design)) log_.warnings.push_back(w);
        for (const auto& w : traj.warnings) log_.warnings.push_back(w);
        t_ += traj.samples.back().time;
        if (traj.terminal == aero::TerminalEvent::Diverged) {
            fail("diverged", "aerial integration diverged");
            return false;
        }
        if (traj.terminal == aero::TerminalEvent::Timeout) {
            fail("descent_timeout", "tumbler did not reach the water");
            return false;
        }
        log_.descent_metrics = aero::trajectory_metrics(traj);
        log_.outcome.splashdown_time = t_;
        log_.outcome.landing_point = {traj.samples.back().position.x, 0.0};
        fire(EventKind::HitWater, t_, "surface contact");
        fire(EventKind::Floating, t_, "tumbler floating with pod attached");
        return true;
    }

    // Runs one underwater leg with the given phase tag.
    pod::UnderwaterResult leg(const pod::StopPredicate& until, double max_duration) {
        schedule_.phase = to_string(phase_);
        auto r = pod::simulate_underwater(state_, cfg_.pod, cfg_.hydro, env_, cfg_.timing.underwater_dt, until,
                                          max_duration, schedule_, sensor_rng_);
        for (auto& rec : r.records) {
            log_.outcome.max_depth = std::max(log_.outcome.max_depth, rec.depth);
            log_.sensors.push_back(std::move(rec));
        }
        state_ = r.state;
        log_.outcome.max_depth = std::max(log_.outcome.max_depth, state_.depth);
        t_ = state_.time;
        return r;
    }

    void underwater() {
        const auto& timing = cfg_.timing;
        state_ = {};
        state_.time = t_;
        schedule_.interval = cfg_.sensor_interval;
        schedule_.next_time = t_;
        schedule_.noise = cfg_.sensor_noise;
        schedule_.origin = log_.outcome.landing_point;

        const double attached_at = t_;
        leg([&](const pod::PodState& s) { return pod::detach_check(s.time - attached_at, cfg_.hydro); },
            cfg_.hydro.dissolution_time + 1.0);
        state_.attached = false;
        fire(EventKind::Detached, t_, "adhesive dissolved");

        const double water_depth = cfg_.water_depth;
        if (!leg([&](const pod::PodState& s) { return s.depth >= water_depth; }, timing.max_sink_time).stopped) {
            fail("sink_timeout", "pod never reached the bottom");
            return;
        }
        fire(EventKind::ReachedBottom, t_, "resting on the bottom");
        const double benthic_start = t_;

        const double benthic_limit =
            cfg_.trigger.mode == TriggerMode::DepthLimit ? 0.0 : cfg_.trigger.max_benthic_time + 1.0;
        if (!leg([&](const pod::PodState& s) { return trigger_check(s, s.time - benthic_start, cfg_.trigger); },
                 benthic_limit)
                 .stopped) {
            fail("trigger_never_fired", "benthic trigger condition unreachable");
            return;
        }
        fire(EventKind::TriggerFired, t_, std::string("trigger (") + std::string(to_string(cfg_.trigger.mode)) + ")");
        if (timing.sma_available_force < timing.sma_required_force) {
            fail("sma_insufficient_force", "actuator cannot break the reactant wall");
            return;
        }

        const double reaction_start = t_;
        leg([&](const pod::PodState& s) { return s.time - reaction_start >= timing.reaction_delay - 1e-9; },
            timing.reaction_delay + 1.0);
        const double n = buoyancy::gas_from_reactants(cfg_.charge).co2_moles;
        const double depth = state_.depth;
        state_.bladder = buoyancy::equilibrium_for_gas(n, cfg_.pod, environment::water_pressure(depth, cfg_.fluid),
                                                       pod::gas_temperature(depth, env_), cfg_.compliance);
        state_.inflation_latched = true;
        log_.outcome.benthic_duration = t_ - benthic_start;
        fire(EventKind::ReactionComplete, t_, "bladder inflated");

        pod::PodState at_rest = state_;
        at_rest.vertical_velocity = 0.0;
        if (!(pod::net_vertical_force(at_rest, cfg_.pod, cfg_.hydro, cfg_.fluid) < 0.0)) {
            fail("recovery_unreachable", "equilibrium inflation below the float fraction at this depth");
            return;
        }
        if (!leg([](const pod::PodState& s) { return s.depth == 0.0; }, timing.max_ascent_time).stopped) {
            fail("ascent_timeout", "pod did not reach the surface");
            return;
        }
        log_.outcome.resurfaced = true;
        fire(EventKind::Surfaced, t_, "pod at the surface");
        drift();
    }

    void drift() {
        const auto& timing = cfg_.timing;
        environment::WindModel wind = cfg_.wind;
        wind.gust = {};
        wind.gust_initialised = false;
        const environment::Horizontal start = state_.horizontal_drift;
        const double surfaced_at = t_;
        auto beached = [&](const pod::PodState& s) {
            return std::hypot(s.horizontal_drift.x - start.x, s.horizontal_drift.y - start.y) >=
                   timing.shoreline_distance;
        };
        constexpr double kChunk = 0.1;  // s per wind sample
        std::string mode = "timeout";
        while (t_ - surfaced_at < timing.retrieval_timeout - 1e-9) {
            const auto w = environment::wind_sample(wind, kChunk, surface_rng_);
            env_.current = {timing.drift_factor * w.x, timing.drift_factor * w.y};
            const double span = std::min(kChunk, timing.retrieval_timeout - (t_ - surfaced_at));
            if (leg(beached, span).stopped) {
                mode = "shoreline";
                break;
            }
        }
        // The last record marks the pickup.
        schedule_.phase = to_string(phase_);
        if (log_.sensors.empty() || log_.sensors.back().time < t_) {
            log_.sensors.push_back(
                pod::sample_sensors(state_, env_, cfg_.sensor_noise, sensor_rng_, schedule_.phase, schedule_.origin));
        }
        log_.outcome.retrieval_mode = mode;
        log_.outcome.retrieval_position =
            environment::Horizontal{log_.outcome.landing_point.x + state_.horizontal_drift.x,
                                    log_.outcome.landing_point.y + state_.horizontal_drift.y};
        fire(EventKind::Collected, t_, mode == "shoreline" ? "drifted ashore" : "picked up after surface timeout");
    }

    MissionLog finish() {
        log_.outcome.final_phase = phase_;
        log_.outcome.end_time = t_;
        return std::move(log_);
    }

    const MissionConfig& cfg_;
    pod::UnderwaterEnvironment env_;
    std::mt19937_64 sensor_rng_;
    std::mt19937_64 surface_rng_;
    pod::SensorSchedule schedule_;
    pod::PodState state_;
    MissionPhase phase_{PhaseKind::PreFlight, ""};
    double t_ = 0.0;
    MissionLog log_;
};

class Welford {
public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }
    Statistic result() const {
        Statistic s;
        s.count = n_;
        s.mean = n_ ? mean_ : 0.0;
        s.std = n_ ? std::sqrt(m2_ / static_cast<double>(n_)) : 0.0;
        return s;
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace

MissionLog run_mission(const MissionConfig& cfg) {
    validate(cfg);
    return Runner(cfg).run();
}

std::optional<std::pair<double, double>> resample_at(const aero::Trajectory& traj, double z) {
    const auto& s = traj.samples;
    if (s.empty()) return std::nullopt;
    if (s.front().position.z >= z) return std::make_pair(s.front().position.x, s.front().velocity.z);
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].position.z >= z) {
            const double z0 = s[i - 1].position.z;
            const double z1 = s[i].position.z;
            const double t = z1 > z0 ? (z - z0) / (z1 - z0) : 1.0;
            return std::make_pair(s[i - 1].position.x + t * (s[i].position.x - s[i - 1].position.x),
                                  s[i - 1].velocity.z + t * (s[i].velocity.z - s[i - 1].velocity.z));
        }
    }
    return std::nullopt;
}

EnsembleSummary run_batch(const MissionConfig& cfg, int n_runs, std::uint64_t base_seed, int jobs) {
    if (n_runs < 1) throw DomainError("run_batch: n_runs must be >= 1");
    validate(cfg);

    std::vector<MissionLog> logs(static_cast<std::size_t>(n_runs));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n_runs; i = next++) {
            MissionConfig run = cfg;
            run.seed = base_seed + static_cast<std::uint64_t>(i);
            if (cfg.ensemble.pitch_band > 0.0) {
                auto rng = stream(run.seed, 3);
                std::uniform_real_distribution<double> jitter(-cfg.ensemble.pitch_band, cfg.ensemble.pitch_band);
                run.design.initial_pitch += jitter(rng);
            }
            logs[static_cast<std::size_t>(i)] = Runner(run).run();
        }
    };
    const int threads = std::clamp(jobs, 1, n_runs);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    EnsembleSummary out;
    out.base_seed = base_seed;
    Welford lx, ly, md, pk, gl, fl;
    for (auto& log : logs) {
        RunSummary r;
        r.seed = log.seed;
        r.initial_pitch = log.initial_pitch;
        r.final_phase = log.outcome.final_phase;
        r.landed = log.descent_metrics.has_value();
        r.landing_point = log.outcome.landing_point;
        r.metrics = log.descent_metrics;
        r.resurfaced = log.outcome.resurfaced;
        r.warning_count = log.warnings.size();
        if (r.final_phase.kind == PhaseKind::Retrieved) ++out.completed;
        if (r.final_phase.kind == PhaseKind::Failed) ++out.failed;
        if (r.landed) {
            lx.add(r.landing_point.x);
            ly.add(r.landing_point.y);
            md.add(r.metrics->mean_descent_rate);
            pk.add(r.metrics->peak_descent_rate);
            gl.add(r.metrics->glide_ratio);
            fl.add(r.metrics->flip_count);
        }
        out.runs.push_back(r);
        out.trajectories.push_back(std::move(log.trajectory));
    }
    const auto sx = lx.result();
    const auto sy = ly.result();
    out.mean_landing = {sx.mean, sy.mean};
    out.dispersion_radius = std::sqrt(sx.std * sx.std + sy.std * sy.std);
    out.mean_descent_rate = md.result();
    out.peak_descent_rate = pk.result();
    out.glide_ratio = gl.result();
    out.flip_count = fl.result();

    const auto steps = static_cast<long>(std::floor(cfg.release_height / cfg.ensemble.grid_step + 1e-9));
    for (long k = 0; k <= steps; ++k) {
        const double z = std::min(std::round(static_cast<double>(k) * cfg.ensemble.grid_step * 1e9) / 1e9, cfg.release_height);
        Welford x, rate;
        for (std::size_t i = 0; i < out.runs.size(); ++i) {
            if (!out.runs[i].landed) continue;
            if (auto p = resample_at(out.trajectories[i], z)) {
                x.add(p->first);
                rate.add(p->second);
            }
        }
        const auto sxz = x.result();
        out.grid.push_back({z, sxz.mean, sxz.std, rate.result().mean, sxz.count});
    }
    return out;
}

}  // namespace tumblerpod::mission
