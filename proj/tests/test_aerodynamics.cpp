#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tumblerpod/aerodynamics.hpp"
#include "tumblerpod/errors.hpp"

using namespace tumblerpod;
using namespace tumblerpod::aero;

namespace {

tumbler::TumblerDesign design_of(const char* name, double payload = 0.0) {
    auto d = *tumbler::preset(name);
    d.payload_mass = payload;
    return d;
}

Trajectory descend(const char* name, double payload, double height = 15.0, DescentEnvironment env = {}) {
    return simulate_descent(design_of(name, payload), env, preset_coefficients(name, payload), height, 0);
}

AeroCoefficients random_coeffs(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    AeroCoefficients c;
    c.c_translational_lift = 3.0 * u(rng);
    c.c_rotational_lift = u(rng);
    c.c_drag_edgewise = 0.3 * u(rng);
    c.c_drag_broadside = c.c_drag_edgewise + 2.0 * u(rng);
    c.c_rotational_damping = 0.02 * u(rng);
    c.c_lateral_drift = 0.3 * (u(rng) - 0.5);
    return c;
}

}  // namespace

TEST_CASE("ballistic limit of the force model") {
    const auto disc = tumbler::effective_disc(design_of("dodecagon3"), {});
    FallState s;
    s.velocity = {0.3, 2.0};
    s.pitch_rate = 4.0;
    const auto f = quasi_steady_forces(s, disc, 0.05, 0.01, {}, {}, {});
    CHECK(f.force.x == 0.0);
    CHECK(f.force.z == doctest::Approx(0.05 * 9.81));
    CHECK(f.torque == 0.0);
}

TEST_CASE("lift is perpendicular and drag anti-parallel to the relative velocity") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto disc = tumbler::effective_disc(design_of("dodecagon2"), {});
    for (int i = 0; i < 2000; ++i) {
        FallState s;
        s.velocity = {3.0 * u(rng), 3.0 * u(rng)};
        s.pitch = 4.0 * u(rng);
        s.pitch_rate = 20.0 * u(rng);
        const Vec2 wind{2.0 * u(rng), 0.0};
        const auto f = quasi_steady_forces(s, disc, 0.07, 0.02 * u(rng), random_coeffs(rng), wind, {});
        const Vec2 v = f.relative_velocity;
        const double scale = v.norm();
        if (scale < 1e-6) continue;
        CHECK(std::abs(dot(f.translational_lift, v)) <= 1e-12 * (1.0 + f.translational_lift.norm()) * scale);
        CHECK(std::abs(dot(f.rotational_lift, v)) <= 1e-12 * (1.0 + f.rotational_lift.norm()) * scale);
        CHECK(std::abs(dot(f.lateral, v)) <= 1e-12 * (1.0 + f.lateral.norm()) * scale);
        if (f.drag.norm() > 0.0) {
            CHECK(std::abs(cross(f.drag, v)) <= 1e-12 * f.drag.norm() * scale);
            CHECK(dot(f.drag, v) < 0.0);
        }
        CHECK(f.angle_of_attack >= 0.0);
        CHECK(f.angle_of_attack <= std::numbers::pi / 2.0 + 1e-15);
    }
}

TEST_CASE("rk4 step: zero forces and ballistic kinematics") {
    const RateFunction none = [](const FallState& s) {
        StateRate r;
        r.velocity = s.velocity;
        return r;
    };
    FallState rest;
    const auto still = step(rest, 1e-3, none);
    CHECK(still.position == Vec2{});
    CHECK(still.velocity == Vec2{});

    const RateFunction gravity = [](const FallState& s) {
        StateRate r;
        r.velocity = s.velocity;
        r.acceleration = {0.0, 9.81};
        return r;
    };
    FallState s;
    for (int i = 0; i < 1000; ++i) s = step(s, 1e-3, gravity);
    CHECK(std::abs(s.velocity.z - 9.81) < 1e-9);
    CHECK(std::abs(s.position.z - 4.905) < 1e-6);
}

TEST_CASE("rk4 is fourth order") {
    // dx/dt = -x has no exact RK4 representation, unlike constant gravity.
    const RateFunction decay = [](const FallState& s) {
        StateRate r;
        r.velocity = s.velocity;
        r.acceleration = s.velocity * -1.0;
        return r;
    };
    auto run = [&](double dt) {
        FallState s;
        s.velocity = {1.0, 0.0};
        const int n = static_cast<int>(std::lround(1.0 / dt));
        for (int i = 0; i < n; ++i) s = step(s, dt, decay);
        return std::abs(s.velocity.x - std::exp(-1.0));
    };
    const double ratio = run(0.1) / run(0.05);
    CHECK(ratio == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("step reports a non-finite state") {
    const RateFunction blow = [](const FallState&) {
        StateRate r;
        r.acceleration = {std::numeric_limits<double>::infinity(), 0.0};
        return r;
    };
    CHECK_THROWS_AS(step(FallState{}, 1e-3, blow), ModelError);
}

TEST_CASE("zero-coefficient fall matches free fall") {
    const auto traj = simulate_descent(design_of("dodecagon3"), {}, {}, 15.0, 0);
    REQUIRE(traj.terminal == TerminalEvent::HitWater);
    for (const auto& s : traj.samples) {
        CHECK(std::abs(s.position.z - 0.5 * 9.81 * s.time * s.time) < 1e-6);
        CHECK(std::abs(s.position.x) < 1e-12);
    }
    CHECK(traj.samples.back().time == doctest::Approx(std::sqrt(2.0 * 15.0 / 9.81)).epsilon(1e-9));

    const auto ten = simulate_descent(design_of("dodecagon3"), {}, {}, 10.0, 0);
    CHECK(std::abs(ten.samples.back().time - std::sqrt(2.0 * 10.0 / 9.81)) < 1e-4);
    CHECK(ten.samples.back().position.z == 10.0);
}

TEST_CASE("calibrated dodecagon3 descent bands") {
    const auto traj = descend("dodecagon3", 0.0);
    REQUIRE(traj.terminal == TerminalEvent::HitWater);
    CHECK_FALSE(traj.steep_mode);
    const auto m = trajectory_metrics(traj);
    CHECK(m.mean_descent_rate >= 0.8);
    CHECK(m.mean_descent_rate <= 2.0);
    CHECK(m.peak_descent_rate <= 2.75);
    CHECK(m.peak_descent_rate >= m.mean_descent_rate);
    CHECK(m.glide_ratio >= 1.2);
    CHECK(m.glide_ratio <= 1.8);
    CHECK(m.flip_count >= 1);
    CHECK(traj.samples.back().position.z == 15.0);
}

TEST_CASE("trajectory_metrics on synthetic trajectories") {
    Trajectory t;
    t.terminal = TerminalEvent::HitWater;
    for (int i = 0; i <= 100; ++i) {
        FallState s;
        s.time = 0.01 * i;
        s.position = {1.5 * 0.01 * i, 0.01 * i};
        s.velocity = {1.5, 1.0};
        t.samples.push_back(s);
    }
    auto m = trajectory_metrics(t);
    CHECK(m.glide_ratio == doctest::Approx(1.5));
    CHECK(m.mean_descent_rate == doctest::Approx(1.0));
    CHECK(m.flip_count == 0);
    CHECK_FALSE(m.tumbling_onset_time);

    for (auto& s : t.samples) s.position.x = 0.0;
    m = trajectory_metrics(t);
    CHECK(m.glide_ratio == 0.0);
    CHECK(m.flip_count == 0);

    // Constant spin: pitch advances 2.5 half-turns.
    for (auto& s : t.samples) s.pitch = 2.5 * std::numbers::pi * s.time;
    m = trajectory_metrics(t);
    REQUIRE(m.tumbling_onset_time);
    CHECK(*m.tumbling_onset_time == doctest::Approx(0.2));
    CHECK(m.flip_count == 2);

    t.terminal = TerminalEvent::Timeout;
    CHECK_THROWS_AS(trajectory_metrics(t), ModelError);
}

TEST_CASE("descent is deterministic, also with gusts") {
    DescentEnvironment env;
    env.wind.kind = environment::WindKind::Gusty;
    env.wind.mean_velocity = {4.5, 0.0};
    env.wind.gust_std = 1.0;
    env.wind.gust_cap = 3.0;
    const auto c = preset_coefficients("dodecagon3", 0.07);
    const auto a = simulate_descent(design_of("dodecagon3", 0.07), env, c, 15.0, 42);
    const auto b = simulate_descent(design_of("dodecagon3", 0.07), env, c, 15.0, 42);
    const auto other = simulate_descent(design_of("dodecagon3", 0.07), env, c, 15.0, 43);
    CHECK(a.samples == b.samples);
    CHECK_FALSE(a.samples == other.samples);
}

TEST_CASE("mirror symmetry") {
    DescentEnvironment env;
    env.wind.kind = environment::WindKind::Constant;
    env.wind.mean_velocity = {1.2, 0.0};
    const auto d = design_of("square");
    auto c = preset_coefficients("square", 0.0);
    const auto a = simulate_descent(d, env, c, 15.0, 0);
    auto dm = d;
    dm.initial_pitch = -d.initial_pitch;
    auto em = env;
    em.wind.mean_velocity.x = -env.wind.mean_velocity.x;
    c.c_lateral_drift = -c.c_lateral_drift;
    const auto b = simulate_descent(dm, em, c, 15.0, 0);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(b.samples[i].position.x == doctest::Approx(-a.samples[i].position.x).epsilon(1e-9).scale(1.0));
        CHECK(b.samples[i].position.z == doctest::Approx(a.samples[i].position.z).epsilon(1e-9).scale(1.0));
        CHECK(b.samples[i].pitch == doctest::Approx(-a.samples[i].pitch).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("mirror symmetry with an offset payload uses the reversed chord") {
    // With the centre of mass off-centre the mirrored body is the chord
    // turned end for end, i.e. pitch pi - theta.
    const auto d = design_of("dodecagon3", 0.06);
    const auto c = preset_coefficients("dodecagon3", 0.06);
    const auto a = simulate_descent(d, {}, c, 15.0, 0);
    auto dm = d;
    dm.initial_pitch = std::numbers::pi - d.initial_pitch;
    const auto b = simulate_descent(dm, {}, c, 15.0, 0);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(b.samples[i].position.x == doctest::Approx(-a.samples[i].position.x).epsilon(1e-9).scale(1.0));
        CHECK(b.samples[i].position.z == doctest::Approx(a.samples[i].position.z).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("energy never increases in still air") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const char* names[] = {"circle1", "circle2", "square", "dodecagon1", "dodecagon2", "dodecagon3"};
    for (int run = 0; run < 12; ++run) {
        const char* name = names[run % 6];
        auto d = design_of(name, 0.1 * u(rng));
        d.initial_pitch = 3.0 * (u(rng) - 0.5);
        const auto c = preset_coefficients(name, d.payload_mass);
        const auto t = simulate_descent(d, {}, c, 15.0, 0);
        const double tol = 1e-6 * t.mass * 9.81 * 15.0;
        for (std::size_t i = 1; i < t.samples.size(); ++i) {
            const double e0 = mechanical_energy(t.samples[i - 1], t.mass, t.inertia, 9.81);
            const double e1 = mechanical_energy(t.samples[i], t.mass, t.inertia, 9.81);
            REQUIRE(e1 <= e0 + tol);
        }
    }
}

TEST_CASE("payload trend of the payload-scheduled presets") {
    for (const char* name : {"dodecagon2", "dodecagon3"}) {
        CAPTURE(name);
        double prev_glide = INFINITY, prev_rate = 0.0;
        for (int g = 0; g <= 120; g += 30) {
            const auto t = descend(name, g / 1000.0);
            REQUIRE(t.terminal == TerminalEvent::HitWater);
            CHECK_FALSE(t.steep_mode);
            const auto m = trajectory_metrics(t);
            CHECK(m.flip_count >= 1);
            CHECK(m.glide_ratio <= prev_glide);
            CHECK(m.mean_descent_rate >= prev_rate);
            prev_glide = m.glide_ratio;
            prev_rate = m.mean_descent_rate;
        }
    }
}

TEST_CASE("tumbling gate") {
    const auto heavy = descend("dodecagon2", 0.150);
    CHECK(heavy.steep_mode);
    REQUIRE(heavy.terminal == TerminalEvent::HitWater);
    CHECK(trajectory_metrics(heavy).flip_count == 0);
    REQUIRE_FALSE(heavy.warnings.empty());
    CHECK(heavy.warnings.front().rfind("tumbling_failure", 0) == 0);

    // A heavy, tiny plate falls at low Reynolds number only in thick air;
    // here a light sheet is made chaotic instead.
    auto chaotic = design_of("dodecagon2");
    chaotic.characteristic_radius = 0.05;
    const auto tc = simulate_descent(chaotic, {}, preset_coefficients("dodecagon2", 0.0), 15.0, 0);
    CHECK(tc.regime == tumbler::FallRegime::Chaotic);
    CHECK(tc.steep_mode);

    DescentConfig raised;
    raised.payload_cap = 0.2;
    const auto allowed = simulate_descent(design_of("dodecagon2", 0.150), {},
                                          preset_coefficients("dodecagon2", 0.150), 15.0, 0, raised);
    CHECK_FALSE(allowed.steep_mode);
}

TEST_CASE("timeout and input checks") {
    DescentConfig quick;
    quick.timeout = 0.5;
    const auto t = simulate_descent(design_of("dodecagon3"), {}, preset_coefficients("dodecagon3", 0.0), 15.0, 0, quick);
    CHECK(t.terminal == TerminalEvent::Timeout);
    CHECK_THROWS_AS(trajectory_metrics(t), ModelError);
    CHECK_THROWS_AS(simulate_descent(design_of("dodecagon3"), {}, {}, 0.0, 0), DomainError);
    AeroCoefficients bad;
    bad.c_drag_edgewise = 1.0;
    bad.c_drag_broadside = 0.5;
    CHECK_THROWS_AS(validate(bad), DomainError);
}

TEST_CASE("coefficient schedule interpolation") {
    const auto s = *preset_schedule("dodecagon3");
    CHECK(s.at(0.0) == s.anchors[0].coeffs);
    CHECK(s.at(-1.0) == s.anchors[0].coeffs);
    CHECK(s.at(0.5) == s.anchors.back().coeffs);
    const auto mid = s.at(0.015);
    CHECK(mid.c_translational_lift ==
          doctest::Approx(0.5 * (s.anchors[0].coeffs.c_translational_lift + s.anchors[1].coeffs.c_translational_lift)));
    for (const auto& name : tumbler::preset_names()) CHECK_NOTHROW(validate(*preset_schedule(name)));
    CHECK_THROWS_AS(preset_coefficients("kite", 0.0), DomainError);
    CoefficientSchedule unsorted{{{0.05, {}}, {0.01, {}}}};
    CHECK_THROWS_AS(validate(unsorted), DomainError);
}
