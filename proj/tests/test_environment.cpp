#include <doctest.h>

#include <cmath>
#include <random>

#include "tumblerpod/environment.hpp"
#include "tumblerpod/errors.hpp"

using namespace tumblerpod;
using namespace tumblerpod::environment;

TEST_CASE("water_pressure at the surface is atmospheric") {
    CHECK(water_pressure(0.0, {}) == 101325.0);
}

TEST_CASE("water_pressure at 5 m is about 50 kPa gauge") {
    const double p = water_pressure(5.0, {});
    CHECK(p == doctest::Approx(101325.0 + 1000.0 * 9.81 * 5.0).epsilon(1e-15));
    CHECK((p - 101325.0) / 1000.0 == doctest::Approx(50.0).epsilon(0.02));
}

TEST_CASE("water_pressure gauge is linear in depth") {
    const FluidProperties f;
    const double g5 = water_pressure(5.0, f) - f.atmospheric_pressure;
    const double g25 = water_pressure(2.5, f) - f.atmospheric_pressure;
    CHECK(g25 == doctest::Approx(g5 / 2.0).epsilon(1e-15));
}

TEST_CASE("water_pressure rejects negative depth") {
    CHECK_THROWS_AS(water_pressure(-0.1, {}), DomainError);
}

TEST_CASE("water_pressure slope is rho g and strictly increasing") {
    FluidProperties f;
    f.water_density = 1025.0;
    f.gravity = 9.80665;
    double prev = water_pressure(0.0, f);
    for (int i = 1; i <= 200; ++i) {
        const double z = 0.37 * i;
        const double p = water_pressure(z, f);
        CHECK(p > prev);
        CHECK((p - f.atmospheric_pressure) / z == doctest::Approx(f.water_density * f.gravity).epsilon(1e-12));
        prev = p;
    }
}

TEST_CASE("water_temperature midpoint, degenerate profile and hand-solved point") {
    ThermoclineProfile p{20.0, 8.0, 3.0, 0.5};
    CHECK(water_temperature(3.0, p) == doctest::Approx(14.0));
    // 8 + 12 / (1 + 3) = 11
    CHECK(water_temperature(3.0 + 0.5 * std::log(3.0), p) == doctest::Approx(11.0).epsilon(1e-12));
    ThermoclineProfile flat{10.0, 10.0, 4.0, 1.0};
    for (double z : {0.0, 1.0, 4.0, 50.0}) CHECK(water_temperature(z, flat) == doctest::Approx(10.0));
}

TEST_CASE("water_temperature stays inside the end temperatures") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        ThermoclineProfile p{40.0 * u(rng) - 5.0, 40.0 * u(rng) - 5.0, 20.0 * u(rng), 0.01 + 5.0 * u(rng)};
        const double z = 1000.0 * u(rng) * u(rng);
        const double t = water_temperature(z, p);
        CHECK(t >= std::min(p.surface_temp, p.bottom_temp));
        CHECK(t <= std::max(p.surface_temp, p.bottom_temp));
    }
}

TEST_CASE("still and constant wind") {
    std::mt19937_64 rng(1);
    WindModel still;
    WindModel constant;
    constant.kind = WindKind::Constant;
    constant.mean_velocity = {4.5, 0.0};
    const auto before = rng;
    for (int i = 0; i < 100; ++i) {
        CHECK(wind_sample(still, 0.01, rng) == Horizontal{});
        CHECK(wind_sample(constant, 0.01, rng) == Horizontal{4.5, 0.0});
    }
    CHECK((rng == before));
}

TEST_CASE("gusty wind never exceeds mean plus cap") {
    WindModel w;
    w.kind = WindKind::Gusty;
    w.mean_velocity = {4.5, 0.0};
    w.gust_std = 2.0;
    w.gust_cap = 3.0;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200000; ++i) {
        const auto s = wind_sample(w, 0.01, rng);
        REQUIRE(s.norm() <= 7.5 + 1e-12);
    }
}

TEST_CASE("gusty wind is reproducible and unbiased") {
    WindModel w;
    w.kind = WindKind::Gusty;
    w.mean_velocity = {4.5, -1.0};
    w.gust_std = 1.0;
    w.gust_cap = 10.0;
    auto w2 = w;
    std::mt19937_64 a(11), b(11);
    for (int i = 0; i < 1000; ++i) CHECK(wind_sample(w, 0.1, a) == wind_sample(w2, 0.1, b));

    // dt much longer than the correlation time makes samples nearly independent,
    // so the plain standard error applies.
    WindModel m = w;
    m.gust_initialised = false;
    std::mt19937_64 rng(5);
    const int n = 1000000;
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto s = wind_sample(m, 20.0, rng);
        sx += s.x;
        sy += s.y;
    }
    const double se = m.gust_std / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sx / n - 4.5) < 3.0 * se);
    CHECK(std::abs(sy / n + 1.0) < 3.0 * se);
}

TEST_CASE("fluid and wind validation") {
    FluidProperties f;
    f.water_density = 1.0;
    CHECK_THROWS_AS(validate(f), DomainError);
    WindModel w;
    w.gust_std = -1.0;
    CHECK_THROWS_AS(validate(w), DomainError);
    ThermoclineProfile p;
    p.thermocline_width = 0.0;
    CHECK_THROWS_AS(validate(p), DomainError);
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(wind_sample(w, 0.0, rng), DomainError);
}
