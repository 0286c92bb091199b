#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <string>

#include "tumblerpod/config.hpp"
#include "tumblerpod/tumbler.hpp"

using namespace tumblerpod;
using namespace tumblerpod::config;
using mission::MissionConfig;

namespace {

ConfigError error_of(const std::string& text, const ParseOptions& opt = {}) {
    try {
        parse_config(text, opt);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError for: " << text);
    return ConfigError("unreachable");
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("empty document is the default lake scenario") {
    CHECK(parse_config("").config == mission::default_config());
    CHECK(parse_config("# only a comment\n\n").config == mission::default_config());
}

TEST_CASE("value tokens") {
    CHECK(parse_value("1.5").number == 1.5);
    CHECK(parse_value("-2e3").number == -2000.0);
    CHECK(parse_value("\"Gusty\"").text == "Gusty");
    CHECK(parse_value("true").boolean);
    CHECK(parse_value("false").kind == Value::Kind::Bool);
    const auto arr = parse_value("[0.0, 0.03 ,0.06]");
    REQUIRE(arr.kind == Value::Kind::Array);
    CHECK(arr.array == std::vector<double>{0.0, 0.03, 0.06});
    CHECK_THROWS_AS(parse_value("\"open"), ConfigError);
    CHECK_THROWS_AS(parse_value("[1, 2"), ConfigError);
    CHECK_THROWS_AS(parse_value("1.5x"), ConfigError);
    CHECK_THROWS_AS(parse_value(""), ConfigError);
}

TEST_CASE("round trip through the emitted form") {
    for (const auto& name : tumbler::preset_names()) {
        CAPTURE(name);
        auto cfg = mission::default_config();
        mission::apply_preset(cfg, name);
        const auto text = emit_config(cfg);
        const auto back = parse_config(text).config;
        CHECK(back == cfg);
        CHECK(emit_config(back) == text);
    }
}

TEST_CASE("round trip holds for perturbed numeric fields") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.9, 1.1);
    for (int k = 0; k < 20; ++k) {
        auto cfg = mission::default_config();
        cfg.release_height *= u(rng);
        cfg.design.payload_mass *= u(rng);
        cfg.water_depth *= u(rng);
        cfg.wind.kind = environment::WindKind::Gusty;
        cfg.wind.mean_velocity = {u(rng), -u(rng)};
        cfg.wind.gust_std = u(rng) / 3.0;
        cfg.wind.gust_cap = u(rng);
        cfg.thermocline.bottom_temp *= u(rng);
        cfg.seed = rng();
        cfg.design.structure_mass = std::nullopt;
        CHECK(parse_config(emit_config(cfg)).config == cfg);
    }
}

TEST_CASE("preset applies first and explicit keys override it") {
    const auto cfg = parse_config("preset = \"dodecagon3\"\n[tumbler]\npayload_mass = 0.05\n").config;
    REQUIRE(cfg.design.structure_mass.has_value());
    CHECK(*cfg.design.structure_mass == doctest::Approx(0.022));
    CHECK(cfg.design.payload_mass == 0.05);

    const auto sq = parse_config("[tumbler]\nshape = \"square\"\npreset_ignored = 1\n", {.lax = true});
    CHECK(sq.config.design.shape == tumbler::Shape::Square);
    CHECK(sq.warnings.size() == 1);

    auto e = error_of("preset = \"hexagon\"\n");
    CHECK(contains(e.what(), "hexagon"));
}

TEST_CASE("invalid values name the key") {
    auto e = error_of("[tumbler]\npayload_mass = -0.01\n");
    CHECK(contains(e.what(), "payload_mass"));
    CHECK(e.key() == "tumbler.payload_mass");
    CHECK(e.line() == 2);

    e = error_of("release_height = 0\n");
    CHECK(contains(e.what(), "release_height"));

    e = error_of("[tumbler]\npayload_mass = 0.3\n");
    CHECK(contains(e.what(), "drone payload"));

    e = error_of("[wind]\nkind = \"Hurricane\"\n");
    CHECK(e.key() == "wind.kind");

    e = error_of("[tumbler]\npayload_mass = \"heavy\"\n");
    CHECK(e.key() == "tumbler.payload_mass");
}

TEST_CASE("syntax errors carry line numbers") {
    CHECK(error_of("seed = 1\n[wind\n").line() == 2);
    CHECK(error_of("seed = 1\n\n[wind]\nkind\n").line() == 4);
    CHECK(error_of("[water]\ndepth = 3.0 extra\n").line() == 2);
    CHECK(error_of("a b = 1\n").line() == 1);
}

TEST_CASE("duplicate and unknown keys") {
    auto e = error_of("[water]\ndepth = 3\ndepth = 4\n");
    CHECK(contains(e.what(), "duplicate"));
    CHECK(e.line() == 3);

    e = error_of("[water]\nsalinity = 3\n");
    CHECK(e.key() == "water.salinity");
    e = error_of("[ocean]\ndepth = 3\n");
    CHECK(e.line() == 1);

    const auto lax = parse_config("[ocean]\ndepth = 30\n[water]\nsalinity = 3\ndepth = 4\n", {.lax = true});
    CHECK(lax.config.water_depth == 4.0);
    CHECK(lax.warnings.size() >= 2);
}

TEST_CASE("unit aliases convert to SI") {
    const auto cfg = parse_config(
                         "[wind]\nkind = \"Constant\"\nmean_x_kt = 10\n"
                         "[tumbler]\ninitial_pitch_deg = 90\n"
                         "[batch]\npitch_band_deg = 5\n")
                         .config;
    CHECK(cfg.wind.mean_velocity.x == doctest::Approx(10.0 * 0.5144).epsilon(1e-12));
    CHECK(cfg.design.initial_pitch == doctest::Approx(std::acos(-1.0) / 2.0).epsilon(1e-12));
    CHECK(cfg.ensemble.pitch_band == doctest::Approx(5.0 * std::acos(-1.0) / 180.0).epsilon(1e-12));
    CHECK(contains(error_of("[wind]\nmean_x = 1\nmean_x_kt = 2\n").what(), "mean_x"));
}

TEST_CASE("aero coefficient arrays follow the anchors") {
    const std::string text =
        "[aero]\npayload_anchors = [0.0, 0.1]\nc_translational_lift = [1.0, 2.0]\n"
        "c_rotational_lift = 0.2\nc_drag_edgewise = 0.05\nc_drag_broadside = 1.0\n"
        "c_rotational_damping = 0.001\nc_lateral_drift = 0.0\n";
    const auto cfg = parse_config(text).config;
    REQUIRE(cfg.aero.anchors.size() == 2);
    CHECK(cfg.aero.at(0.05).c_translational_lift == doctest::Approx(1.5));
    CHECK(cfg.aero.anchors[1].coeffs.c_rotational_lift == 0.2);

    auto e = error_of("[aero]\npayload_anchors = [0.0, 0.1]\nc_translational_lift = [1.0, 2.0, 3.0]\n");
    CHECK(contains(e.what(), "c_translational_lift"));
}

TEST_CASE("compliance curve is read as a pair of arrays") {
    const auto cfg = parse_config("[compliance]\npressures = [0.0, 10000.0, 70000.0]\nfractions = [0.0, 0.05, 0.3]\n").config;
    CHECK(buoyancy::bladder_expansion(10000.0, cfg.compliance) == doctest::Approx(0.05));
    CHECK_THROWS_AS(parse_config("[compliance]\npressures = [0.0, 1.0]\nfractions = [0.0]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[compliance]\npressures = [0.0, 2.0]\nfractions = [0.0, -0.1]\n"), ConfigError);
}

TEST_CASE("large seeds are exact") {
    CHECK(parse_config("seed = 18446744073709551615\n").config.seed == 18446744073709551615ull);
    CHECK_THROWS_AS(parse_config("seed = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("seed = 1.5\n"), ConfigError);
}

TEST_CASE("overrides and key resolution") {
    auto cfg = mission::default_config();
    apply_override(cfg, "tumbler.payload_mass", "0.05");
    CHECK(cfg.design.payload_mass == 0.05);
    apply_override(cfg, "release_height", "20");
    CHECK(cfg.release_height == 20.0);
    apply_override(cfg, "gust_std", "0.5");
    CHECK(cfg.wind.gust_std == 0.5);
    CHECK(resolve_key("payload_mass") == "tumbler.payload_mass");
    CHECK(resolve_key("water.depth") == "water.depth");
    CHECK_THROWS_AS(resolve_key("nonsense"), ConfigError);

    std::map<std::string, int> tails;
    for (const auto& p : key_paths()) ++tails[p.substr(p.find('.') == std::string::npos ? 0 : p.find('.') + 1)];
    for (const auto& [tail, n] : tails) {
        if (n > 1) CHECK_THROWS_AS(resolve_key(tail), ConfigError);
    }

    const auto before = cfg;
    CHECK_THROWS_AS(apply_override(cfg, "tumbler.payload_mass", "0.4"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "water.depth", "-1"), ConfigError);
    CHECK(cfg == before);
}

TEST_CASE("aero fragment can be appended to a config") {
    const aero::AeroCoefficients c{1.25, 0.5, 0.06, 1.1, 0.0003, 0.0};
    const auto fragment = aero_fragment(c, {"fitted"});
    CHECK(fragment.rfind("# fitted", 0) == 0);
    const auto cfg = parse_config("release_height = 12.0\n" + fragment).config;
    CHECK(cfg.release_height == 12.0);
    CHECK(cfg.aero == aero::CoefficientSchedule::constant(c));
}

TEST_CASE("number formatting is shortest and keeps a decimal point") {
    CHECK(format_number(15.0) == "15.0");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-5) == "1e-05");
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        CHECK(parse_value(format_number(x)).number == x);
    }
}
