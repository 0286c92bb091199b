#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

#include "tumblerpod/buoyancy.hpp"
#include "tumblerpod/commands.hpp"
#include "tumblerpod/config.hpp"
#include "tumblerpod/io.hpp"

using namespace tumblerpod;
using namespace tumblerpod::commands;
namespace fs = std::filesystem;

namespace {

// Fresh directory per test case, removed on exit.
struct Scratch {
    fs::path root;
    Scratch() {
        static int counter = 0;
        root = fs::temp_directory_path() /
               ("tumblerpod_cmd_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~Scratch() { fs::remove_all(root); }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(root / name) << text;
        return root / name;
    }
    CommonOptions options(const std::string& config_text = "", const std::string& out = "out") const {
        CommonOptions o;
        if (!config_text.empty()) o.config = write("config.toml", config_text);
        o.out_dir = root / out;
        return o;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::set<std::string> files_in(const fs::path& dir) {
    std::set<std::string> names;
    if (!fs::exists(dir)) return names;
    for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
    return names;
}

struct Capture {
    std::ostringstream out, err;
    Streams streams() { return {out, err}; }
};

}  // namespace

TEST_CASE("simulate writes the four artifacts") {
    Scratch s;
    Capture c;
    const auto opt = s.options();
    REQUIRE(cmd_simulate(opt, c.streams()) == 0);
    CHECK(files_in(*opt.out_dir) == std::set<std::string>{"mission.json", "sensors.csv", "trajectory.csv", "trajectory.svg"});
    CHECK_NOTHROW(io::read_csv_strict(slurp(*opt.out_dir / "trajectory.csv")));
    CHECK_NOTHROW(io::read_csv_strict(slurp(*opt.out_dir / "sensors.csv")));
    const auto j = nlohmann::json::parse(slurp(*opt.out_dir / "mission.json"));
    CHECK(j["outcome"]["final_phase"] == "Retrieved");
}

TEST_CASE("a failed mission is still a successful simulation") {
    Scratch s;
    Capture c;
    const auto opt = s.options("[water]\ndepth = 8.0\n");
    REQUIRE(cmd_simulate(opt, c.streams()) == 0);
    CHECK(files_in(*opt.out_dir).size() == 4);
    const auto j = nlohmann::json::parse(slurp(*opt.out_dir / "mission.json"));
    CHECK(j["outcome"]["final_phase"] == "Failed(recovery_unreachable)");
}

TEST_CASE("bad configs exit nonzero and write nothing") {
    Scratch s;
    for (const std::string text : {"[tumbler\n", "[tumbler]\npayload_mass = -0.01\n", "bogus = 1\n"}) {
        Capture c;
        const auto opt = s.options(text);
        CHECK(cmd_simulate(opt, c.streams()) == kConfigFailure);
        CHECK(files_in(*opt.out_dir).empty());
        CHECK_FALSE(c.err.str().empty());
    }
    Capture c;
    auto opt = s.options();
    opt.config = s.root / "missing.toml";
    CHECK(cmd_simulate(opt, c.streams()) == kConfigFailure);

    opt = s.options("[tumbler]\npayload_mass = -0.01\n");
    Capture e;
    cmd_simulate(opt, e.streams());
    CHECK(e.err.str().find("payload_mass") != std::string::npos);
}

TEST_CASE("lax mode turns unknown keys into warnings") {
    Scratch s;
    Capture c;
    auto opt = s.options("bogus = 1\n");
    opt.lax = true;
    CHECK(cmd_simulate(opt, c.streams()) == 0);
    CHECK(c.err.str().find("bogus") != std::string::npos);
}

TEST_CASE("unwritable output is an IO failure") {
    Scratch s;
    const auto blocker = s.write("blocker", "x");
    Capture c;
    auto opt = s.options();
    opt.out_dir = blocker / "sub";
    CHECK(cmd_simulate(opt, c.streams()) == kIoFailure);
}

TEST_CASE("output directory comes from the environment when --out is absent") {
    Scratch s;
    CommonOptions opt;
    ::setenv(kOutDirEnv, (s.root / "env").c_str(), 1);
    CHECK(resolve_out_dir(opt) == s.root / "env");
    opt.out_dir = s.root / "flag";
    CHECK(resolve_out_dir(opt) == s.root / "flag");
    ::unsetenv(kOutDirEnv);
    opt.out_dir.reset();
    CHECK(resolve_out_dir(opt) == fs::current_path());
}

TEST_CASE("seed flag overrides the config and lands in the metadata") {
    Scratch s;
    Capture c;
    auto opt = s.options("seed = 5\n");
    opt.seed = 1234;
    REQUIRE(cmd_simulate(opt, c.streams()) == 0);
    const auto t = io::read_csv_strict(slurp(*opt.out_dir / "trajectory.csv"));
    bool found = false;
    for (const auto& [k, v] : t.metadata) found = found || (k == "seed" && v == "1234");
    CHECK(found);
}

TEST_CASE("payload sweep on dodecagon2") {
    Scratch s;
    Capture c;
    const auto opt = s.options("preset = \"dodecagon2\"\n");
    REQUIRE(cmd_sweep(opt, "payload_mass", {"0.03", "0.06", "0.09", "0.12", "0.15"}, c.streams()) == 0);
    const auto t = io::read_csv_strict(slurp(*opt.out_dir / "sweep.csv"),
                                       {"value", "mean_descent_rate", "glide_ratio", "tumbling"});
    REQUIRE(t.rows.size() == 5);
    for (std::size_t i = 0; i < 4; ++i) CHECK(t.rows[i][3] == "true");
    CHECK(t.rows[4][3] == "false");
    CHECK(t.number(0, "value") == 0.03);
    for (std::size_t i = 1; i < 4; ++i) CHECK(t.number(i, "glide_ratio") <= t.number(i - 1, "glide_ratio"));
}

TEST_CASE("release height sweep keeps the glide ratio") {
    Scratch s;
    Capture c;
    const auto opt = s.options();
    REQUIRE(cmd_sweep(opt, "release_height", {"10", "15", "20"}, c.streams()) == 0);
    const auto t = io::read_csv_strict(slurp(*opt.out_dir / "sweep.csv"));
    REQUIRE(t.rows.size() == 3);
    const double mid = t.number(1, "glide_ratio");
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(t.number(i, "glide_ratio") / mid - 1.0) <= 0.15);
}

TEST_CASE("sweep argument errors") {
    Scratch s;
    Capture c;
    const auto opt = s.options();
    CHECK(cmd_sweep(opt, "payload_mass", {}, c.streams()) == kConfigFailure);
    CHECK(cmd_sweep(opt, "no_such_key", {"1"}, c.streams()) == kConfigFailure);
    CHECK(cmd_sweep(opt, "payload_mass", {"-1"}, c.streams()) == kConfigFailure);
    CHECK(files_in(*opt.out_dir).empty());
}

TEST_CASE("regime map grids") {
    Scratch s;
    {
        Capture c;
        const auto opt = s.options("", "full");
        REQUIRE(cmd_regime_map(opt, {}, c.streams()) == 0);
        const auto t = io::read_csv_strict(slurp(*opt.out_dir / "regime_map.csv"), {"i_star", "re", "regime"});
        CHECK(t.rows.size() == 30 * 9);
        std::set<std::string> labels;
        for (const auto& r : t.rows) labels.insert(r[2]);
        CHECK(labels == std::set<std::string>{"Chaotic", "Fluttering", "SteadyFalling", "Tumbling"});
    }
    {
        Capture c;
        const auto opt = s.options("", "single");
        REQUIRE(cmd_regime_map(opt, {0.1, 0.1, 1, 1e4, 1e4, 1}, c.streams()) == 0);
        const auto t = io::read_csv_strict(slurp(*opt.out_dir / "regime_map.csv"));
        REQUIRE(t.rows.size() == 1);
        CHECK(t.rows[0][2] == "Tumbling");
    }
    {
        Capture c;
        const auto opt = s.options("", "low_re");
        REQUIRE(cmd_regime_map(opt, {0.01, 0.3, 30, 10.0, 10.0, 1}, c.streams()) == 0);
        const auto t = io::read_csv_strict(slurp(*opt.out_dir / "regime_map.csv"));
        for (const auto& r : t.rows) CHECK(r[2] == "SteadyFalling");
    }
    Capture c;
    CHECK(cmd_regime_map(s.options("", "bad"), {0.3, 0.01, 5, 10, 100, 2}, c.streams()) == kConfigFailure);
}

TEST_CASE("buoyancy report for the reference design") {
    Scratch s;
    Capture c;
    const auto opt = s.options();
    REQUIRE(cmd_buoyancy(opt, std::nullopt, c.streams()) == 0);
    const auto report = slurp(*opt.out_dir / "buoyancy.txt");
    CHECK(report.find("status: floats") != std::string::npos);
    const auto at = report.find("max operational depth: ");
    REQUIRE(at != std::string::npos);
    const double depth = std::stod(report.substr(at + 23));
    CHECK(depth >= 4.0);
    CHECK(depth <= 5.5);
    const auto t = io::read_csv_strict(slurp(*opt.out_dir / "buoyancy.csv"));
    CHECK(t.rows.front()[t.column("floats")] == "true");
    CHECK(t.rows.back()[t.column("floats")] == "false");
}

TEST_CASE("buoyancy design targets") {
    Scratch s;
    {
        Capture c;
        const auto opt = s.options("", "three");
        REQUIRE(cmd_buoyancy(opt, 3.0, c.streams()) == 0);
        const auto report = slurp(*opt.out_dir / "buoyancy.txt");
        CHECK(report.find("status: feasible") != std::string::npos);
        auto value = [&](const std::string& key) {
            const auto p = report.find(key + ": ");
            REQUIRE(p != std::string::npos);
            return std::stod(report.substr(p + key.size() + 2));
        };
        const auto ref = buoyancy::reference_charge();
        CHECK(value("citric_acid_mass_kg") <= ref.citric_acid_mass);
        CHECK(value("bicarbonate_mass_kg") <= ref.bicarbonate_mass);
    }
    {
        Capture c;
        const auto opt = s.options("", "deep");
        REQUIRE(cmd_buoyancy(opt, 1000.0, c.streams()) == 0);
        CHECK(slurp(*opt.out_dir / "buoyancy.txt").find("status: infeasible") != std::string::npos);
    }
    Capture c;
    CHECK(cmd_buoyancy(s.options("", "neg"), -1.0, c.streams()) == kConfigFailure);
}

TEST_CASE("calibrate writes an includable fragment") {
    Scratch s;
    Capture c;
    const auto opt = s.options();
    CalibrateOverrides o;
    o.budget = 60;
    REQUIRE(cmd_calibrate(opt, o, c.streams()) == 0);
    const auto fragment = slurp(*opt.out_dir / "aero_fit.toml");
    CHECK(fragment.find("residual") != std::string::npos);
    const auto cfg = config::parse_config("preset = \"dodecagon3\"\n" + fragment).config;
    REQUIRE(cfg.aero.anchors.size() == 1);
    CHECK(cfg.aero.anchors[0].payload_mass == 0.0);
}

TEST_CASE("batch is reproducible and independent of jobs") {
    Scratch s;
    const std::string text = "[wind]\nkind = \"Gusty\"\nmean_x = 4.5\ngust_std = 1.0\ngust_cap = 3.0\n";
    std::string first;
    for (int jobs : {1, 3}) {
        Capture c;
        auto opt = s.options(text, "jobs" + std::to_string(jobs));
        opt.jobs = jobs;
        REQUIRE(cmd_batch(opt, 4, c.streams()) == 0);
        const auto csv = slurp(*opt.out_dir / "ensemble.csv");
        const auto json = slurp(*opt.out_dir / "batch.json");
        CHECK_NOTHROW(io::read_csv_strict(csv, {"grid_z_m", "mean_x_m", "std_x_m", "mean_descent_rate_ms"}));
        if (first.empty()) {
            first = csv + json;
        } else {
            CHECK(csv + json == first);
        }
    }
    Capture c;
    CHECK(cmd_batch(s.options("", "zero"), 0, c.streams()) == kConfigFailure);
}
