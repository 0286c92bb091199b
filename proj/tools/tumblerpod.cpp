#include <iostream>

#include <CLI11.hpp>

#include "tumblerpod/commands.hpp"

using namespace tumblerpod::commands;

namespace {

void common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config, "Config file (default lake scenario when omitted)");
    cmd->add_option("--out", opt.out_dir, std::string("Output directory (else $") + kOutDirEnv + ", else cwd)");
    cmd->add_option("--seed", opt.seed, "Seed override");
    cmd->add_option("--jobs", opt.jobs, "Worker threads for batch runs")->check(CLI::PositiveNumber);
    cmd->add_flag("--lax", opt.lax, "Downgrade unknown config keys to warnings");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TumblerPod mission simulator"};
    app.require_subcommand(1);
    CommonOptions opt;
    Streams io{std::cout, std::cerr};

    auto* simulate = app.add_subcommand("simulate", "Run one mission and write trajectory, sensor, JSON and SVG files");
    common_flags(simulate, opt);

    int runs = 20;
    auto* batch = app.add_subcommand("batch", "Monte Carlo ensemble of missions");
    common_flags(batch, opt);
    batch->add_option("--runs,-n", runs, "Number of runs")->check(CLI::PositiveNumber);

    std::string parameter;
    std::vector<std::string> values;
    auto* sweep = app.add_subcommand("sweep", "Descent metrics over one config key");
    common_flags(sweep, opt);
    sweep->add_option("--param", parameter, "Key path, e.g. tumbler.payload_mass")->required();
    sweep->add_option("--values", values, "Values to try")->delimiter(',');

    RegimeGrid grid;
    auto* regime = app.add_subcommand("regime-map", "Regime labels over an (I*, Re) grid");
    common_flags(regime, opt);
    regime->add_option("--istar-min", grid.i_star_min, "Lowest I* (linear spacing)");
    regime->add_option("--istar-max", grid.i_star_max, "Highest I*");
    regime->add_option("--istar-n", grid.i_star_count, "Number of I* values");
    regime->add_option("--re-min", grid.re_min, "Lowest Reynolds number (log spacing)");
    regime->add_option("--re-max", grid.re_max, "Highest Reynolds number");
    regime->add_option("--re-n", grid.re_count, "Number of Reynolds numbers");

    std::optional<double> target_depth;
    auto* buoy = app.add_subcommand("buoyancy", "Inflation equilibrium versus depth, or charge design");
    common_flags(buoy, opt);
    buoy->add_option("--target-depth", target_depth, "Design the charge for this depth (m)");

    CalibrateOverrides targets;
    auto* calibrate = app.add_subcommand("calibrate", "Fit aerodynamic coefficients to descent targets");
    common_flags(calibrate, opt);
    calibrate->add_option("--descent-rate", targets.mean_descent_rate, "Target mean descent rate (m/s)");
    calibrate->add_option("--glide-ratio", targets.glide_ratio, "Target glide ratio");
    calibrate->add_option("--period", targets.oscillation_period, "Target oscillation period (s)");
    calibrate->add_option("--peak-limit", targets.peak_limit, "Upper limit on peak descent rate (m/s)");
    calibrate->add_option("--budget", targets.budget, "Maximum descent simulations");
    calibrate->add_flag("--fresh", targets.fresh, "Start from the built-in initial guess");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigFailure;
    }

    if (*simulate) return cmd_simulate(opt, io);
    if (*batch) return cmd_batch(opt, runs, io);
    if (*sweep) return cmd_sweep(opt, parameter, values, io);
    if (*regime) return cmd_regime_map(opt, grid, io);
    if (*buoy) return cmd_buoyancy(opt, target_depth, io);
    if (*calibrate) return cmd_calibrate(opt, targets, io);
    return kConfigFailure;
}
