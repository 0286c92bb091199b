#include "tumblerpod/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "tumblerpod/buoyancy.hpp"
#include "tumblerpod/calibration.hpp"
#include "tumblerpod/config.hpp"
#include "tumblerpod/io.hpp"

namespace tumblerpod::commands {

namespace fs = std::filesystem;
using config::format_number;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<mission::MissionConfig> load(const CommonOptions& opt, Streams io) {
    try {
        config::ParsedConfig parsed;
        if (opt.config) {
            parsed = config::load_config(*opt.config, {opt.lax});
        } else {
            parsed.config = mission::default_config();
        }
        for (const auto& w : parsed.warnings) io.err << "warning: " << w << "\n";
        if (opt.seed) parsed.config.seed = *opt.seed;
        return parsed.config;
    } catch (const config::ConfigError& e) {
        io.err << "config error: " << e.what() << "\n";
    }
    return std::nullopt;
}

// Artifacts are assembled in memory and written only once everything succeeded.
using Files = std::map<std::string, std::string>;

int emit(const CommonOptions& opt, const Files& files, Streams io) {
    const fs::path dir = resolve_out_dir(opt);
    try {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
        for (const auto& [name, content] : files) {
            const fs::path p = dir / name;
            std::ofstream f(p, std::ios::binary | std::ios::trunc);
            if (!f) throw IoError("cannot write " + p.string());
            f << content;
            f.close();
            if (!f) throw IoError("failed writing " + p.string());
            io.out << "wrote " << p.string() << "\n";
        }
    } catch (const IoError& e) {
        io.err << "io error: " << e.what() << "\n";
        return kIoFailure;
    }
    return 0;
}

// Runs `body`, mapping domain/model errors raised by command arguments to a
// config failure.
template <class F>
int guarded(Streams io, F&& body) {
    try {
        return body();
    } catch (const config::ConfigError& e) {
        io.err << "config error: " << e.what() << "\n";
    } catch (const DomainError& e) {
        io.err << "invalid input: " << e.what() << "\n";
    } catch (const ModelError& e) {
        io.err << "model error: " << e.what() << "\n";
    }
    return kConfigFailure;
}

template <class W>
std::string to_text(W&& writer) {
    std::ostringstream os;
    writer(os);
    return os.str();
}

double kelvin(double celsius) { return celsius + buoyancy::kZeroCelsius; }

std::string charge_text(const buoyancy::ReactantCharge& c) {
    std::ostringstream os;
    os << std::fixed;
    os.precision(2);
    os << c.citric_acid_mass * 1e6 << " mg citric acid + " << c.bicarbonate_mass * 1e6 << " mg sodium bicarbonate";
    return os.str();
}

}  // namespace

fs::path resolve_out_dir(const CommonOptions& opt) {
    if (opt.out_dir) return *opt.out_dir;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return fs::current_path();
}

int cmd_simulate(const CommonOptions& opt, Streams io) {
    auto cfg = load(opt, io);
    if (!cfg) return kConfigFailure;
    return guarded(io, [&] {
        const auto log = mission::run_mission(*cfg);
        mission::validate_transitions(log);
        const auto meta = io::run_metadata(*cfg, "simulate");
        Files files;
        files["trajectory.csv"] = to_text([&](std::ostream& os) { io::write_trajectory_csv(os, log.trajectory, meta); });
        files["sensors.csv"] = to_text([&](std::ostream& os) { io::write_sensor_csv(os, log.sensors, meta); });
        files["mission.json"] = io::mission_log_json(log, *cfg).dump(2) + "\n";
        files["trajectory.svg"] = io::trajectory_svg(log.trajectory, meta);
        for (const auto& w : log.warnings) io.err << "warning: " << w << "\n";
        io.out << "outcome: " << mission::to_string(log.outcome.final_phase) << "\n";
        if (log.descent_metrics) {
            io.out << "descent: mean " << format_number(log.descent_metrics->mean_descent_rate) << " m/s, glide "
                   << format_number(log.descent_metrics->glide_ratio) << "\n";
        }
        return emit(opt, files, io);
    });
}

int cmd_batch(const CommonOptions& opt, int runs, Streams io) {
    auto cfg = load(opt, io);
    if (!cfg) return kConfigFailure;
    return guarded(io, [&] {
        const auto summary = mission::run_batch(*cfg, runs, cfg->seed, opt.jobs);
        auto meta = io::run_metadata(*cfg, "batch");
        meta.emplace_back("n_runs", std::to_string(runs));
        Files files;
        files["ensemble.csv"] = to_text([&](std::ostream& os) { io::write_ensemble_csv(os, summary.grid, meta); });
        files["batch.json"] = io::ensemble_json(summary, *cfg).dump(2) + "\n";
        io.out << "runs: " << runs << ", completed " << summary.completed << ", failed " << summary.failed << "\n";
        io.out << "dispersion radius: " << format_number(summary.dispersion_radius) << " m\n";
        return emit(opt, files, io);
    });
}

int cmd_sweep(const CommonOptions& opt, const std::string& parameter, const std::vector<std::string>& values,
              Streams io) {
    auto cfg = load(opt, io);
    if (!cfg) return kConfigFailure;
    return guarded(io, [&] {
        if (values.empty()) throw config::ConfigError("sweep needs at least one value");
        const std::string key = config::resolve_key(parameter);
        std::vector<io::SweepRow> rows;
        for (const auto& token : values) {
            const auto v = config::parse_value(token);
            if (v.kind != config::Value::Kind::Number) throw config::ConfigError("sweep values must be numbers", key);
            auto run = *cfg;
            config::apply_override(run, key, token);
            const auto traj = mission::simulate_aerial(run);
            io::SweepRow r;
            r.value = v.number;
            if (traj.terminal == aero::TerminalEvent::HitWater) {
                const auto m = aero::trajectory_metrics(traj);
                r.mean_descent_rate = m.mean_descent_rate;
                r.glide_ratio = m.glide_ratio;
                r.tumbling = !traj.steep_mode && m.flip_count >= 1;
            } else {
                r.mean_descent_rate = r.glide_ratio = std::nan("");
            }
            io.out << key << " = " << format_number(r.value) << ": mean " << format_number(r.mean_descent_rate)
                   << " m/s, glide " << format_number(r.glide_ratio) << ", tumbling " << (r.tumbling ? "yes" : "no")
                   << "\n";
            rows.push_back(r);
        }
        auto meta = io::run_metadata(*cfg, "sweep");
        meta.emplace_back("parameter", key);
        Files files;
        files["sweep.csv"] = to_text([&](std::ostream& os) { io::write_sweep_csv(os, rows, meta); });
        return emit(opt, files, io);
    });
}

int cmd_regime_map(const CommonOptions& opt, const RegimeGrid& g, Streams io) {
    auto cfg = load(opt, io);
    if (!cfg) return kConfigFailure;
    return guarded(io, [&] {
        if (g.i_star_count < 1 || g.re_count < 1) throw config::ConfigError("grid counts must be >= 1");
        if (!(g.i_star_min > 0 && g.i_star_max >= g.i_star_min)) throw config::ConfigError("need 0 < i_star_min <= i_star_max");
        if (!(g.re_min > 0 && g.re_max >= g.re_min)) throw config::ConfigError("need 0 < re_min <= re_max");
        std::vector<io::RegimeCell> cells;
        for (int i = 0; i < g.i_star_count; ++i) {
            const double u = g.i_star_count == 1 ? 0.0 : static_cast<double>(i) / (g.i_star_count - 1);
            const double i_star = g.i_star_min + u * (g.i_star_max - g.i_star_min);
            for (int k = 0; k < g.re_count; ++k) {
                const double w = g.re_count == 1 ? 0.0 : static_cast<double>(k) / (g.re_count - 1);
                const double re = g.re_min * std::pow(g.re_max / g.re_min, w);
                cells.push_back({i_star, re, tumbler::classify_regime(i_star, re, cfg->descent.regime)});
            }
        }
        std::map<std::string, int> counts;
        for (const auto& c : cells) ++counts[std::string(tumbler::to_string(c.regime))];
        for (const auto& [name, n] : counts) io.out << name << ": " << n << " cells\n";
        auto meta = io::run_metadata(*cfg, "regime-map");
        Files files;
        files["regime_map.csv"] = to_text([&](std::ostream& os) { io::write_regime_csv(os, cells, meta); });
        return emit(opt, files, io);
    });
}

int cmd_buoyancy(const CommonOptions& opt, std::optional<double> target_depth, Streams io) {
    auto cfg = load(opt, io);
    if (!cfg) return kConfigFailure;
    return guarded(io, [&] {
        const auto& pod = cfg->pod;
        const auto& fluid = cfg->fluid;
        const double T = kelvin(cfg->thermocline.surface_temp);
        const double required = buoyancy::required_float_fraction(pod, fluid);

        std::ostringstream report;
        report << "# tumblerpod: buoyancy\n# seed: " << cfg->seed << "\n";
        report << "gas temperature: " << format_number(T) << " K\n";
        report << "required float fraction: " << format_number(required) << "\n";
        auto charge = cfg->charge;
        bool feasible = true;
        if (target_depth) {
            if (!(*target_depth >= 0.0)) throw config::ConfigError("--target-depth must be >= 0");
            const auto design = buoyancy::required_charge(*target_depth, pod, fluid, T, cfg->compliance);
            feasible = design.feasible;
            charge = design.charge;
            report << "target depth: " << format_number(*target_depth) << " m\n";
            report << "status: " << (feasible ? "feasible" : "infeasible") << "\n";
            report << "charge: " << charge_text(charge) << "\n";
            report << "citric_acid_mass_kg: " << format_number(charge.citric_acid_mass) << "\n";
            report << "bicarbonate_mass_kg: " << format_number(charge.bicarbonate_mass) << "\n";
            report << "achieved depth: " << format_number(design.achieved_depth) << " m\n";
            if (!design.report.empty()) report << design.report << "\n";
        } else {
            report << "charge: " << charge_text(charge) << "\n";
        }
        const auto depth = buoyancy::max_operational_depth(charge, pod, fluid, T, cfg->compliance);
        if (!target_depth) report << "status: " << (depth ? "floats" : "cannot_float") << "\n";
        report << "max operational depth: " << (depth ? format_number(*depth) + " m" : std::string("none")) << "\n";

        // Table from the surface to past the envelope.
        const double range = std::max({depth.value_or(0.0) * 1.5, cfg->water_depth, 1.0});
        constexpr int n = 41;
        std::ostringstream csv;
        csv << "# tumblerpod: buoyancy\n# seed: " << cfg->seed << "\n# gas_temperature_k: " << format_number(T) << "\n";
        csv << "depth_m,ambient_pressure_pa,internal_pressure_pa,differential_pressure_pa,delta_v_fraction,"
               "required_fraction,float_margin,floats\n";
        for (int i = 0; i < n; ++i) {
            const double z = range * i / (n - 1);
            const double ambient = environment::water_pressure(z, fluid);
            const auto s = buoyancy::equilibrium_inflation(charge, pod, ambient, T, cfg->compliance);
            const double margin = s.delta_v_fraction - required;
            csv << format_number(z) << "," << format_number(ambient) << "," << format_number(s.internal_pressure) << ","
                << format_number(s.differential_pressure) << "," << format_number(s.delta_v_fraction) << ","
                << format_number(required) << "," << format_number(margin) << ","
                << (margin >= 0.0 && s.differential_pressure >= 0.0 ? "true" : "false") << "\n";
        }
        io.out << report.str();
        Files files;
        files["buoyancy.txt"] = report.str();
        files["buoyancy.csv"] = csv.str();
        return emit(opt, files, io);
    });
}

int cmd_calibrate(const CommonOptions& opt, const CalibrateOverrides& o, Streams io) {
    auto cfg = load(opt, io);
    if (!cfg) return kConfigFailure;
    return guarded(io, [&] {
        auto settings = cfg->calibration;
        if (o.mean_descent_rate) settings.mean_descent_rate = *o.mean_descent_rate;
        if (o.glide_ratio) settings.glide_ratio = *o.glide_ratio;
        if (o.oscillation_period) settings.oscillation_period = *o.oscillation_period;
        if (o.peak_limit) settings.peak_limit = *o.peak_limit;
        if (o.budget) settings.budget = *o.budget;
        if (!(settings.mean_descent_rate > 0 && settings.glide_ratio > 0)) {
            throw config::ConfigError("calibration targets must be > 0");
        }
        if (settings.budget < 1) throw config::ConfigError("calibration budget must be >= 1");

        aero::CalibrationSetup setup;
        setup.design = cfg->design;
        setup.environment = {cfg->fluid, cfg->wind};
        setup.descent = cfg->descent;
        setup.release_height = cfg->release_height;
        setup.seed = cfg->seed;
        setup.budget = static_cast<std::size_t>(settings.budget);
        const auto current = cfg->aero.at(cfg->design.payload_mass);
        const double lateral = current.c_lateral_drift;
        if (!o.fresh) setup.initial = current;
        setup.initial.c_lateral_drift = lateral;
        setup.bounds.lower.c_lateral_drift = setup.bounds.upper.c_lateral_drift = lateral;

        aero::CalibrationTargets targets;
        targets.mean_descent_rate = settings.mean_descent_rate;
        targets.glide_ratio = settings.glide_ratio;
        if (settings.oscillation_period > 0) targets.oscillation_period = settings.oscillation_period;
        if (settings.peak_limit > 0) targets.peak_limit = settings.peak_limit;

        const auto r = aero::calibrate_coefficients(setup, targets);
        std::vector<std::string> comments{
            "fitted for preset " + cfg->preset + " at payload_mass " + format_number(cfg->design.payload_mass) + " kg",
            "targets: mean_descent_rate " + format_number(targets.mean_descent_rate) + " m/s, glide_ratio " +
                format_number(targets.glide_ratio),
            "residual: " + format_number(r.residual),
            "descent_error: " + format_number(r.descent_error) + ", glide_error: " + format_number(r.glide_error),
            "evaluations: " + std::to_string(r.evaluations) + ", seed: " + std::to_string(cfg->seed),
            std::string("success: ") + (r.success ? "true" : "false")};
        io.out << r.report << "\n";
        Files files;
        files["aero_fit.toml"] = config::aero_fragment(r.coeffs, comments);
        return emit(opt, files, io);
    });
}

}  // namespace tumblerpod::commands
