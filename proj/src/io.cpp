#include "tumblerpod/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tumblerpod/config.hpp"

namespace tumblerpod::io {

using nlohmann::ordered_json;

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    return config::format_number(v);
}

void header(std::ostream& os, const Metadata& meta, const std::vector<std::string>& columns) {
    for (const auto& [k, v] : meta) os << "# " << k << ": " << v << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
}

void row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
}

ordered_json nullable(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json metrics_json(const aero::TrajectoryMetrics& m) {
    ordered_json j;
    j["mean_descent_rate_ms"] = m.mean_descent_rate;
    j["peak_descent_rate_ms"] = m.peak_descent_rate;
    j["glide_ratio"] = m.glide_ratio;
    j["flip_count"] = m.flip_count;
    j["tumbling_onset_s"] = nullable(m.tumbling_onset_time);
    j["oscillation_period_s"] = nullable(m.oscillation_period);
    return j;
}

ordered_json horizontal(const environment::Horizontal& h) { return {{"x_m", h.x}, {"y_m", h.y}}; }

ordered_json statistic(const mission::Statistic& s) {
    return {{"mean", s.mean}, {"std", s.std}, {"count", s.count}};
}

}  // namespace

Metadata run_metadata(const mission::MissionConfig& cfg, const std::string& kind) {
    return {{"tumblerpod", kind}, {"seed", std::to_string(cfg.seed)}, {"preset", cfg.preset},
            {"payload_mass_kg", num(cfg.design.payload_mass)}, {"release_height_m", num(cfg.release_height)}};
}

void write_trajectory_csv(std::ostream& os, const aero::Trajectory& traj, const Metadata& meta) {
    header(os, meta, {"time_s", "x_m", "z_m", "vx_ms", "vz_ms", "pitch_rad", "pitch_rate_rads", "descent_rate_ms"});
    for (const auto& s : traj.samples) {
        row(os, {num(s.time), num(s.position.x), num(s.position.z), num(s.velocity.x), num(s.velocity.z),
                 num(s.pitch), num(s.pitch_rate), num(s.velocity.z)});
    }
}

void write_sensor_csv(std::ostream& os, const std::vector<pod::SensorRecord>& records, const Metadata& meta) {
    header(os, meta,
           {"time_s", "phase", "depth_m", "pressure_pa", "temperature_c", "gps_fix", "gps_x_m", "gps_y_m"});
    for (const auto& r : records) {
        row(os, {num(r.time), r.phase, num(r.depth), num(r.pressure), num(r.temperature),
                 r.gps_fix ? "true" : "false", num(r.gps_x), num(r.gps_y)});
    }
}

void write_ensemble_csv(std::ostream& os, const std::vector<mission::GridRow>& grid, const Metadata& meta) {
    header(os, meta, {"grid_z_m", "mean_x_m", "std_x_m", "mean_descent_rate_ms"});
    for (const auto& g : grid) row(os, {num(g.z), num(g.mean_x), num(g.std_x), num(g.mean_descent_rate)});
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const Metadata& meta) {
    header(os, meta, {"value", "mean_descent_rate", "glide_ratio", "tumbling"});
    for (const auto& r : rows) {
        row(os, {num(r.value), num(r.mean_descent_rate), num(r.glide_ratio), r.tumbling ? "true" : "false"});
    }
}

void write_regime_csv(std::ostream& os, const std::vector<RegimeCell>& cells, const Metadata& meta) {
    header(os, meta, {"i_star", "re", "regime"});
    for (const auto& c : cells) row(os, {num(c.i_star), num(c.re), std::string(tumbler::to_string(c.regime))});
}

std::string descent_rate_colour(double rate) {
    // Blue (slow) through green to red (fast).
    double u = std::clamp(std::isfinite(rate) ? rate / kColourScaleMax : 1.0, 0.0, 1.0);
    const double r = std::clamp(2.0 * u - 0.5, 0.0, 1.0);
    const double g = 1.0 - std::abs(2.0 * u - 1.0);
    const double b = std::clamp(1.5 - 2.0 * u, 0.0, 1.0);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(r * 255)),
                  static_cast<int>(std::lround(g * 255)), static_cast<int>(std::lround(b * 255)));
    return buf;
}

std::string trajectory_svg(const aero::Trajectory& traj, const Metadata& meta) {
    constexpr double W = 800, H = 600, margin = 60, bar = 90;
    double x0 = 0, x1 = 0, z0 = 0, z1 = 0;
    for (const auto& s : traj.samples) {
        x0 = std::min(x0, s.position.x);
        x1 = std::max(x1, s.position.x);
        z0 = std::min(z0, s.position.z);
        z1 = std::max(z1, s.position.z);
    }
    const double span = std::max({x1 - x0, z1 - z0, 1e-6});
    const double scale = std::min((W - 2 * margin - bar) / span, (H - 2 * margin) / span);
    auto px = [&](double x) { return margin + (x - x0) * scale; };
    auto pz = [&](double z) { return margin + (z - z0) * scale; };
    auto f = [](double v) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(2) << v;
        return s.str();
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << " " << H << "\">\n";
    for (const auto& [k, v] : meta) os << "<!-- " << k << ": " << v << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << margin << "\" y=\"30\" font-family=\"sans-serif\" font-size=\"14\">x-z trajectory, "
       << "colour = descent rate (m/s)</text>\n";
    os << "<line x1=\"" << f(px(x0)) << "\" y1=\"" << f(pz(0)) << "\" x2=\"" << f(px(x1)) << "\" y2=\"" << f(pz(0))
       << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
    os << "<g stroke-width=\"2.5\" stroke-linecap=\"round\">\n";
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const auto& a = traj.samples[i - 1];
        const auto& b = traj.samples[i];
        const double rate = 0.5 * (a.velocity.z + b.velocity.z);
        os << "<line class=\"seg\" x1=\"" << f(px(a.position.x)) << "\" y1=\"" << f(pz(a.position.z)) << "\" x2=\""
           << f(px(b.position.x)) << "\" y2=\"" << f(pz(b.position.z)) << "\" stroke=\"" << descent_rate_colour(rate)
           << "\"/>\n";
    }
    os << "</g>\n";
    // Colour bar, 0 at the top.
    const double bx = W - margin - 30, by = margin, bh = H - 2 * margin;
    constexpr int steps = 30;
    for (int i = 0; i < steps; ++i) {
        const double v = kColourScaleMax * (i + 0.5) / steps;
        os << "<rect x=\"" << f(bx) << "\" y=\"" << f(by + bh * i / steps) << "\" width=\"20\" height=\""
           << f(bh / steps + 0.5) << "\" fill=\"" << descent_rate_colour(v) << "\"/>\n";
    }
    for (int tick = 0; tick <= 3; ++tick) {
        os << "<text x=\"" << f(bx - 8) << "\" y=\"" << f(by + bh * tick / 3.0 + 4)
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << tick << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

ordered_json mission_log_json(const mission::MissionLog& log, const mission::MissionConfig& cfg) {
    ordered_json j;
    j["schema"] = "tumblerpod.mission_log/1";
    j["seed"] = log.seed;
    j["preset"] = cfg.preset;
    j["initial_pitch_rad"] = log.initial_pitch;

    auto& events = j["events"] = ordered_json::array();
    for (const auto& e : log.events) {
        events.push_back({{"time_s", e.time},
                          {"from", mission::to_string(e.from)},
                          {"to", mission::to_string(e.to)},
                          {"event", std::string(mission::to_string(e.event))},
                          {"cause", e.cause}});
    }

    const auto& t = log.trajectory;
    ordered_json d;
    d["terminal"] = std::string(aero::to_string(t.terminal));
    d["regime"] = std::string(tumbler::to_string(t.regime));
    d["steep_mode"] = t.steep_mode;
    d["i_star"] = t.i_star;
    d["mass_kg"] = t.mass;
    d["inertia_kgm2"] = t.inertia;
    d["metrics"] = log.descent_metrics ? metrics_json(*log.descent_metrics) : ordered_json(nullptr);
    d["columns"] = {"time_s", "x_m", "z_m", "vx_ms", "vz_ms", "pitch_rad", "pitch_rate_rads"};
    auto& samples = d["samples"] = ordered_json::array();
    for (const auto& s : t.samples) {
        samples.push_back({s.time, s.position.x, s.position.z, s.velocity.x, s.velocity.z, s.pitch, s.pitch_rate});
    }
    j["descent"] = std::move(d);

    auto& sensors = j["sensors"] = ordered_json::array();
    for (const auto& r : log.sensors) {
        sensors.push_back({{"time_s", r.time},
                           {"phase", r.phase},
                           {"depth_m", r.depth},
                           {"pressure_pa", r.pressure},
                           {"temperature_c", r.temperature},
                           {"saturated", r.saturated},
                           {"gps_fix", r.gps_fix},
                           {"gps_x_m", r.gps_x},
                           {"gps_y_m", r.gps_y}});
    }
    j["warnings"] = log.warnings;

    const auto& o = log.outcome;
    ordered_json out;
    out["final_phase"] = mission::to_string(o.final_phase);
    out["failure_reason"] = o.final_phase.kind == mission::PhaseKind::Failed ? ordered_json(o.final_phase.reason)
                                                                             : ordered_json(nullptr);
    out["release_time_s"] = o.release_time;
    out["splashdown_time_s"] = o.splashdown_time;
    out["landing_point"] = horizontal(o.landing_point);
    out["benthic_duration_s"] = o.benthic_duration;
    out["max_depth_m"] = o.max_depth;
    out["resurfaced"] = o.resurfaced;
    out["retrieval_position"] = o.retrieval_position ? horizontal(*o.retrieval_position) : ordered_json(nullptr);
    out["retrieval_mode"] = o.retrieval_mode.empty() ? ordered_json(nullptr) : ordered_json(o.retrieval_mode);
    out["end_time_s"] = o.end_time;
    j["outcome"] = std::move(out);
    j["config"] = config::emit_config(cfg);
    return j;
}

ordered_json ensemble_json(const mission::EnsembleSummary& s, const mission::MissionConfig& cfg) {
    ordered_json j;
    j["schema"] = "tumblerpod.ensemble/1";
    j["base_seed"] = s.base_seed;
    j["preset"] = cfg.preset;
    j["n_runs"] = s.runs.size();
    j["completed"] = s.completed;
    j["failed"] = s.failed;
    j["dispersion_radius_m"] = s.dispersion_radius;
    j["mean_landing"] = horizontal(s.mean_landing);
    j["statistics"] = {{"mean_descent_rate_ms", statistic(s.mean_descent_rate)},
                       {"peak_descent_rate_ms", statistic(s.peak_descent_rate)},
                       {"glide_ratio", statistic(s.glide_ratio)},
                       {"flip_count", statistic(s.flip_count)}};
    auto& runs = j["runs"] = ordered_json::array();
    for (const auto& r : s.runs) {
        runs.push_back({{"seed", r.seed},
                        {"initial_pitch_rad", r.initial_pitch},
                        {"final_phase", mission::to_string(r.final_phase)},
                        {"landed", r.landed},
                        {"landing_point", horizontal(r.landing_point)},
                        {"metrics", r.metrics ? metrics_json(*r.metrics) : ordered_json(nullptr)},
                        {"resurfaced", r.resurfaced},
                        {"warning_count", r.warning_count}});
    }
    j["config"] = config::emit_config(cfg);
    return j;
}

std::size_t CsvTable::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("csv: no column " + name);
    return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t r, const std::string& name) const {
    const auto& cell = rows.at(r).at(column(name));
    if (cell == "nan") return std::nan("");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) throw std::runtime_error("csv: not a number: " + cell);
    return v;
}

CsvTable read_csv_strict(const std::string& text, const std::vector<std::string>& expected_header) {
    if (text.find('\r') != std::string::npos) throw std::runtime_error("csv: CR line ending");
    if (text.empty() || text.back() != '\n') throw std::runtime_error("csv: missing final LF");
    CsvTable t;
    std::size_t pos = 0;
    bool in_body = false;
    int line_no = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        const std::string where = "csv line " + std::to_string(line_no) + ": ";
        if (!in_body && line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ");
            if (colon == std::string::npos) throw std::runtime_error(where + "malformed metadata");
            t.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
            continue;
        }
        if (line.empty()) throw std::runtime_error(where + "blank line");
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        for (const auto& c : cells) {
            if (c.empty()) throw std::runtime_error(where + "empty cell");
            if (c.find_first_of("\"; \t") != std::string::npos) throw std::runtime_error(where + "unexpected character");
        }
        if (!in_body) {
            t.header = cells;
            if (!expected_header.empty() && cells != expected_header) throw std::runtime_error(where + "unexpected header");
            in_body = true;
            continue;
        }
        if (cells.size() != t.header.size()) throw std::runtime_error(where + "ragged row");
        for (const auto& c : cells) {
            // Cells that start like a number must be a complete '.'-decimal number.
            if (std::isdigit(static_cast<unsigned char>(c[0])) || c[0] == '-') {
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
                if (ec != std::errc() || ptr != c.data() + c.size()) throw std::runtime_error(where + "bad number " + c);
            }
        }
        t.rows.push_back(std::move(cells));
    }
    if (!in_body) throw std::runtime_error("csv: no header");
    return t;
}

}  // namespace tumblerpod::io
