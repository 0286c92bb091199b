#include "tumblerpod/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace tumblerpod::config {

using mission::MissionConfig;

ConfigError::ConfigError(const std::string& message, std::string key, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      key_(std::move(key)),
      line_(line) {}

std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

// Strips a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_string && c == '\\') {
            ++i;
        } else if (c == '"') {
            in_string = !in_string;
        } else if (c == '#' && !in_string) {
            return line.substr(0, i);
        }
    }
    return line;
}

}  // namespace

Value parse_value(std::string_view token) {
    token = trim(token);
    Value v;
    if (token.empty()) throw ConfigError("missing value");
    if (token.front() == '"') {
        if (token.size() < 2 || token.back() != '"') throw ConfigError("unterminated string");
        v.kind = Value::Kind::String;
        for (std::size_t i = 1; i + 1 < token.size(); ++i) {
            char c = token[i];
            if (c == '\\') {
                if (i + 2 >= token.size()) throw ConfigError("dangling escape in string");
                c = token[++i];
            } else if (c == '"') {
                throw ConfigError("unexpected quote inside string");
            }
            v.text += c;
        }
        return v;
    }
    if (token == "true" || token == "false") {
        v.kind = Value::Kind::Bool;
        v.boolean = token == "true";
        return v;
    }
    if (token.front() == '[') {
        if (token.back() != ']') throw ConfigError("unterminated array");
        v.kind = Value::Kind::Array;
        std::string_view body = trim(token.substr(1, token.size() - 2));
        while (!body.empty()) {
            const auto comma = body.find(',');
            const auto item = trim(body.substr(0, comma));
            double x = 0.0;
            if (!parse_double(item, x)) throw ConfigError("array items must be numbers, got '" + std::string(item) + "'");
            v.array.push_back(x);
            if (comma == std::string_view::npos) break;
            body = trim(body.substr(comma + 1));
            if (body.empty()) break;  // trailing comma
        }
        return v;
    }
    v.kind = Value::Kind::Number;
    v.text = std::string(token);
    if (!parse_double(token, v.number)) throw ConfigError("cannot parse value '" + std::string(token) + "'");
    return v;
}

namespace {

enum class Bound { Any, NonNegative, Positive };

struct Field {
    std::string path;
    std::function<void(MissionConfig&, const Value&)> set;
    std::function<std::optional<std::string>(const MissionConfig&)> emit;  // empty for aliases
};

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ConfigError(path + " " + what, path);
}

double number_of(const std::string& path, const Value& v) {
    if (v.kind != Value::Kind::Number) bad(path, "must be a number");
    return v.number;
}

std::string string_of(const std::string& path, const Value& v) {
    if (v.kind != Value::Kind::String) bad(path, "must be a quoted string");
    return v.text;
}

void check(const std::string& path, double x, Bound b) {
    if (b == Bound::NonNegative && !(x >= 0.0)) bad(path, "must be >= 0 (got " + format_number(x) + ")");
    if (b == Bound::Positive && !(x > 0.0)) bad(path, "must be > 0 (got " + format_number(x) + ")");
}

using DoubleRef = std::function<double&(MissionConfig&)>;

Field number_field(std::string path, DoubleRef ref, Bound b = Bound::Any) {
    Field f;
    f.path = path;
    f.set = [path, ref, b](MissionConfig& c, const Value& v) {
        const double x = number_of(path, v);
        check(path, x, b);
        ref(c) = x;
    };
    f.emit = [ref](const MissionConfig& c) {
        return std::optional<std::string>(format_number(ref(const_cast<MissionConfig&>(c))));
    };
    return f;
}

// Input-only alias in other units.
Field alias_field(std::string path, DoubleRef ref, double to_si, Bound b = Bound::Any) {
    Field f;
    f.path = path;
    f.set = [path, ref, to_si, b](MissionConfig& c, const Value& v) {
        const double x = number_of(path, v);
        check(path, x, b);
        ref(c) = x * to_si;
    };
    return f;
}

Field bool_field(std::string path, std::function<bool&(MissionConfig&)> ref) {
    Field f;
    f.path = path;
    f.set = [path, ref](MissionConfig& c, const Value& v) {
        if (v.kind != Value::Kind::Bool) bad(path, "must be true or false");
        ref(c) = v.boolean;
    };
    f.emit = [ref](const MissionConfig& c) {
        return std::optional<std::string>(ref(const_cast<MissionConfig&>(c)) ? "true" : "false");
    };
    return f;
}

Field integer_field(std::string path, std::function<int&(MissionConfig&)> ref, int min) {
    Field f;
    f.path = path;
    f.set = [path, ref, min](MissionConfig& c, const Value& v) {
        const double x = number_of(path, v);
        if (x != std::floor(x) || x < min || x > 1e9) bad(path, "must be an integer >= " + std::to_string(min));
        ref(c) = static_cast<int>(x);
    };
    f.emit = [ref](const MissionConfig& c) {
        return std::optional<std::string>(std::to_string(ref(const_cast<MissionConfig&>(c))));
    };
    return f;
}

constexpr double kDeg = std::numbers::pi / 180.0;

std::vector<Field> build_fields() {
    using environment::kKnot;
    std::vector<Field> f;
    auto add = [&](Field x) { f.push_back(std::move(x)); };

    {
        Field p;
        p.path = "preset";
        p.set = [](MissionConfig& c, const Value& v) {
            const auto name = string_of("preset", v);
            if (!tumbler::preset(name)) {
                std::string known;
                for (const auto& n : tumbler::preset_names()) known += (known.empty() ? "" : ", ") + n;
                bad("preset", "unknown design '" + name + "' (known: " + known + ")");
            }
            mission::apply_preset(c, name);
        };
        p.emit = [](const MissionConfig& c) { return std::optional<std::string>(quote(c.preset)); };
        add(p);
    }
    {
        Field s;
        s.path = "seed";
        s.set = [](MissionConfig& c, const Value& v) {
            if (v.kind != Value::Kind::Number) bad("seed", "must be a non-negative integer");
            std::uint64_t out = 0;
            auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
            if (ec != std::errc() || ptr != v.text.data() + v.text.size()) bad("seed", "must be a non-negative integer");
            c.seed = out;
        };
        s.emit = [](const MissionConfig& c) { return std::optional<std::string>(std::to_string(c.seed)); };
        add(s);
    }
    add(number_field("release_height", [](MissionConfig& c) -> double& { return c.release_height; }, Bound::Positive));

    // tumbler
    {
        Field s;
        s.path = "tumbler.shape";
        s.set = [](MissionConfig& c, const Value& v) {
            const auto name = string_of("tumbler.shape", v);
            auto shape = tumbler::shape_from_string(name);
            if (!shape) bad("tumbler.shape", "must be circle, square or dodecagon");
            c.design.shape = *shape;
        };
        s.emit = [](const MissionConfig& c) {
            return std::optional<std::string>(quote(std::string(tumbler::to_string(c.design.shape))));
        };
        add(s);
    }
    add(number_field("tumbler.characteristic_radius", [](MissionConfig& c) -> double& { return c.design.characteristic_radius; }, Bound::Positive));
    add(number_field("tumbler.sheet_areal_density", [](MissionConfig& c) -> double& { return c.design.sheet_areal_density; }, Bound::NonNegative));
    add(integer_field("tumbler.layer_count", [](MissionConfig& c) -> int& { return c.design.layer_count; }, 1));
    add(number_field("tumbler.stiffener_mass", [](MissionConfig& c) -> double& { return c.design.stiffener_mass; }, Bound::NonNegative));
    {
        Field s;
        s.path = "tumbler.structure_mass";
        s.set = [](MissionConfig& c, const Value& v) {
            if (v.kind == Value::Kind::String && v.text == "auto") {
                c.design.structure_mass.reset();
                return;
            }
            if (v.kind != Value::Kind::Number) bad("tumbler.structure_mass", "must be a number or \"auto\"");
            check("tumbler.structure_mass", v.number, Bound::NonNegative);
            c.design.structure_mass = v.number;
        };
        s.emit = [](const MissionConfig& c) {
            return std::optional<std::string>(c.design.structure_mass ? format_number(*c.design.structure_mass)
                                                                      : std::string("\"auto\""));
        };
        add(s);
    }
    add(number_field("tumbler.payload_mass", [](MissionConfig& c) -> double& { return c.design.payload_mass; }, Bound::NonNegative));
    add(number_field("tumbler.initial_pitch", [](MissionConfig& c) -> double& { return c.design.initial_pitch; }));
    add(alias_field("tumbler.initial_pitch_deg", [](MissionConfig& c) -> double& { return c.design.initial_pitch; }, kDeg));
    {
        Field s;
        s.path = "tumbler.label";
        s.set = [](MissionConfig& c, const Value& v) { c.design.label = string_of("tumbler.label", v); };
        s.emit = [](const MissionConfig& c) { return std::optional<std::string>(quote(c.design.label)); };
        add(s);
    }

    // descent
    add(number_field("descent.dt", [](MissionConfig& c) -> double& { return c.descent.dt; }, Bound::Positive));
    add(number_field("descent.output_interval", [](MissionConfig& c) -> double& { return c.descent.output_interval; }, Bound::Positive));
    add(number_field("descent.timeout", [](MissionConfig& c) -> double& { return c.descent.timeout; }, Bound::Positive));
    add(number_field("descent.payload_offset_fraction", [](MissionConfig& c) -> double& { return c.descent.payload_offset_fraction; }));
    add(number_field("descent.payload_cap", [](MissionConfig& c) -> double& { return c.descent.payload_cap; }, Bound::NonNegative));
    add(number_field("descent.divergence_speed", [](MissionConfig& c) -> double& { return c.descent.divergence_speed; }, Bound::Positive));
    add(number_field("descent.min_reynolds", [](MissionConfig& c) -> double& { return c.descent.regime.min_reynolds; }, Bound::NonNegative));
    add(number_field("descent.flutter_below", [](MissionConfig& c) -> double& { return c.descent.regime.flutter_below; }, Bound::Positive));
    add(number_field("descent.chaotic_above", [](MissionConfig& c) -> double& { return c.descent.regime.chaotic_above; }, Bound::Positive));

    // fluid
    add(number_field("fluid.air_density", [](MissionConfig& c) -> double& { return c.fluid.air_density; }, Bound::Positive));
    add(number_field("fluid.air_kinematic_viscosity", [](MissionConfig& c) -> double& { return c.fluid.air_kinematic_viscosity; }, Bound::Positive));
    add(number_field("fluid.water_density", [](MissionConfig& c) -> double& { return c.fluid.water_density; }, Bound::Positive));
    add(number_field("fluid.gravity", [](MissionConfig& c) -> double& { return c.fluid.gravity; }, Bound::Positive));
    add(number_field("fluid.atmospheric_pressure", [](MissionConfig& c) -> double& { return c.fluid.atmospheric_pressure; }, Bound::Positive));

    // wind
    {
        Field s;
        s.path = "wind.kind";
        s.set = [](MissionConfig& c, const Value& v) {
            const auto k = string_of("wind.kind", v);
            if (k == "Still") c.wind.kind = environment::WindKind::Still;
            else if (k == "Constant") c.wind.kind = environment::WindKind::Constant;
            else if (k == "Gusty") c.wind.kind = environment::WindKind::Gusty;
            else bad("wind.kind", "must be Still, Constant or Gusty");
        };
        s.emit = [](const MissionConfig& c) {
            switch (c.wind.kind) {
                case environment::WindKind::Still: return std::optional<std::string>("\"Still\"");
                case environment::WindKind::Constant: return std::optional<std::string>("\"Constant\"");
                case environment::WindKind::Gusty: return std::optional<std::string>("\"Gusty\"");
            }
            return std::optional<std::string>();
        };
        add(s);
    }
    add(number_field("wind.mean_x", [](MissionConfig& c) -> double& { return c.wind.mean_velocity.x; }));
    add(number_field("wind.mean_y", [](MissionConfig& c) -> double& { return c.wind.mean_velocity.y; }));
    add(number_field("wind.gust_std", [](MissionConfig& c) -> double& { return c.wind.gust_std; }, Bound::NonNegative));
    add(number_field("wind.gust_correlation_time", [](MissionConfig& c) -> double& { return c.wind.gust_correlation_time; }, Bound::Positive));
    add(number_field("wind.gust_cap", [](MissionConfig& c) -> double& { return c.wind.gust_cap; }, Bound::NonNegative));
    add(alias_field("wind.mean_x_kt", [](MissionConfig& c) -> double& { return c.wind.mean_velocity.x; }, kKnot));
    add(alias_field("wind.mean_y_kt", [](MissionConfig& c) -> double& { return c.wind.mean_velocity.y; }, kKnot));
    add(alias_field("wind.gust_std_kt", [](MissionConfig& c) -> double& { return c.wind.gust_std; }, kKnot, Bound::NonNegative));
    add(alias_field("wind.gust_cap_kt", [](MissionConfig& c) -> double& { return c.wind.gust_cap; }, kKnot, Bound::NonNegative));

    // water column
    add(number_field("water.depth", [](MissionConfig& c) -> double& { return c.water_depth; }, Bound::Positive));
    add(number_field("water.current_x", [](MissionConfig& c) -> double& { return c.current.x; }));
    add(number_field("water.current_y", [](MissionConfig& c) -> double& { return c.current.y; }));
    add(number_field("thermocline.surface_temp", [](MissionConfig& c) -> double& { return c.thermocline.surface_temp; }));
    add(number_field("thermocline.bottom_temp", [](MissionConfig& c) -> double& { return c.thermocline.bottom_temp; }));
    add(number_field("thermocline.thermocline_depth", [](MissionConfig& c) -> double& { return c.thermocline.thermocline_depth; }, Bound::NonNegative));
    add(number_field("thermocline.thermocline_width", [](MissionConfig& c) -> double& { return c.thermocline.thermocline_width; }, Bound::Positive));

    // pod and buoyancy
    add(number_field("pod.dry_mass", [](MissionConfig& c) -> double& { return c.pod.dry_mass; }, Bound::Positive));
    add(number_field("pod.displacement_volume", [](MissionConfig& c) -> double& { return c.pod.displacement_volume; }, Bound::Positive));
    add(number_field("pod.headspace_volume", [](MissionConfig& c) -> double& { return c.pod.headspace_volume; }, Bound::Positive));
    add(number_field("pod.max_delta_v_fraction", [](MissionConfig& c) -> double& { return c.pod.max_delta_v_fraction; }, Bound::Positive));
    add(number_field("pod.sealed_air_pressure", [](MissionConfig& c) -> double& { return c.pod.sealed_air_pressure; }, Bound::Positive));
    add(number_field("pod.max_reactant_mass", [](MissionConfig& c) -> double& { return c.pod.max_reactant_mass; }, Bound::Positive));
    add(number_field("charge.citric_acid_mass", [](MissionConfig& c) -> double& { return c.charge.citric_acid_mass; }, Bound::NonNegative));
    add(number_field("charge.bicarbonate_mass", [](MissionConfig& c) -> double& { return c.charge.bicarbonate_mass; }, Bound::NonNegative));
    add(bool_field("charge.water_available", [](MissionConfig& c) -> bool& { return c.charge.water_available; }));
    add(number_field("hydro.drag_coefficient", [](MissionConfig& c) -> double& { return c.hydro.drag_coefficient; }, Bound::NonNegative));
    add(number_field("hydro.reference_area", [](MissionConfig& c) -> double& { return c.hydro.reference_area; }, Bound::NonNegative));
    add(number_field("hydro.dissolution_time", [](MissionConfig& c) -> double& { return c.hydro.dissolution_time; }, Bound::NonNegative));
    add(number_field("hydro.added_mass_fraction", [](MissionConfig& c) -> double& { return c.hydro.added_mass_fraction; }, Bound::NonNegative));

    // sensors and trigger
    add(number_field("sensors.interval", [](MissionConfig& c) -> double& { return c.sensor_interval; }, Bound::Positive));
    add(number_field("sensors.pressure_std", [](MissionConfig& c) -> double& { return c.sensor_noise.pressure_std; }, Bound::NonNegative));
    add(number_field("sensors.temperature_std", [](MissionConfig& c) -> double& { return c.sensor_noise.temperature_std; }, Bound::NonNegative));
    add(number_field("sensors.gps_error", [](MissionConfig& c) -> double& { return c.sensor_noise.gps_error; }, Bound::NonNegative));
    {
        Field s;
        s.path = "trigger.mode";
        s.set = [](MissionConfig& c, const Value& v) {
            auto m = mission::trigger_mode_from_string(string_of("trigger.mode", v));
            if (!m) bad("trigger.mode", "must be ElapsedTime, DepthLimit or Either");
            c.trigger.mode = *m;
        };
        s.emit = [](const MissionConfig& c) {
            return std::optional<std::string>(quote(std::string(mission::to_string(c.trigger.mode))));
        };
        add(s);
    }
    add(number_field("trigger.max_benthic_time", [](MissionConfig& c) -> double& { return c.trigger.max_benthic_time; }, Bound::Positive));
    add(number_field("trigger.depth_limit", [](MissionConfig& c) -> double& { return c.trigger.depth_limit; }, Bound::Positive));

    // mission timing
    add(number_field("mission.preflight_duration", [](MissionConfig& c) -> double& { return c.timing.preflight_duration; }, Bound::NonNegative));
    add(number_field("mission.transit_duration", [](MissionConfig& c) -> double& { return c.timing.transit_duration; }, Bound::NonNegative));
    add(number_field("mission.reaction_delay", [](MissionConfig& c) -> double& { return c.timing.reaction_delay; }, Bound::NonNegative));
    add(number_field("mission.sma_available_force", [](MissionConfig& c) -> double& { return c.timing.sma_available_force; }, Bound::NonNegative));
    add(number_field("mission.sma_required_force", [](MissionConfig& c) -> double& { return c.timing.sma_required_force; }, Bound::NonNegative));
    add(number_field("mission.drift_factor", [](MissionConfig& c) -> double& { return c.timing.drift_factor; }, Bound::NonNegative));
    add(number_field("mission.shoreline_distance", [](MissionConfig& c) -> double& { return c.timing.shoreline_distance; }, Bound::Positive));
    add(number_field("mission.retrieval_timeout", [](MissionConfig& c) -> double& { return c.timing.retrieval_timeout; }, Bound::Positive));
    add(number_field("mission.max_sink_time", [](MissionConfig& c) -> double& { return c.timing.max_sink_time; }, Bound::Positive));
    add(number_field("mission.max_ascent_time", [](MissionConfig& c) -> double& { return c.timing.max_ascent_time; }, Bound::Positive));
    add(number_field("mission.underwater_dt", [](MissionConfig& c) -> double& { return c.timing.underwater_dt; }, Bound::Positive));

    // ensembles and calibration
    add(number_field("batch.pitch_band", [](MissionConfig& c) -> double& { return c.ensemble.pitch_band; }, Bound::NonNegative));
    add(alias_field("batch.pitch_band_deg", [](MissionConfig& c) -> double& { return c.ensemble.pitch_band; }, kDeg, Bound::NonNegative));
    add(number_field("batch.grid_step", [](MissionConfig& c) -> double& { return c.ensemble.grid_step; }, Bound::Positive));
    add(number_field("calibration.mean_descent_rate", [](MissionConfig& c) -> double& { return c.calibration.mean_descent_rate; }, Bound::Positive));
    add(number_field("calibration.glide_ratio", [](MissionConfig& c) -> double& { return c.calibration.glide_ratio; }, Bound::Positive));
    add(number_field("calibration.oscillation_period", [](MissionConfig& c) -> double& { return c.calibration.oscillation_period; }, Bound::NonNegative));
    add(number_field("calibration.peak_limit", [](MissionConfig& c) -> double& { return c.calibration.peak_limit; }, Bound::NonNegative));
    add(integer_field("calibration.budget", [](MissionConfig& c) -> int& { return c.calibration.budget; }, 1));
    return f;
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = build_fields();
    return f;
}

const Field* find_field(std::string_view path) {
    for (const auto& f : fields()) {
        if (f.path == path) return &f;
    }
    return nullptr;
}

// Grouped keys: set together so that arrays line up.
const std::vector<std::string> kAeroKeys{"payload_anchors",      "c_translational_lift", "c_rotational_lift",
                                         "c_drag_edgewise",      "c_drag_broadside",     "c_rotational_damping",
                                         "c_lateral_drift"};
const std::vector<std::string> kComplianceKeys{"pressures", "fractions"};

double& coefficient(aero::AeroCoefficients& c, std::size_t k) {
    switch (k) {
        case 1: return c.c_translational_lift;
        case 2: return c.c_rotational_lift;
        case 3: return c.c_drag_edgewise;
        case 4: return c.c_drag_broadside;
        case 5: return c.c_rotational_damping;
        default: return c.c_lateral_drift;
    }
}

std::vector<double> as_list(const std::string& path, const Value& v) {
    if (v.kind == Value::Kind::Number) return {v.number};
    if (v.kind == Value::Kind::Array) return v.array;
    bad(path, "must be a number or an array of numbers");
}

void apply_aero(MissionConfig& c, const std::map<std::string, Value>& entries) {
    if (entries.empty()) return;
    std::vector<double> anchors;
    for (const auto& a : c.aero.anchors) anchors.push_back(a.payload_mass);
    if (auto it = entries.find("payload_anchors"); it != entries.end()) {
        anchors = as_list("aero.payload_anchors", it->second);
        if (anchors.empty()) bad("aero.payload_anchors", "must not be empty");
    }
    const bool reshaped = anchors.size() != c.aero.anchors.size();
    aero::CoefficientSchedule s;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        s.anchors.push_back({anchors[i], reshaped ? aero::AeroCoefficients{} : c.aero.anchors[i].coeffs});
    }
    for (std::size_t k = 1; k < kAeroKeys.size(); ++k) {
        const std::string path = "aero." + kAeroKeys[k];
        auto it = entries.find(kAeroKeys[k]);
        if (it == entries.end()) {
            if (reshaped) bad(path, "must be given when payload_anchors changes the number of anchors");
            continue;
        }
        const auto values = as_list(path, it->second);
        if (values.size() == 1) {
            for (auto& a : s.anchors) coefficient(a.coeffs, k) = values[0];
        } else if (values.size() == anchors.size()) {
            for (std::size_t i = 0; i < values.size(); ++i) coefficient(s.anchors[i].coeffs, k) = values[i];
        } else {
            bad(path, "needs one value or one per payload anchor (" + std::to_string(anchors.size()) + ")");
        }
    }
    try {
        aero::validate(s);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("aero: ") + e.what(), "aero");
    }
    c.aero = s;
}

void apply_compliance(MissionConfig& c, const std::map<std::string, Value>& entries) {
    if (entries.empty()) return;
    std::vector<double> p, f;
    for (const auto& a : c.compliance.anchors) {
        p.push_back(a.first);
        f.push_back(a.second);
    }
    if (auto it = entries.find("pressures"); it != entries.end()) p = as_list("compliance.pressures", it->second);
    if (auto it = entries.find("fractions"); it != entries.end()) f = as_list("compliance.fractions", it->second);
    if (p.size() != f.size()) bad("compliance", "pressures and fractions must have the same length");
    buoyancy::BladderCompliance b;
    b.anchors.clear();
    for (std::size_t i = 0; i < p.size(); ++i) b.anchors.emplace_back(p[i], f[i]);
    try {
        buoyancy::validate(b);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("compliance: ") + e.what(), "compliance");
    }
    c.compliance = b;
}

std::string array_text(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s + "]";
}

void validate_all(const MissionConfig& c) {
    try {
        mission::validate(c);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

struct Entry {
    std::string path;
    Value value;
    int line = 0;
};

}  // namespace

ParsedConfig parse_config(std::string_view text, const ParseOptions& options) {
    ParsedConfig out;
    std::vector<Entry> entries;
    std::set<std::string> seen;
    static const std::set<std::string> kSections{"tumbler", "aero",    "descent", "fluid",   "wind",
                                                 "water",   "thermocline", "pod", "charge", "compliance",
                                                 "hydro",   "sensors", "trigger", "mission", "batch",
                                                 "calibration"};
    std::string section;
    bool skip_section = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header", "", line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            skip_section = false;
            if (!kSections.count(section)) {
                if (!options.lax) throw ConfigError("unknown section [" + section + "]", section, line_no);
                out.warnings.push_back("line " + std::to_string(line_no) + ": ignoring unknown section [" + section + "]");
                skip_section = true;
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", "", line_no);
        const auto key = trim(line.substr(0, eq));
        if (key.empty() || key.find_first_of(" \t\"") != std::string_view::npos) {
            throw ConfigError("malformed key '" + std::string(key) + "'", "", line_no);
        }
        if (skip_section) continue;
        const std::string path = section.empty() ? std::string(key) : section + "." + std::string(key);
        Value v;
        try {
            v = parse_value(line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(e.what()) + " for " + path, path, line_no);
        }
        const bool grouped =
            (section == "aero" && std::find(kAeroKeys.begin(), kAeroKeys.end(), key) != kAeroKeys.end()) ||
            (section == "compliance" &&
             std::find(kComplianceKeys.begin(), kComplianceKeys.end(), key) != kComplianceKeys.end());
        if (!grouped && !find_field(path)) {
            if (!options.lax) throw ConfigError("unknown key " + path, path, line_no);
            out.warnings.push_back("line " + std::to_string(line_no) + ": ignoring unknown key " + path);
            continue;
        }
        // A unit alias and its SI key set the same field.
        std::string target = path;
        for (std::string_view suffix : {"_kt", "_deg"}) {
            if (target.ends_with(suffix) && find_field(target.substr(0, target.size() - suffix.size()))) {
                target.resize(target.size() - suffix.size());
            }
        }
        if (!seen.insert(target).second) throw ConfigError("duplicate key " + path, path, line_no);
        entries.push_back({path, std::move(v), line_no});
    }

    MissionConfig cfg = mission::default_config();
    auto apply = [&](const Entry& e) {
        try {
            find_field(e.path)->set(cfg, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError(err.what(), e.path, e.line);
        }
    };
    // The preset goes first so that every other key overrides it.
    for (const auto& e : entries) {
        if (e.path == "preset") apply(e);
    }
    std::map<std::string, Value> aero_entries, compliance_entries;
    int aero_line = 0, compliance_line = 0;
    for (const auto& e : entries) {
        if (e.path == "preset") continue;
        if (e.path.rfind("aero.", 0) == 0) {
            aero_entries[e.path.substr(5)] = e.value;
            aero_line = aero_line ? aero_line : e.line;
        } else if (e.path.rfind("compliance.", 0) == 0) {
            compliance_entries[e.path.substr(11)] = e.value;
            compliance_line = compliance_line ? compliance_line : e.line;
        } else {
            apply(e);
        }
    }
    try {
        apply_aero(cfg, aero_entries);
    } catch (const ConfigError& err) {
        throw ConfigError(err.what(), err.key(), aero_line);
    }
    try {
        apply_compliance(cfg, compliance_entries);
    } catch (const ConfigError& err) {
        throw ConfigError(err.what(), err.key(), compliance_line);
    }
    validate_all(cfg);
    out.config = std::move(cfg);
    return out;
}

ParsedConfig load_config(const std::filesystem::path& path, const ParseOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), options);
}

std::string emit_config(const MissionConfig& c) {
    std::ostringstream os;
    std::string current;
    auto section_of = [](const std::string& path) {
        const auto dot = path.find('.');
        return dot == std::string::npos ? std::string() : path.substr(0, dot);
    };
    auto open = [&](const std::string& s) {
        if (s == current) return;
        current = s;
        os << "\n[" << s << "]\n";
    };
    bool aero_done = false;
    bool compliance_done = false;
    for (const auto& f : fields()) {
        if (!f.emit) continue;
        const std::string s = section_of(f.path);
        // Grouped sections sit where their neighbours would.
        if (!aero_done && s == "descent") {
            open("aero");
            std::vector<std::vector<double>> cols(kAeroKeys.size());
            for (const auto& a : c.aero.anchors) {
                cols[0].push_back(a.payload_mass);
                auto coeffs = a.coeffs;
                for (std::size_t k = 1; k < kAeroKeys.size(); ++k) cols[k].push_back(coefficient(coeffs, k));
            }
            for (std::size_t k = 0; k < kAeroKeys.size(); ++k) os << kAeroKeys[k] << " = " << array_text(cols[k]) << "\n";
            aero_done = true;
        }
        if (!compliance_done && s == "hydro") {
            open("compliance");
            std::vector<double> p, fr;
            for (const auto& a : c.compliance.anchors) {
                p.push_back(a.first);
                fr.push_back(a.second);
            }
            os << "pressures = " << array_text(p) << "\n";
            os << "fractions = " << array_text(fr) << "\n";
            compliance_done = true;
        }
        if (!s.empty()) open(s);
        const auto value = f.emit(c);
        if (!value) continue;
        os << (s.empty() ? f.path : f.path.substr(s.size() + 1)) << " = " << *value << "\n";
    }
    return os.str();
}

std::vector<std::string> key_paths() {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.path);
    for (const auto& k : kAeroKeys) out.push_back("aero." + k);
    for (const auto& k : kComplianceKeys) out.push_back("compliance." + k);
    return out;
}

std::string resolve_key(std::string_view key) {
    const auto all = key_paths();
    if (std::find(all.begin(), all.end(), key) != all.end()) return std::string(key);
    std::vector<std::string> hits;
    for (const auto& p : all) {
        const auto dot = p.find('.');
        if (dot != std::string::npos && std::string_view(p).substr(dot + 1) == key) hits.push_back(p);
    }
    if (hits.size() == 1) return hits[0];
    if (hits.empty()) throw ConfigError("unknown key " + std::string(key), std::string(key));
    std::string list;
    for (const auto& h : hits) list += (list.empty() ? "" : ", ") + h;
    throw ConfigError("ambiguous key " + std::string(key) + " (" + list + ")", std::string(key));
}

void apply_override(MissionConfig& cfg, std::string_view key_path, std::string_view value) {
    const std::string path = resolve_key(key_path);
    Value v;
    try {
        v = parse_value(value);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " for " + path, path);
    }
    MissionConfig next = cfg;
    if (path.rfind("aero.", 0) == 0) {
        apply_aero(next, {{path.substr(5), v}});
    } else if (path.rfind("compliance.", 0) == 0) {
        apply_compliance(next, {{path.substr(11), v}});
    } else {
        find_field(path)->set(next, v);
    }
    validate_all(next);
    cfg = std::move(next);
}

std::string aero_fragment(const aero::AeroCoefficients& c, const std::vector<std::string>& comments) {
    std::ostringstream os;
    for (const auto& line : comments) os << "# " << line << "\n";
    os << "[aero]\n";
    os << "payload_anchors = [0.0]\n";
    auto copy = c;
    for (std::size_t k = 1; k < kAeroKeys.size(); ++k) {
        os << kAeroKeys[k] << " = " << format_number(coefficient(copy, k)) << "\n";
    }
    return os.str();
}

}  // namespace tumblerpod::config
