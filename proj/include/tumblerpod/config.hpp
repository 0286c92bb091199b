#pragma once

// Mission configuration documents: a small TOML-like format.
//
//   preset = "dodecagon3"      # applied first, remaining keys override it
//   release_height = 15.0
//   [tumbler]
//   payload_mass = 0.070
//   [wind]
//   kind = "Gusty"
//   mean_x_kt = 8.75           # *_kt keys take knots, everything else is SI
//
// Angles are radians unless the key ends in _deg.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tumblerpod/mission.hpp"

namespace tumblerpod::config {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::string key = {}, int line = 0);
    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

struct Value {
    enum class Kind { Number, String, Bool, Array };
    Kind kind = Kind::Number;
    double number = 0.0;
    std::string text;  // string contents, or the raw number token
    bool boolean = false;
    std::vector<double> array;
};

// Parses one value token (number, "string", true/false, [n, ...]).
Value parse_value(std::string_view token);

struct ParseOptions {
    bool lax = false;  // unknown keys become warnings
};

struct ParsedConfig {
    mission::MissionConfig config;
    std::vector<std::string> warnings;
};

ParsedConfig parse_config(std::string_view text, const ParseOptions& options = {});
ParsedConfig load_config(const std::filesystem::path& path, const ParseOptions& options = {});

// Every field written out explicitly; parse_config(emit_config(c)) == c.
std::string emit_config(const mission::MissionConfig& cfg);

// Sets one key ("section.key" or a top-level key) from a value token and
// re-validates. A bare key is accepted when it names exactly one field.
void apply_override(mission::MissionConfig& cfg, std::string_view key_path, std::string_view value);

// Canonical key path for `key`, resolving bare names; throws if unknown or ambiguous.
std::string resolve_key(std::string_view key);

std::vector<std::string> key_paths();

// [aero] section holding one coefficient set, ready to append to a config.
std::string aero_fragment(const aero::AeroCoefficients& c, const std::vector<std::string>& comments = {});

std::string format_number(double v);

}  // namespace tumblerpod::config
