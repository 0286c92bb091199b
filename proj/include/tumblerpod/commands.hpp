#pragma once

// Subcommands behind the tumblerpod executable. Each returns a process exit
// status: 0 when the simulation ran (whatever the mission outcome),
// kConfigFailure for bad configs or arguments, kIoFailure when artifacts could
// not be written.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tumblerpod/mission.hpp"

namespace tumblerpod::commands {

inline constexpr int kConfigFailure = 2;
inline constexpr int kIoFailure = 3;

// Output directory used when --out is not given.
inline constexpr const char* kOutDirEnv = "TUMBLERPOD_OUT_DIR";

struct CommonOptions {
    std::optional<std::filesystem::path> config;  // default lake scenario when absent
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    bool lax = false;
};

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

// --out, else $TUMBLERPOD_OUT_DIR, else the working directory.
std::filesystem::path resolve_out_dir(const CommonOptions& opt);

int cmd_simulate(const CommonOptions& opt, Streams io);

int cmd_batch(const CommonOptions& opt, int runs, Streams io);

// `parameter` is a key path or an unambiguous bare key; values are tokens as
// they would appear in a config file.
int cmd_sweep(const CommonOptions& opt, const std::string& parameter, const std::vector<std::string>& values,
              Streams io);

struct RegimeGrid {
    double i_star_min = 0.01, i_star_max = 0.3;
    int i_star_count = 30;
    double re_min = 10.0, re_max = 1e5;  // log-spaced
    int re_count = 9;
};

int cmd_regime_map(const CommonOptions& opt, const RegimeGrid& grid, Streams io);

int cmd_buoyancy(const CommonOptions& opt, std::optional<double> target_depth, Streams io);

struct CalibrateOverrides {
    std::optional<double> mean_descent_rate, glide_ratio, oscillation_period, peak_limit;
    std::optional<int> budget;
    bool fresh = false;  // start from the built-in guess instead of the configured coefficients
};

int cmd_calibrate(const CommonOptions& opt, const CalibrateOverrides& targets, Streams io);

}  // namespace tumblerpod::commands
