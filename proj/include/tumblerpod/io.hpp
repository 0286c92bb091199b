#pragma once

// Artifact writers: CSV tables with '#' metadata headers, the trajectory SVG
// and the JSON mission log. Also a strict CSV reader used to check them.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tumblerpod/mission.hpp"
#include <json.hpp>

namespace tumblerpod::io {

using Metadata = std::vector<std::pair<std::string, std::string>>;

// Metadata every artifact carries so that it can be reproduced.
Metadata run_metadata(const mission::MissionConfig& cfg, const std::string& kind);

void write_trajectory_csv(std::ostream& os, const aero::Trajectory& traj, const Metadata& meta);
void write_sensor_csv(std::ostream& os, const std::vector<pod::SensorRecord>& records, const Metadata& meta);
void write_ensemble_csv(std::ostream& os, const std::vector<mission::GridRow>& grid, const Metadata& meta);

struct SweepRow {
    double value = 0.0;
    double mean_descent_rate = 0.0;  // NaN when the tumbler never reached the water
    double glide_ratio = 0.0;
    bool tumbling = false;
};

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const Metadata& meta);

struct RegimeCell {
    double i_star = 0.0;
    double re = 0.0;
    tumbler::FallRegime regime = tumbler::FallRegime::Tumbling;
};

void write_regime_csv(std::ostream& os, const std::vector<RegimeCell>& cells, const Metadata& meta);

inline constexpr double kColourScaleMax = 3.0;  // m/s, top of the descent-rate colour bar

// "#rrggbb" for a descent rate, clamped to [0, kColourScaleMax].
std::string descent_rate_colour(double rate);

std::string trajectory_svg(const aero::Trajectory& traj, const Metadata& meta);

nlohmann::ordered_json mission_log_json(const mission::MissionLog& log, const mission::MissionConfig& cfg);
nlohmann::ordered_json ensemble_json(const mission::EnsembleSummary& s, const mission::MissionConfig& cfg);

struct CsvTable {
    Metadata metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // throws if absent
    double number(std::size_t row, const std::string& name) const;
};

// Rejects CR characters, a missing trailing LF, ragged rows, empty cells,
// ',' decimal separators and numeric cells that do not parse completely.
CsvTable read_csv_strict(const std::string& text, const std::vector<std::string>& expected_header = {});

}  // namespace tumblerpod::io
