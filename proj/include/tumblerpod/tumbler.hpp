#pragma once

// Tumbler sheet designs, their equal-area disc reduction and the fall-regime
// classifier built on the dimensionless moment of inertia
//   I* = pi * sigma / (64 * rho_air * d).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tumblerpod/environment.hpp"

namespace tumblerpod::tumbler {

enum class Shape { Circle, Square, Dodecagon };

std::string_view to_string(Shape shape);
std::optional<Shape> shape_from_string(std::string_view name);

inline constexpr double kMaxCharacteristicRadius = 0.20;  // m, carrier limit
inline constexpr double kBendingDiameter = 0.15;          // m

struct TumblerDesign {
    Shape shape = Shape::Dodecagon;
    double characteristic_radius = 0.20;  // circumradius for polygons
    double sheet_areal_density = 0.040;   // kg/m^2 per layer
    int layer_count = 2;
    double stiffener_mass = 0.0;          // kg
    std::optional<double> structure_mass; // kg, as-built total; overrides the sum
    double payload_mass = 0.0;            // kg
    double initial_pitch = 0.0;           // rad, chord angle from horizontal
    std::string label;                    // reinforcement pattern, metadata only

    bool operator==(const TumblerDesign&) const = default;
};

// Throws DomainError on a violated invariant.
void validate(const TumblerDesign& design);

// Non-fatal notes, e.g. a large unstiffened sheet that will bend.
std::vector<std::string> design_warnings(const TumblerDesign& design);

// Named designs as built: circle1, circle2, square, dodecagon1, dodecagon2, dodecagon3.
std::optional<TumblerDesign> preset(std::string_view name);
const std::vector<std::string>& preset_names();

struct EffectiveDisc {
    double equivalent_diameter = 0.0;      // m
    double effective_areal_density = 0.0;  // kg/m^2, total mass over planform
    double i_star = 0.0;
};

enum class FallRegime { SteadyFalling, Fluttering, Tumbling, Chaotic };

std::string_view to_string(FallRegime regime);

struct RegimeThresholds {
    double min_reynolds = 100.0;  // below: viscous steady fall
    double flutter_below = 0.04;  // I* < this flutters; the bound itself tumbles
    double chaotic_above = 0.2;

    bool operator==(const RegimeThresholds&) const = default;
};

double planform_area(const TumblerDesign& design);

// Sheet + stiffener mass, or the as-built structure mass when given.
double structure_mass(const TumblerDesign& design);
double total_mass(const TumblerDesign& design);

double dimensionless_inertia(double areal_density, double diameter, double air_density);

EffectiveDisc effective_disc(const TumblerDesign& design,
                             const environment::FluidProperties& fluid);

double reynolds(double speed, double diameter, const environment::FluidProperties& fluid);

FallRegime classify_regime(double i_star, double re, const RegimeThresholds& thresholds = {});

}  // namespace tumblerpod::tumbler
