#pragma once

// Citric acid / sodium bicarbonate gas generator, silicone bladder compliance
// and the inflation equilibrium that decides whether the pod can resurface.
//
//   C6H8O7 + 3 NaHCO3 -> Na3C6H5O7 + 3 CO2 + 3 H2O

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tumblerpod/environment.hpp"

namespace tumblerpod::buoyancy {

inline constexpr double kGasConstant = 8.314;        // J/(mol K)
inline constexpr double kMolarCitricAcid = 0.19212;  // kg/mol
inline constexpr double kMolarBicarbonate = 0.08401;
inline constexpr double kMolarCO2 = 0.044009;
inline constexpr double kMolarWater = 0.018015;
// Sodium citrate takes the balance so the equation conserves mass exactly.
inline constexpr double kMolarCitrate =
    kMolarCitricAcid + 3.0 * kMolarBicarbonate - 3.0 * kMolarCO2 - 3.0 * kMolarWater;
inline constexpr double kZeroCelsius = 273.15;  // K

struct ReactantCharge {
    double citric_acid_mass = 0.0;  // kg
    double bicarbonate_mass = 0.0;  // kg
    bool water_available = true;

    bool operator==(const ReactantCharge&) const = default;
};

void validate(const ReactantCharge& charge);

// Charge with acid and bicarbonate in exact stoichiometric ratio.
ReactantCharge stoichiometric_charge(double co2_moles);

enum class LimitingReagent { None, CitricAcid, Bicarbonate, Balanced };

std::string_view to_string(LimitingReagent r);

struct ReactionProducts {
    double co2_moles = 0.0;
    double co2_mass = 0.0;      // kg
    double citrate_mass = 0.0;
    double water_mass = 0.0;
    double unreacted_acid_mass = 0.0;
    double unreacted_bicarbonate_mass = 0.0;
    LimitingReagent limiting = LimitingReagent::None;

    double total_mass() const {
        return co2_mass + citrate_mass + water_mass + unreacted_acid_mass + unreacted_bicarbonate_mass;
    }
};

ReactionProducts gas_from_reactants(const ReactantCharge& charge);

// Air sealed into the reactant headspace before the reaction.
struct HeadspaceAir {
    double volume = 0.0;    // m^3
    double pressure = 0.0;  // Pa absolute at sealing

    bool operator==(const HeadspaceAir&) const = default;
};

// CO2 partial pressure n R T / V plus the isothermally compressed/expanded
// headspace air.
double internal_pressure(double gas_moles, double gas_volume, double temperature,
                         const HeadspaceAir& air);

struct BladderCompliance {
    // (differential pressure Pa, Delta V / V0), starting at (0, 0).
    std::vector<std::pair<double, double>> anchors{{0.0, 0.0}, {20e3, 0.057}, {70e3, 0.30}};

    bool operator==(const BladderCompliance&) const = default;
};

void validate(const BladderCompliance& c);

// Monotone piecewise-cubic (Fritsch-Carlson) through the anchors, flat past
// the last one.
double bladder_expansion(double differential_pressure, const BladderCompliance& c);

struct PodGeometry {
    double dry_mass = 0.150;                           // kg
    double displacement_volume = 0.150 / (1.057 * 1000.0);  // V0, m^3
    double headspace_volume = 2.0e-5;                  // m^3
    double max_delta_v_fraction = 0.30;
    double sealed_air_pressure = 101325.0;             // Pa absolute
    double max_reactant_mass = 2.0e-3;                 // kg, chamber capacity

    bool operator==(const PodGeometry&) const = default;
};

void validate(const PodGeometry& pod, const environment::FluidProperties& fluid);

// Delta V / V0 at which displaced water balances the dry weight.
double required_float_fraction(const PodGeometry& pod, const environment::FluidProperties& fluid);

struct BladderState {
    double gas_moles = 0.0;
    double internal_pressure = 0.0;      // Pa absolute
    double differential_pressure = 0.0;  // internal - ambient
    double delta_v_fraction = 0.0;
    double inflated_volume = 0.0;        // total displacement V0 + Delta V, m^3

    bool operator==(const BladderState&) const = default;
};

// Fixed point of gas law and compliance for a known amount of gas.
BladderState equilibrium_for_gas(double gas_moles, const PodGeometry& pod, double ambient_pressure,
                                 double temperature, const BladderCompliance& compliance);

BladderState equilibrium_inflation(const ReactantCharge& charge, const PodGeometry& pod,
                                   double ambient_pressure, double temperature,
                                   const BladderCompliance& compliance);

// Deepest depth (m) at which the inflated pod still floats, or nullopt if it
// cannot float even at the surface. Throws ModelError if the deflated pod
// already floats. `temperature` is the gas temperature in kelvin.
std::optional<double> max_operational_depth(const ReactantCharge& charge, const PodGeometry& pod,
                                            const environment::FluidProperties& fluid,
                                            double temperature, const BladderCompliance& compliance);

struct ChargeDesign {
    bool feasible = false;
    ReactantCharge charge{};         // best charge found (capacity charge if infeasible)
    double achieved_depth = 0.0;     // m, forward check of `charge`
    std::string report;
};

ChargeDesign required_charge(double target_depth, const PodGeometry& pod,
                             const environment::FluidProperties& fluid, double temperature,
                             const BladderCompliance& compliance);

// Charge that brings the internal pressure to `pressure` when the bladder has
// grown by `fraction` of V0.
ReactantCharge charge_for_pressure(double pressure, double fraction, const PodGeometry& pod,
                                   double temperature);

// Shipped reference charge: 164 kPa absolute at the 5.7 % float expansion, 20 degC.
ReactantCharge reference_charge();

}  // namespace tumblerpod::buoyancy
