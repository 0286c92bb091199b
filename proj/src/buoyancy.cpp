#include "tumblerpod/buoyancy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tumblerpod/errors.hpp"

namespace tumblerpod::buoyancy {

void validate(const ReactantCharge& c) {
    if (!(c.citric_acid_mass >= 0.0) || !(c.bicarbonate_mass >= 0.0) ||
        !std::isfinite(c.citric_acid_mass) || !std::isfinite(c.bicarbonate_mass)) {
        throw DomainError("reactant masses must be finite and >= 0");
    }
}

ReactantCharge stoichiometric_charge(double co2_moles) {
    if (!(co2_moles >= 0.0)) throw DomainError("stoichiometric_charge: moles must be >= 0");
    return {co2_moles / 3.0 * kMolarCitricAcid, co2_moles * kMolarBicarbonate, true};
}

std::string_view to_string(LimitingReagent r) {
    switch (r) {
        case LimitingReagent::None: return "none";
        case LimitingReagent::CitricAcid: return "citric_acid";
        case LimitingReagent::Bicarbonate: return "bicarbonate";
        case LimitingReagent::Balanced: return "balanced";
    }
    return "?";
}

ReactionProducts gas_from_reactants(const ReactantCharge& charge) {
    validate(charge);
    ReactionProducts p;
    p.unreacted_acid_mass = charge.citric_acid_mass;
    p.unreacted_bicarbonate_mass = charge.bicarbonate_mass;
    if (!charge.water_available) return p;

    const double n_acid = charge.citric_acid_mass / kMolarCitricAcid;
    const double n_bicarb = charge.bicarbonate_mass / kMolarBicarbonate;
    if (n_acid == 0.0 || n_bicarb == 0.0) return p;

    double acid_used = 0.0;
    double bicarb_used = 0.0;
    const double scale = std::max(3.0 * n_acid, n_bicarb);
    if (std::abs(3.0 * n_acid - n_bicarb) <= 1e-9 * scale) {
        p.limiting = LimitingReagent::Balanced;
        acid_used = charge.citric_acid_mass;
        bicarb_used = charge.bicarbonate_mass;
        p.unreacted_acid_mass = 0.0;
        p.unreacted_bicarbonate_mass = 0.0;
    } else if (3.0 * n_acid < n_bicarb) {
        p.limiting = LimitingReagent::CitricAcid;
        acid_used = charge.citric_acid_mass;
        bicarb_used = 3.0 * n_acid * kMolarBicarbonate;
        p.unreacted_acid_mass = 0.0;
        p.unreacted_bicarbonate_mass = charge.bicarbonate_mass - bicarb_used;
    } else {
        p.limiting = LimitingReagent::Bicarbonate;
        bicarb_used = charge.bicarbonate_mass;
        acid_used = n_bicarb / 3.0 * kMolarCitricAcid;
        p.unreacted_bicarbonate_mass = 0.0;
        p.unreacted_acid_mass = charge.citric_acid_mass - acid_used;
    }
    p.co2_moles = std::min(3.0 * n_acid, n_bicarb);
    p.co2_mass = p.co2_moles * kMolarCO2;
    p.water_mass = p.co2_moles * kMolarWater;
    p.citrate_mass = acid_used + bicarb_used - p.co2_mass - p.water_mass;
    return p;
}

double internal_pressure(double gas_moles, double gas_volume, double temperature,
                         const HeadspaceAir& air) {
    if (!(gas_volume > 0.0)) throw DomainError("internal_pressure: gas volume must be > 0");
    if (!(temperature > 0.0)) throw DomainError("internal_pressure: temperature must be > 0 K");
    if (!(gas_moles >= 0.0)) throw DomainError("internal_pressure: gas moles must be >= 0");
    return gas_moles * kGasConstant * temperature / gas_volume + air.pressure * air.volume / gas_volume;
}

void validate(const BladderCompliance& c) {
    const auto& a = c.anchors;
    if (a.size() < 2) throw DomainError("compliance needs at least two anchors");
    if (a.front().first != 0.0 || a.front().second != 0.0) {
        throw DomainError("compliance must start at (0, 0)");
    }
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (!(a[i].first > a[i - 1].first) || !(a[i].second > a[i - 1].second)) {
            throw DomainError("compliance anchors must be strictly increasing");
        }
    }
    if (a.back().first < 70e3) throw DomainError("compliance must be defined up to 70 kPa");
}

namespace {

// End slope of a monotone cubic from the two adjacent secants (non-centred
// three-point estimate, limited to keep the shape).
double end_slope(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
}

}  // namespace

double bladder_expansion(double dp, const BladderCompliance& c) {
    if (!(dp >= 0.0)) throw DomainError("bladder_expansion: differential pressure must be >= 0");
    const auto& a = c.anchors;
    const std::size_t n = a.size();
    if (dp >= a.back().first) return a.back().second;

    std::vector<double> h(n - 1), d(n - 1), m(n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = a[k + 1].first - a[k].first;
        d[k] = (a[k + 1].second - a[k].second) / h[k];
    }
    if (n == 2) {
        m[0] = m[1] = d[0];
    } else {
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (d[k - 1] * d[k] <= 0.0) {
                m[k] = 0.0;
            } else {
                const double w1 = 2.0 * h[k] + h[k - 1];
                const double w2 = h[k] + 2.0 * h[k - 1];
                m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
            }
        }
        m[0] = end_slope(h[0], h[1], d[0], d[1]);
        m[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    }

    std::size_t k = 0;
    while (k + 2 < n && dp >= a[k + 1].first) ++k;
    if (dp == a[k].first) return a[k].second;
    const double t = (dp - a[k].first) / h[k];
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * a[k].second + (t3 - 2 * t2 + t) * h[k] * m[k] +
           (-2 * t3 + 3 * t2) * a[k + 1].second + (t3 - t2) * h[k] * m[k + 1];
}

void validate(const PodGeometry& pod, const environment::FluidProperties& fluid) {
    if (!(pod.dry_mass > 0.0) || !(pod.displacement_volume > 0.0) || !(pod.headspace_volume > 0.0) ||
        !(pod.max_delta_v_fraction > 0.0) || !(pod.sealed_air_pressure > 0.0) ||
        !(pod.max_reactant_mass > 0.0)) {
        throw DomainError("pod geometry values must be positive");
    }
    if (!(pod.dry_mass / (fluid.water_density * pod.displacement_volume) > 1.0)) {
        throw DomainError("pod must sink when deflated (dry_mass > water_density * V0)");
    }
}

double required_float_fraction(const PodGeometry& pod, const environment::FluidProperties& fluid) {
    return pod.dry_mass / (fluid.water_density * pod.displacement_volume) - 1.0;
}

BladderState equilibrium_for_gas(double gas_moles, const PodGeometry& pod, double ambient,
                                 double temperature, const BladderCompliance& compliance) {
    if (!(ambient > 0.0)) throw DomainError("equilibrium_inflation: ambient pressure must be > 0");
    if (!(temperature > 0.0)) throw DomainError("equilibrium_inflation: temperature must be > 0 K");
    const HeadspaceAir air{pod.headspace_volume, pod.sealed_air_pressure};
    const double v0 = pod.displacement_volume;
    const double dv_max = pod.max_delta_v_fraction * v0;
    auto pressure = [&](double dv) {
        return internal_pressure(gas_moles, pod.headspace_volume + dv, temperature, air);
    };
    auto mismatch = [&](double dv) {
        return v0 * bladder_expansion(std::max(0.0, pressure(dv) - ambient), compliance) - dv;
    };

    double dv = 0.0;
    if (pressure(0.0) > ambient) {
        if (mismatch(dv_max) >= 0.0) {
            dv = dv_max;
        } else {
            double lo = 0.0;
            double hi = dv_max;
            for (int i = 0; i < 200 && hi - lo > 1e-18; ++i) {
                const double mid = 0.5 * (lo + hi);
                (mismatch(mid) > 0.0 ? lo : hi) = mid;
            }
            dv = 0.5 * (lo + hi);
        }
    }
    BladderState s;
    s.gas_moles = gas_moles;
    s.internal_pressure = pressure(dv);
    s.differential_pressure = s.internal_pressure - ambient;
    s.delta_v_fraction = dv / v0;
    s.inflated_volume = v0 + dv;
    return s;
}

BladderState equilibrium_inflation(const ReactantCharge& charge, const PodGeometry& pod,
                                   double ambient, double temperature,
                                   const BladderCompliance& compliance) {
    return equilibrium_for_gas(gas_from_reactants(charge).co2_moles, pod, ambient, temperature,
                               compliance);
}

std::optional<double> max_operational_depth(const ReactantCharge& charge, const PodGeometry& pod,
                                            const environment::FluidProperties& fluid,
                                            double temperature,
                                            const BladderCompliance& compliance) {
    validate(compliance);
    const double req = required_float_fraction(pod, fluid);
    if (req < 0.0) throw ModelError("pod floats even when deflated");
    const double n = gas_from_reactants(charge).co2_moles;

    auto floats_at = [&](double h) {
        const auto s = equilibrium_for_gas(n, pod, environment::water_pressure(h, fluid), temperature,
                                           compliance);
        return s.differential_pressure >= 0.0 && s.delta_v_fraction >= req;
    };
    if (req > pod.max_delta_v_fraction || !floats_at(0.0)) return std::nullopt;

    // The bladder needs at least zero differential at the float volume, which
    // bounds the ambient pressure and therefore the depth.
    const HeadspaceAir air{pod.headspace_volume, pod.sealed_air_pressure};
    const double p_float =
        internal_pressure(n, pod.headspace_volume + req * pod.displacement_volume, temperature, air);
    const double h_upper =
        std::max(0.0, (p_float - fluid.atmospheric_pressure) / (fluid.water_density * fluid.gravity));
    if (floats_at(h_upper)) return h_upper;

    double lo = 0.0;
    double hi = h_upper;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (floats_at(mid) ? lo : hi) = mid;
    }
    return lo;
}

ChargeDesign required_charge(double target_depth, const PodGeometry& pod,
                             const environment::FluidProperties& fluid, double temperature,
                             const BladderCompliance& compliance) {
    if (!(target_depth >= 0.0)) throw DomainError("required_charge: target depth must be >= 0");
    const double per_mole_co2 = kMolarCitricAcid / 3.0 + kMolarBicarbonate;
    const double n_max = pod.max_reactant_mass / per_mole_co2;
    auto depth_for = [&](double n) {
        return max_operational_depth(stoichiometric_charge(n), pod, fluid, temperature, compliance);
    };
    auto reaches = [&](double n) {
        const auto d = depth_for(n);
        return d && *d >= target_depth;
    };

    ChargeDesign out;
    std::ostringstream os;
    if (!reaches(n_max)) {
        const auto d = depth_for(n_max);
        out.feasible = false;
        out.charge = stoichiometric_charge(n_max);
        out.achieved_depth = d.value_or(0.0);
        os << "infeasible: the full " << pod.max_reactant_mass * 1e3 << " g reactant capacity reaches "
           << out.achieved_depth << " m";
        out.report = os.str();
        return out;
    }
    double lo = 0.0;
    double hi = n_max;
    if (reaches(0.0)) {
        hi = 0.0;
    } else {
        for (int i = 0; i < 200 && hi - lo > 1e-15 * n_max; ++i) {
            const double mid = 0.5 * (lo + hi);
            (reaches(mid) ? hi : lo) = mid;
        }
    }
    out.feasible = true;
    out.charge = stoichiometric_charge(hi);
    out.achieved_depth = depth_for(hi).value_or(0.0);
    os << "feasible: " << out.charge.citric_acid_mass * 1e3 << " g citric acid + "
       << out.charge.bicarbonate_mass * 1e3 << " g sodium bicarbonate reaches " << out.achieved_depth
       << " m";
    out.report = os.str();
    return out;
}

ReactantCharge charge_for_pressure(double pressure, double fraction, const PodGeometry& pod,
                                   double temperature) {
    if (!(temperature > 0.0)) throw DomainError("charge_for_pressure: temperature must be > 0 K");
    const double v = pod.headspace_volume + fraction * pod.displacement_volume;
    const double air = pod.sealed_air_pressure * pod.headspace_volume / v;
    const double n = std::max(0.0, (pressure - air) * v / (kGasConstant * temperature));
    return stoichiometric_charge(n);
}

ReactantCharge reference_charge() {
    const PodGeometry pod;
    return charge_for_pressure(164e3, 0.057, pod, kZeroCelsius + 20.0);
}

}  // namespace tumblerpod::buoyancy
