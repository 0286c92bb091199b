#include "tumblerpod/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tumblerpod/errors.hpp"

namespace tumblerpod::environment {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

}  // namespace

void validate(const FluidProperties& fluid) {
    require_positive(fluid.air_density, "air_density");
    require_positive(fluid.air_kinematic_viscosity, "air_kinematic_viscosity");
    require_positive(fluid.water_density, "water_density");
    require_positive(fluid.gravity, "gravity");
    require_positive(fluid.atmospheric_pressure, "atmospheric_pressure");
    if (fluid.water_density <= fluid.air_density) {
        throw DomainError("water_density must exceed air_density");
    }
}

double Horizontal::norm() const { return std::hypot(x, y); }

bool WindModel::operator==(const WindModel& o) const {
    return kind == o.kind && mean_velocity == o.mean_velocity && gust_std == o.gust_std &&
           gust_correlation_time == o.gust_correlation_time && gust_cap == o.gust_cap;
}

void validate(const WindModel& wind) {
    if (!(wind.gust_std >= 0.0)) throw DomainError("gust_std must be >= 0");
    if (!(wind.gust_cap >= 0.0)) throw DomainError("gust_cap must be >= 0");
    if (wind.kind == WindKind::Gusty && !(wind.gust_correlation_time > 0.0)) {
        throw DomainError("gust_correlation_time must be > 0 for gusty wind");
    }
}

void validate(const ThermoclineProfile& profile) {
    require_positive(profile.thermocline_width, "thermocline_width");
    if (!(profile.thermocline_depth >= 0.0)) {
        throw DomainError("thermocline_depth must be >= 0");
    }
}

double water_pressure(double depth, const FluidProperties& fluid) {
    if (!(depth >= 0.0)) throw DomainError("water_pressure: depth must be >= 0");
    return fluid.atmospheric_pressure + fluid.water_density * fluid.gravity * depth;
}

double water_temperature(double depth, const ThermoclineProfile& p) {
    if (!(depth >= 0.0)) throw DomainError("water_temperature: depth must be >= 0");
    const double s = (depth - p.thermocline_depth) / p.thermocline_width;
    // exp overflows to inf for very deep points, which still yields T_b.
    return p.bottom_temp + (p.surface_temp - p.bottom_temp) / (1.0 + std::exp(s));
}

Horizontal wind_sample(WindModel& model, double dt, std::mt19937_64& rng) {
    if (!(dt > 0.0)) throw DomainError("wind_sample: dt must be > 0");
    switch (model.kind) {
        case WindKind::Still:
            return {};
        case WindKind::Constant:
            return model.mean_velocity;
        case WindKind::Gusty:
            break;
    }

    std::normal_distribution<double> unit(0.0, 1.0);
    if (!model.gust_initialised) {
        model.gust = {model.gust_std * unit(rng), model.gust_std * unit(rng)};
        model.gust_initialised = true;
    } else {
        const double a = std::exp(-dt / model.gust_correlation_time);
        const double b = model.gust_std * std::sqrt(1.0 - a * a);
        model.gust.x = a * model.gust.x + b * unit(rng);
        model.gust.y = a * model.gust.y + b * unit(rng);
    }

    Horizontal fluct = model.gust;
    const double mag = fluct.norm();
    if (mag > model.gust_cap) {
        const double s = mag > 0.0 ? model.gust_cap / mag : 0.0;
        fluct.x *= s;
        fluct.y *= s;
    }
    return {model.mean_velocity.x + fluct.x, model.mean_velocity.y + fluct.y};
}

}  // namespace tumblerpod::environment
