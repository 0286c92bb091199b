#include "tumblerpod/tumbler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tumblerpod/errors.hpp"

namespace tumblerpod::tumbler {

std::string_view to_string(Shape shape) {
    switch (shape) {
        case Shape::Circle: return "circle";
        case Shape::Square: return "square";
        case Shape::Dodecagon: return "dodecagon";
    }
    return "?";
}

std::optional<Shape> shape_from_string(std::string_view name) {
    if (name == "circle") return Shape::Circle;
    if (name == "square") return Shape::Square;
    if (name == "dodecagon") return Shape::Dodecagon;
    return std::nullopt;
}

std::string_view to_string(FallRegime regime) {
    switch (regime) {
        case FallRegime::SteadyFalling: return "SteadyFalling";
        case FallRegime::Fluttering: return "Fluttering";
        case FallRegime::Tumbling: return "Tumbling";
        case FallRegime::Chaotic: return "Chaotic";
    }
    return "?";
}

void validate(const TumblerDesign& d) {
    if (!(d.characteristic_radius > 0.0 && d.characteristic_radius <= kMaxCharacteristicRadius)) {
        throw DomainError("characteristic_radius must lie in (0, 0.20] m");
    }
    if (!(d.sheet_areal_density >= 0.0)) throw DomainError("sheet_areal_density must be >= 0");
    if (d.layer_count < 1) throw DomainError("layer_count must be >= 1");
    if (!(d.stiffener_mass >= 0.0)) throw DomainError("stiffener_mass must be >= 0");
    if (d.structure_mass && !(*d.structure_mass >= 0.0)) {
        throw DomainError("structure_mass must be >= 0");
    }
    if (!(d.payload_mass >= 0.0)) throw DomainError("payload_mass must be >= 0");
    if (!std::isfinite(d.initial_pitch)) throw DomainError("initial_pitch must be finite");
    if (!(total_mass(d) > 0.0)) throw DomainError("total mass (structure_mass + payload_mass) must be > 0");
}

std::vector<std::string> design_warnings(const TumblerDesign& d) {
    std::vector<std::string> out;
    const double deq = 2.0 * std::sqrt(planform_area(d) / std::numbers::pi);
    if (deq >= kBendingDiameter && !(d.stiffener_mass > 0.0) && !d.structure_mass) {
        out.emplace_back("unstiffened sheet wider than 15 cm: expect bending and a chaotic fall");
    }
    return out;
}

namespace {

TumblerDesign make(Shape shape, double sheet, int layers, double built, std::string label) {
    TumblerDesign d;
    d.shape = shape;
    d.characteristic_radius = 0.20;
    d.sheet_areal_density = sheet;
    d.layer_count = layers;
    d.structure_mass = built;
    d.label = std::move(label);
    // Whatever the sheets do not account for is balsa.
    const double sheets = layers * sheet * planform_area(d);
    d.stiffener_mass = std::max(0.0, built - sheets);
    d.initial_pitch = 0.35;
    return d;
}

constexpr double kHeavyPaper = 0.240;
constexpr double kLightPaper = 0.040;

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"circle1",    "circle2",    "square",
                                                "dodecagon1", "dodecagon2", "dodecagon3"};
    return names;
}

std::optional<TumblerDesign> preset(std::string_view name) {
    if (name == "circle1") return make(Shape::Circle, kHeavyPaper, 1, 0.032, "R, SL, HP, trailing spars");
    if (name == "circle2") return make(Shape::Circle, kHeavyPaper, 1, 0.033, "R, SL, HP, leading-edge spars");
    if (name == "square") return make(Shape::Square, kHeavyPaper, 1, 0.028, "R, SL, HP");
    if (name == "dodecagon1") return make(Shape::Dodecagon, kHeavyPaper, 1, 0.036, "R, SL, HP");
    if (name == "dodecagon2") return make(Shape::Dodecagon, kHeavyPaper, 2, 0.068, "R, DL, HP");
    if (name == "dodecagon3") return make(Shape::Dodecagon, kLightPaper, 2, 0.022, "R, DL, LP");
    return std::nullopt;
}

double planform_area(const TumblerDesign& d) {
    const double r2 = d.characteristic_radius * d.characteristic_radius;
    switch (d.shape) {
        case Shape::Circle: return std::numbers::pi * r2;
        case Shape::Square: return 2.0 * r2;
        case Shape::Dodecagon: return 3.0 * r2;
    }
    return 0.0;
}

double structure_mass(const TumblerDesign& d) {
    if (d.structure_mass) return *d.structure_mass;
    return d.layer_count * d.sheet_areal_density * planform_area(d) + d.stiffener_mass;
}

double total_mass(const TumblerDesign& d) { return structure_mass(d) + d.payload_mass; }

double dimensionless_inertia(double areal_density, double diameter, double air_density) {
    return std::numbers::pi * areal_density / (64.0 * air_density * diameter);
}

EffectiveDisc effective_disc(const TumblerDesign& d, const environment::FluidProperties& fluid) {
    if (!(fluid.air_density > 0.0)) throw DomainError("effective_disc: air_density must be > 0");
    const double area = planform_area(d);
    if (!(area > 0.0)) throw DomainError("effective_disc: planform area is zero");
    EffectiveDisc disc;
    disc.equivalent_diameter = 2.0 * std::sqrt(area / std::numbers::pi);
    disc.effective_areal_density = total_mass(d) / area;
    disc.i_star = dimensionless_inertia(disc.effective_areal_density, disc.equivalent_diameter,
                                        fluid.air_density);
    return disc;
}

double reynolds(double speed, double diameter, const environment::FluidProperties& fluid) {
    if (!(speed >= 0.0)) throw DomainError("reynolds: speed must be >= 0");
    if (!(diameter > 0.0)) throw DomainError("reynolds: diameter must be > 0");
    return speed * diameter / fluid.air_kinematic_viscosity;
}

FallRegime classify_regime(double i_star, double re, const RegimeThresholds& t) {
    if (!(i_star > 0.0)) throw DomainError("classify_regime: i_star must be > 0");
    if (!(re >= 0.0)) throw DomainError("classify_regime: re must be >= 0");
    if (re < t.min_reynolds) return FallRegime::SteadyFalling;
    if (i_star < t.flutter_below) return FallRegime::Fluttering;
    if (i_star <= t.chaotic_above) return FallRegime::Tumbling;
    return FallRegime::Chaotic;
}

}  // namespace tumblerpod::tumbler
