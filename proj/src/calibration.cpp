#include "tumblerpod/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "tumblerpod/errors.hpp"
#include "tumblerpod/nelder_mead.hpp"

namespace tumblerpod::aero {

namespace {

constexpr std::size_t kCount = 6;

std::array<double, kCount> as_array(const AeroCoefficients& c) {
    return {c.c_translational_lift, c.c_rotational_lift, c.c_drag_edgewise,
            c.c_drag_broadside,     c.c_rotational_damping, c.c_lateral_drift};
}

AeroCoefficients from_array(const std::array<double, kCount>& a) {
    AeroCoefficients c{a[0], a[1], a[2], a[3], a[4], a[5]};
    c.c_drag_broadside = std::max(c.c_drag_broadside, c.c_drag_edgewise);
    return c;
}

struct Evaluation {
    double value = 0.0;
    double descent_error = 0.0;
    double glide_error = 0.0;
    std::optional<double> period_error;
    TrajectoryMetrics metrics{};
    bool landed = false;
    bool tumbling = false;
};

Evaluation evaluate(const CalibrationSetup& s, const CalibrationTargets& t, const AeroCoefficients& c) {
    Evaluation e;
    const Trajectory traj = simulate_descent(s.design, s.environment, c, s.release_height, s.seed, s.descent);
    if (traj.terminal != TerminalEvent::HitWater) {
        // Rank failed descents by how far they got.
        const double z = traj.samples.empty() ? 0.0 : traj.samples.back().position.z;
        e.value = 10.0 + (1.0 - std::clamp(z / s.release_height, 0.0, 1.0));
        return e;
    }
    e.landed = true;
    e.metrics = trajectory_metrics(traj);
    e.tumbling = !traj.steep_mode && e.metrics.flip_count >= 1;
    e.descent_error = e.metrics.mean_descent_rate / t.mean_descent_rate - 1.0;
    e.glide_error = e.metrics.glide_ratio / t.glide_ratio - 1.0;
    e.value = t.weight_descent * e.descent_error * e.descent_error +
              t.weight_glide * e.glide_error * e.glide_error;
    if (t.oscillation_period) {
        if (e.metrics.oscillation_period) {
            e.period_error = *e.metrics.oscillation_period / *t.oscillation_period - 1.0;
            e.value += t.weight_period * *e.period_error * *e.period_error;
        } else {
            e.value += t.weight_period;
        }
    }
    if (t.peak_limit && e.metrics.peak_descent_rate > *t.peak_limit) {
        const double excess = e.metrics.peak_descent_rate / *t.peak_limit - 1.0;
        e.value += t.weight_peak * excess * excess;
    }
    if (!e.tumbling) e.value += 1.0;
    return e;
}

bool close_enough(const Evaluation& e, const CalibrationTargets& t, double tol) {
    if (!e.landed || !e.tumbling) return false;
    if (std::abs(e.descent_error) > tol || std::abs(e.glide_error) > tol) return false;
    if (t.oscillation_period && !(e.period_error && std::abs(*e.period_error) <= tol)) return false;
    if (t.peak_limit && e.metrics.peak_descent_rate > *t.peak_limit) return false;
    return true;
}

}  // namespace

CalibrationResult calibrate_coefficients(const CalibrationSetup& setup,
                                         const CalibrationTargets& targets) {
    if (!(targets.mean_descent_rate > 0.0) || !(targets.glide_ratio > 0.0) ||
        (targets.oscillation_period && !(*targets.oscillation_period > 0.0)) ||
        (targets.peak_limit && !(*targets.peak_limit > 0.0))) {
        throw DomainError("calibration targets must be positive");
    }
    if (setup.budget == 0) throw DomainError("calibration budget must be >= 1");
    const auto lo = as_array(setup.bounds.lower);
    const auto hi = as_array(setup.bounds.upper);
    auto x0 = as_array(setup.initial);
    for (std::size_t i = 0; i < kCount; ++i) {
        if (!(lo[i] <= hi[i])) throw DomainError("calibration bounds out of order");
        if (hi[i] > lo[i]) x0[i] = std::clamp(x0[i], lo[i], hi[i]);
    }
    validate(from_array(x0));

    // Search over the free coefficients in unit-box coordinates.
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < kCount; ++i) {
        if (hi[i] > lo[i]) free.push_back(i);
    }
    auto decode = [&](const std::vector<double>& u) {
        auto a = x0;
        for (std::size_t k = 0; k < free.size(); ++k) {
            const std::size_t i = free[k];
            a[i] = lo[i] + u[k] * (hi[i] - lo[i]);
        }
        return from_array(a);
    };

    Evaluation best = evaluate(setup, targets, from_array(x0));
    AeroCoefficients best_c = from_array(x0);
    std::size_t evaluations = 1;
    bool done = close_enough(best, targets, setup.stop_error) || free.empty();

    if (!done && setup.budget > 1) {
        std::vector<double> u0(free.size()), step(free.size(), 0.15), ulo(free.size(), 0.0),
            uhi(free.size(), 1.0);
        for (std::size_t k = 0; k < free.size(); ++k) {
            const std::size_t i = free[k];
            u0[k] = (x0[i] - lo[i]) / (hi[i] - lo[i]);
        }
        numerics::NelderMeadOptions opt;
        opt.max_evaluations = setup.budget - 1;
        opt.f_tolerance = 1e-12;
        opt.x_tolerance = 1e-6;
        opt.target_value = 0.0;
        bool stop = false;
        auto objective = [&](const std::vector<double>& u) {
            if (stop) return static_cast<double>(INFINITY);
            const AeroCoefficients c = decode(u);
            const Evaluation e = evaluate(setup, targets, c);
            ++evaluations;
            if (e.value < best.value) {
                best = e;
                best_c = c;
            }
            if (close_enough(best, targets, setup.stop_error)) stop = true;
            return e.value;
        };
        opt.should_stop = [&] { return stop; };
        numerics::nelder_mead(objective, u0, step, ulo, uhi, opt);
    }

    CalibrationResult r;
    r.coeffs = best_c;
    r.residual = best.value;
    r.descent_error = best.descent_error;
    r.glide_error = best.glide_error;
    r.period_error = best.period_error;
    r.metrics = best.metrics;
    r.evaluations = evaluations;
    r.tumbling = best.tumbling;
    r.success = best.landed && best.tumbling;
    std::ostringstream os;
    if (!best.landed) {
        os << "calibration failed: no candidate reached the water; best residual " << best.value;
    } else if (!best.tumbling) {
        os << "calibration failed: no tumbling descent within bounds; best residual " << best.value;
    } else {
        os << "residual " << best.value << " (descent " << 100.0 * best.descent_error << "%, glide "
           << 100.0 * best.glide_error << "%) after " << evaluations << " evaluations";
    }
    r.report = os.str();
    return r;
}

}  // namespace tumblerpod::aero
