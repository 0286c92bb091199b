#pragma once

// Derivative-free simplex minimiser (Nelder & Mead, standard coefficients)
// with box constraints handled by projecting trial points onto the box.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace tumblerpod::numerics {

struct NelderMeadOptions {
    std::size_t max_evaluations = 500;
    double f_tolerance = 1e-10;  // spread of simplex values
    double x_tolerance = 1e-8;   // simplex diameter
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    // Restart from the best vertex with a fresh simplex when the simplex
    // collapses before the budget is spent.
    bool restart = true;
    // Stop as soon as the best value drops to this level or the callback fires.
    double target_value = -INFINITY;
    std::function<bool()> should_stop;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

inline NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                                    const std::vector<double>& initial_step,
                                    const std::vector<double>& lower,
                                    const std::vector<double>& upper,
                                    const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    if (n == 0 || initial_step.size() != n || lower.size() != n || upper.size() != n) {
        throw std::invalid_argument("nelder_mead: dimension mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] <= upper[i])) throw std::invalid_argument("nelder_mead: bounds out of order");
    }

    auto project = [&](std::vector<double> x) {
        for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
        return x;
    };

    NelderMeadResult best;
    best.value = INFINITY;
    auto eval = [&](const std::vector<double>& x) {
        const double v = f(x);
        ++best.evaluations;
        const double vv = std::isnan(v) ? INFINITY : v;
        if (vv < best.value) {
            best.value = vv;
            best.x = x;
        }
        return vv;
    };
    auto budget_left = [&] {
        if (best.value <= opt.target_value) return false;
        if (opt.should_stop && opt.should_stop()) return false;
        return best.evaluations < opt.max_evaluations;
    };

    std::vector<std::vector<double>> simplex;
    std::vector<double> values;
    auto build = [&](const std::vector<double>& origin, double scale) {
        simplex.assign(1, project(origin));
        values.assign(1, eval(simplex[0]));
        for (std::size_t i = 0; i < n && budget_left(); ++i) {
            std::vector<double> v = simplex[0];
            v[i] += scale * initial_step[i];
            if (v[i] > upper[i]) v[i] = simplex[0][i] - scale * initial_step[i];
            v = project(v);
            simplex.push_back(v);
            values.push_back(eval(v));
        }
    };

    build(x0, 1.0);
    double scale = 1.0;
    while (budget_left()) {
        if (simplex.size() < n + 1) break;
        std::vector<std::size_t> order(n + 1);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        {
            std::vector<std::vector<double>> s2;
            std::vector<double> v2;
            for (auto k : order) {
                s2.push_back(simplex[k]);
                v2.push_back(values[k]);
            }
            simplex.swap(s2);
            values.swap(v2);
        }

        double diameter = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                diameter = std::max(diameter, std::abs(simplex[k][i] - simplex[0][i]));
            }
        }
        const bool collapsed = std::abs(values[n] - values[0]) <= opt.f_tolerance ||
                               diameter <= opt.x_tolerance;
        if (collapsed) {
            best.converged = true;
            if (!opt.restart || best.value <= opt.f_tolerance) break;
            scale *= 0.5;
            if (scale < 1e-3) break;
            build(best.x, scale);
            continue;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i] / static_cast<double>(n);
        }
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + t * (simplex[n][i] - centroid[i]);
            return project(p);
        };

        const auto xr = along(-opt.reflection);
        const double fr = eval(xr);
        if (fr < values[0]) {
            if (!budget_left()) break;
            const auto xe = along(-opt.reflection * opt.expansion);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if (fr < values[n - 1]) {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        if (!budget_left()) break;
        const bool outside = fr < values[n];
        const auto xc = outside ? along(-opt.reflection * opt.contraction) : along(opt.contraction);
        const double fc = eval(xc);
        if (fc < std::min(fr, values[n])) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for (std::size_t k = 1; k <= n && budget_left(); ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                simplex[k][i] = simplex[0][i] + opt.shrink * (simplex[k][i] - simplex[0][i]);
            }
            simplex[k] = project(simplex[k]);
            values[k] = eval(simplex[k]);
        }
    }
    return best;
}

}  // namespace tumblerpod::numerics
