#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

// Small dense box-constrained solvers shared by the fitting routines.
// Everything minimizes; callers negate log-likelihoods.

namespace hawkes::optim {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Result {
    std::vector<double> x;
    double value = kInf;
    bool converged = false;
    std::size_t iterations = 0;
};

// Objective with analytic gradient: returns f(x), fills grad.
using GradObjective = std::function<double(const std::vector<double>&, std::vector<double>&)>;
// Value-only objective (gradients by finite differences).
using ValueObjective = std::function<double(const std::vector<double>&)>;

inline void project(std::vector<double>& x, const std::vector<double>& lo,
                    const std::vector<double>& hi) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

inline double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct SpgOptions {
    std::size_t max_iterations = 5000;
    double relative_tolerance = 1e-9;
    double step_floor = 1e-12;
    double step_ceil = 1e12;
};

// Spectral projected gradient (Barzilai-Borwein step with Armijo
// backtracking) over the box [lo, hi]. Suited to the concave
// baseline/excitation subproblem where gradients are cheap.
inline Result spg_box_minimize(const GradObjective& objective, std::vector<double> x,
                               const std::vector<double>& lo, const std::vector<double>& hi,
                               const SpgOptions& opts = {}) {
    const std::size_t n = x.size();
    project(x, lo, hi);
    std::vector<double> grad(n), grad_new(n), trial(n), direction(n);
    double value = objective(x, grad);
    double step = 1.0 / std::max(1.0, inf_norm(grad));

    Result result;
    for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
        result.iterations = iter + 1;
        for (std::size_t i = 0; i < n; ++i) {
            direction[i] = std::clamp(x[i] - step * grad[i], lo[i], hi[i]) - x[i];
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += grad[i] * direction[i];
        if (inf_norm(direction) <= 1e-14 * (1.0 + inf_norm(x)) || slope >= 0.0) {
            result.converged = true;
            break;
        }

        double t = 1.0;
        double trial_value = kInf;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + t * direction[i];
            trial_value = objective(trial, grad_new);
            if (std::isfinite(trial_value) && trial_value <= value + 1e-4 * t * slope) break;
            t *= 0.5;
        }
        if (!std::isfinite(trial_value) || trial_value > value) {
            result.converged = inf_norm(direction) <= 1e-8 * (1.0 + inf_norm(x));
            break;
        }

        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = t * direction[i];
            const double y = grad_new[i] - grad[i];
            ss += s * s;
            sy += s * y;
        }
        step = sy > 0.0 ? std::clamp(ss / sy, opts.step_floor, opts.step_ceil) : opts.step_ceil;

        const double improvement = value - trial_value;
        for (std::size_t i = 0; i < n; ++i) x[i] += t * direction[i];
        grad.swap(grad_new);
        const bool done = improvement <= opts.relative_tolerance * std::max(1.0, std::abs(value));
        value = trial_value;
        if (done) {
            result.converged = true;
            break;
        }
    }
    result.x = std::move(x);
    result.value = value;
    return result;
}

struct LbfgsOptions {
    std::size_t max_iterations = 300;
    std::size_t memory = 8;
    double relative_fd_step = 1e-6;  // central differences
    double gradient_tolerance = 1e-7;
    double relative_tolerance = 1e-10;
};

// Box-constrained limited-memory quasi-Newton with finite-difference
// gradients: descent directions from the two-loop recursion, iterates kept
// feasible by projected backtracking.
inline Result lbfgs_box_minimize(const ValueObjective& objective, std::vector<double> x,
                                 const std::vector<double>& lo, const std::vector<double>& hi,
                                 const LbfgsOptions& opts = {}) {
    const std::size_t n = x.size();
    project(x, lo, hi);

    const auto fd_gradient = [&](const std::vector<double>& at, double f_at,
                                 std::vector<double>& grad) {
        std::vector<double> probe = at;
        for (std::size_t i = 0; i < n; ++i) {
            const double h = opts.relative_fd_step * std::max(std::abs(at[i]), 1e-4);
            const double upper = std::min(at[i] + h, hi[i]);
            const double lower = std::max(at[i] - h, lo[i]);
            if (upper <= lower) {
                grad[i] = 0.0;
                continue;
            }
            probe[i] = upper;
            const double f_hi = objective(probe);
            probe[i] = lower;
            const double f_lo = objective(probe);
            probe[i] = at[i];
            if (std::isfinite(f_hi) && std::isfinite(f_lo)) {
                grad[i] = (f_hi - f_lo) / (upper - lower);
            } else if (std::isfinite(f_hi)) {
                grad[i] = (f_hi - f_at) / (upper - at[i]);
            } else if (std::isfinite(f_lo)) {
                grad[i] = (f_at - f_lo) / (at[i] - lower);
            } else {
                grad[i] = 0.0;
            }
        }
    };

    double value = objective(x);
    if (!std::isfinite(value)) return {std::move(x), value, false, 0};
    std::vector<double> grad(n);
    fd_gradient(x, value, grad);

    std::vector<std::vector<double>> s_hist, y_hist;
    std::vector<double> rho_hist;

    Result result;
    std::vector<double> direction(n), trial(n), grad_new(n);
    for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
        result.iterations = iter + 1;

        double pg = 0.0;  // projected gradient norm for stationarity
        for (std::size_t i = 0; i < n; ++i) {
            pg = std::max(pg, std::abs(std::clamp(x[i] - grad[i], lo[i], hi[i]) - x[i]));
        }
        if (pg <= opts.gradient_tolerance * std::max(1.0, std::abs(value))) {
            result.converged = true;
            break;
        }

        // Two-loop recursion.
        direction = grad;
        std::vector<double> alpha_coeff(s_hist.size());
        for (std::size_t k = s_hist.size(); k-- > 0;) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += s_hist[k][i] * direction[i];
            alpha_coeff[k] = rho_hist[k] * dot;
            for (std::size_t i = 0; i < n; ++i) direction[i] -= alpha_coeff[k] * y_hist[k][i];
        }
        if (!s_hist.empty()) {
            double sy = 0.0, yy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sy += s_hist.back()[i] * y_hist.back()[i];
                yy += y_hist.back()[i] * y_hist.back()[i];
            }
            const double scale = yy > 0.0 ? sy / yy : 1.0;
            for (auto& d : direction) d *= scale;
        }
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += y_hist[k][i] * direction[i];
            const double beta = rho_hist[k] * dot;
            for (std::size_t i = 0; i < n; ++i) direction[i] += (alpha_coeff[k] - beta) * s_hist[k][i];
        }
        for (auto& d : direction) d = -d;

        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += grad[i] * direction[i];
        if (slope >= 0.0) {  // not a descent direction; restart from steepest
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
        }

        double t = 1.0;
        double trial_value = kInf;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = std::clamp(x[i] + t * direction[i], lo[i], hi[i]);
            }
            double dgd = 0.0;
            for (std::size_t i = 0; i < n; ++i) dgd += grad[i] * (trial[i] - x[i]);
            trial_value = objective(trial);
            if (std::isfinite(trial_value) && trial_value <= value + 1e-4 * dgd && dgd < 0.0) {
                accepted = true;
                break;
            }
            t *= 0.5;
            if (t < 1e-14) break;
        }
        if (!accepted) {
            result.converged = pg <= 1e-5 * std::max(1.0, std::abs(value));
            break;
        }

        fd_gradient(trial, trial_value, grad_new);
        std::vector<double> s(n), yv(n);
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = trial[i] - x[i];
            yv[i] = grad_new[i] - grad[i];
            sy += s[i] * yv[i];
        }
        if (sy > 1e-14) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yv));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > opts.memory) {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
        }

        const double improvement = value - trial_value;
        x = trial;
        grad = grad_new;
        value = trial_value;
        if (improvement <= opts.relative_tolerance * std::max(1.0, std::abs(value))) {
            result.converged = true;
            break;
        }
    }
    result.x = std::move(x);
    result.value = value;
    return result;
}

} // namespace hawkes::optim
