#include "hawkes/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <span>

#include "hawkes/parallel.hpp"
#include "hawkes/rng.hpp"
#include "optim.hpp"

namespace hawkes {

const char* to_string(FitMethod method) {
    switch (method) {
        case FitMethod::Nonlinear: return "nonlinear";
        case FitMethod::Grid: return "grid";
        case FitMethod::Smbo: return "smbo";
        case FitMethod::Em: return "em";
    }
    return "unknown";
}

FitMethod fit_method_from_string(const std::string& name) {
    if (name == "nonlinear") return FitMethod::Nonlinear;
    if (name == "grid") return FitMethod::Grid;
    if (name == "smbo") return FitMethod::Smbo;
    if (name == "em") return FitMethod::Em;
    fail(ErrorCode::InvalidArgument, "unknown fit method '" + name + "'");
}

void validate_config(const FitConfig& config) {
    if (!(config.beta_lo > 0.0) || !(config.beta_lo < config.beta_hi)) {
        fail(ErrorCode::InvalidArgument, "need 0 < beta_lo < beta_hi");
    }
    if (config.budget < 1) fail(ErrorCode::InvalidArgument, "smbo budget must be >= 1");
    if (config.grid.count < 2) fail(ErrorCode::InvalidArgument, "grid count must be >= 2");
    if (!(config.em.tol > 0.0)) fail(ErrorCode::InvalidArgument, "em tol must be > 0");
    if (!(config.init > 0.0)) fail(ErrorCode::InvalidArgument, "init beta must be > 0");
}

std::vector<double> make_log_grid(const GridSpec& spec) {
    std::vector<double> grid(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        const double u = spec.count == 1
                             ? spec.log10_lo
                             : spec.log10_lo + (spec.log10_hi - spec.log10_lo) *
                                                   static_cast<double>(i) /
                                                   static_cast<double>(spec.count - 1);
        grid[i] = std::pow(10.0, u);
    }
    return grid;
}

namespace {

using StreamSpan = std::span<const EventStream>;

double horizon_of(const EventStream& stream, HorizonMode mode) {
    return mode == HorizonMode::LastEvent ? stream.last_time() : stream.horizon;
}

void require_fittable(StreamSpan streams) {
    if (streams.empty()) fail(ErrorCode::EmptyInput, "no realizations to fit");
    for (const auto& s : streams) {
        if (s.size() >= 2) return;
    }
    fail(ErrorCode::InsufficientData,
         "decay is not identifiable: no realization has two or more events");
}

// ---------------------------------------------------------------------------
// Sufficient statistics of the convex (mu, alpha) subproblem at a fixed
// shared decay: per event of dimension p the kernel sums R_q, and per
// dimension the compensator totals.
// ---------------------------------------------------------------------------

struct ConvexStats {
    std::size_t dims = 0;
    double horizon_sum = 0.0;
    std::vector<double> comp;                 // per q: sum of 1 - exp(-beta (H - t_j))
    std::vector<std::vector<double>> rows;    // per p: n_p x dims kernel sums, row-major
    std::vector<std::size_t> counts;          // per p

    explicit ConvexStats(std::size_t m) : dims(m), comp(m, 0.0), rows(m), counts(m, 0) {}

    void append_stream(const EventStream& stream, double beta, HorizonMode mode) {
        const double horizon = horizon_of(stream, mode);
        horizon_sum += horizon;
        std::vector<double> state(dims, 0.0);
        double prev_t = 0.0;
        for (const Event& e : stream.events) {
            const double decay = std::exp(-beta * (e.t - prev_t));
            for (auto& s : state) s *= decay;
            auto& block = rows[e.dim];
            block.insert(block.end(), state.begin(), state.end());
            ++counts[e.dim];
            state[e.dim] += 1.0;
            comp[e.dim] += 1.0 - std::exp(-beta * (horizon - e.t));
            prev_t = e.t;
        }
    }
};

ConvexStats build_stats(StreamSpan streams, double beta, std::size_t dims, HorizonMode mode) {
    ConvexStats stats(dims);
    for (const auto& s : streams) stats.append_stream(s, beta, mode);
    return stats;
}

// Minimizes the negated block objective for dimension p over
// x = (mu_p, alpha_p1..alpha_pM) >= 0.
optim::Result solve_block(const ConvexStats& stats, double beta, std::size_t p,
                          std::vector<double> x0) {
    const std::size_t m = stats.dims;
    const auto& rows = stats.rows[p];
    const std::size_t n = stats.counts[p];
    const double horizon = stats.horizon_sum;
    const std::vector<double>& comp = stats.comp;

    const optim::GradObjective objective = [&](const std::vector<double>& x,
                                               std::vector<double>& grad) {
        const double mu = x[0];
        double value = mu * horizon;
        grad.assign(m + 1, 0.0);
        grad[0] = horizon;
        for (std::size_t q = 0; q < m; ++q) {
            value += x[q + 1] * comp[q] / beta;
            grad[q + 1] = comp[q] / beta;
        }
        const double* row = rows.data();
        for (std::size_t i = 0; i < n; ++i, row += m) {
            double lambda = mu;
            for (std::size_t q = 0; q < m; ++q) lambda += x[q + 1] * row[q];
            if (lambda <= 0.0) return optim::kInf;
            const double inv = 1.0 / lambda;
            value -= std::log(lambda);
            grad[0] -= inv;
            for (std::size_t q = 0; q < m; ++q) grad[q + 1] -= row[q] * inv;
        }
        return value;
    };

    const std::vector<double> lo(m + 1, 0.0), hi(m + 1, 1e12);
    return optim::spg_box_minimize(objective, std::move(x0), lo, hi);
}

struct ConvexFit {
    std::vector<double> mu;
    Matrix alpha;
    double loglik = 0.0;
    bool converged = true;
};

ConvexFit solve_mu_alpha(const ConvexStats& stats, double beta,
                         const ConvexFit* warm = nullptr) {
    const std::size_t m = stats.dims;
    ConvexFit fit;
    fit.mu.assign(m, 0.0);
    fit.alpha.assign(m, std::vector<double>(m, 0.0));
    double total = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
        std::vector<double> x0(m + 1, 0.1);
        x0[0] = stats.horizon_sum > 0.0
                    ? std::max(1e-8, 0.5 * static_cast<double>(stats.counts[p]) / stats.horizon_sum)
                    : 0.1;
        if (warm) {
            x0[0] = std::max(warm->mu[p], 1e-10);
            for (std::size_t q = 0; q < m; ++q) x0[q + 1] = std::max(warm->alpha[p][q], 0.0);
        }
        auto res = solve_block(stats, beta, p, std::move(x0));
        fit.mu[p] = res.x[0];
        for (std::size_t q = 0; q < m; ++q) fit.alpha[p][q] = res.x[q + 1];
        fit.converged = fit.converged && res.converged;
        total -= res.value;
    }
    fit.loglik = total;
    return fit;
}

// ---------------------------------------------------------------------------
// Fast unvalidated pooled log-likelihood used inside optimizers (inputs are
// validated once up front).
// ---------------------------------------------------------------------------

double uni_loglik_fast(double mu, double alpha, double beta, const EventStream& stream,
                       HorizonMode mode) {
    const double horizon = horizon_of(stream, mode);
    double comp = 0.0, terms = 0.0, a = 0.0, prev = 0.0;
    bool first = true;
    for (const Event& e : stream.events) {
        if (!first) a = std::exp(-beta * (e.t - prev)) * (1.0 + a);
        const double lambda = mu + alpha * a;
        if (lambda <= 0.0) return -optim::kInf;
        terms += std::log(lambda);
        comp += 1.0 - std::exp(-beta * (horizon - e.t));
        prev = e.t;
        first = false;
    }
    return -mu * horizon - (alpha / beta) * comp + terms;
}

double multi_loglik_fast(const std::vector<double>& mu, const Matrix& alpha, double beta,
                         const EventStream& stream, HorizonMode mode) {
    const std::size_t m = mu.size();
    const double horizon = horizon_of(stream, mode);
    std::vector<double> state(m, 0.0);
    double prev = 0.0, terms = 0.0, comp = 0.0;
    for (double mu_p : mu) comp += mu_p * horizon;
    for (const Event& e : stream.events) {
        const double decay = std::exp(-beta * (e.t - prev));
        for (auto& s : state) s *= decay;
        double lambda = mu[e.dim];
        for (std::size_t q = 0; q < m; ++q) lambda += alpha[e.dim][q] * state[q];
        if (lambda <= 0.0) return -optim::kInf;
        terms += std::log(lambda);
        const double tail = (1.0 - std::exp(-beta * (horizon - e.t))) / beta;
        for (std::size_t p = 0; p < m; ++p) comp += alpha[p][e.dim] * tail;
        state[e.dim] += 1.0;
        prev = e.t;
    }
    return terms - comp;
}

double pooled_loglik(StreamSpan streams, const std::vector<double>& mu, const Matrix& alpha,
                     double beta, HorizonMode mode) {
    double total = 0.0;
    if (mu.size() == 1) {
        for (const auto& s : streams) {
            total += uni_loglik_fast(mu[0], alpha[0][0], beta, s, mode);
            if (!std::isfinite(total)) return -optim::kInf;
        }
    } else {
        for (const auto& s : streams) {
            total += multi_loglik_fast(mu, alpha, beta, s, mode);
            if (!std::isfinite(total)) return -optim::kInf;
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Profile objective with solution cache: evaluating a new beta warm-starts
// the convex fit from the nearest previously solved decay.
// ---------------------------------------------------------------------------

class ProfileObjective {
  public:
    ProfileObjective(StreamSpan streams, std::size_t dims, HorizonMode mode)
        : streams_(streams), dims_(dims), mode_(mode) {}

    const ConvexFit& evaluate(double beta) {
        const double z = std::log(beta);
        const ConvexFit* warm = nullptr;
        double best_dist = optim::kInf;
        for (const auto& entry : cache_) {
            const double dist = std::abs(entry.first - z);
            if (dist < best_dist) {
                best_dist = dist;
                warm = &entry.second;
            }
        }
        ConvexStats stats = build_stats(streams_, beta, dims_, mode_);
        cache_.emplace_back(z, solve_mu_alpha(stats, beta, warm));
        return cache_.back().second;
    }

  private:
    StreamSpan streams_;
    std::size_t dims_;
    HorizonMode mode_;
    std::vector<std::pair<double, ConvexFit>> cache_;
};

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::size_t total_events(StreamSpan streams, std::size_t dim, std::size_t dims,
                         std::vector<std::size_t>* per_dim = nullptr) {
    std::vector<std::size_t> counts(dims, 0);
    for (const auto& s : streams) {
        for (const Event& e : s.events) ++counts[e.dim];
    }
    if (per_dim) *per_dim = counts;
    return dim < dims ? counts[dim] : std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

// ---------------------------------------------------------------------------
// Nonlinear joint fit
// ---------------------------------------------------------------------------

struct NonlinearOptions {
    std::size_t extra_starts = 3;
    const std::vector<double>* init_point = nullptr;  // full coordinate vector
};

FitResult nonlinear_impl(StreamSpan streams, std::size_t dims, const FitConfig& config,
                         const NonlinearOptions& options) {
    Timer timer;
    const std::size_t nvar = dims + dims * dims + 1;
    std::vector<double> lo(nvar, 0.0), hi(nvar, 1e6);
    lo[nvar - 1] = config.beta_lo;
    hi[nvar - 1] = config.beta_hi;

    double horizon_sum = 0.0;
    for (const auto& s : streams) horizon_sum += horizon_of(s, config.horizon_mode);
    std::vector<std::size_t> per_dim;
    total_events(streams, dims, dims, &per_dim);

    const auto unpack = [&](const std::vector<double>& x, std::vector<double>& mu,
                            Matrix& alpha) {
        mu.assign(x.begin(), x.begin() + dims);
        for (std::size_t p = 0; p < dims; ++p) {
            alpha[p].assign(x.begin() + dims + p * dims, x.begin() + dims + (p + 1) * dims);
        }
    };

    std::vector<double> mu_buf(dims);
    Matrix alpha_buf(dims, std::vector<double>(dims, 0.0));
    const optim::ValueObjective objective = [&](const std::vector<double>& x) {
        unpack(x, mu_buf, alpha_buf);
        const double ll = pooled_loglik(streams, mu_buf, alpha_buf, x[nvar - 1],
                                        config.horizon_mode);
        return -ll;
    };

    std::vector<double> base(nvar);
    if (options.init_point) {
        base = *options.init_point;
    } else {
        const double beta0 = std::clamp(config.init, config.beta_lo, config.beta_hi);
        for (std::size_t p = 0; p < dims; ++p) {
            base[p] = std::max(1e-6, 0.5 * static_cast<double>(per_dim[p]) /
                                         std::max(horizon_sum, 1e-12));
        }
        for (std::size_t i = dims; i + 1 < nvar; ++i) {
            base[i] = 0.25 * beta0 / static_cast<double>(dims);
        }
        base[nvar - 1] = beta0;
    }
    optim::project(base, lo, hi);

    Rng rng(config.seed);
    std::vector<std::vector<double>> starts{base};
    const std::size_t extra = options.init_point ? options.extra_starts : config.extra_starts;
    for (std::size_t k = 0; k < extra; ++k) {
        std::vector<double> start = base;
        for (std::size_t i = 0; i + 1 < nvar; ++i) {
            start[i] = std::max(start[i], 1e-6) * std::exp(0.5 * rng.normal());
        }
        start[nvar - 1] = std::max(start[nvar - 1], config.beta_lo) * std::exp(0.7 * rng.normal());
        optim::project(start, lo, hi);
        starts.push_back(std::move(start));
    }

    optim::Result best;
    for (const auto& start : starts) {
        auto res = optim::lbfgs_box_minimize(objective, start, lo, hi);
        if (res.value < best.value) best = std::move(res);
    }

    FitResult fit;
    fit.method = to_string(FitMethod::Nonlinear);
    fit.mu.resize(dims);
    fit.alpha.assign(dims, std::vector<double>(dims, 0.0));
    unpack(best.x, fit.mu, fit.alpha);
    fit.beta = best.x[nvar - 1];
    fit.loglik = -best.value;
    fit.converged = best.converged;
    fit.bound_hit = fit.beta <= config.beta_lo * (1.0 + 1e-8) ||
                    fit.beta >= config.beta_hi * (1.0 - 1e-8);
    fit.runtime_seconds = timer.seconds();
    return fit;
}

FitResult grid_impl(StreamSpan streams, std::size_t dims, const FitConfig& config) {
    Timer timer;
    const std::vector<double> grid = make_log_grid(config.grid);
    ProfileObjective profile(streams, dims, config.horizon_mode);
    FitResult fit;
    fit.method = to_string(FitMethod::Grid);
    double best = -optim::kInf;
    for (double beta : grid) {
        const ConvexFit& inner = profile.evaluate(beta);
        if (inner.loglik > best) {  // strict: ties stay at the smaller beta
            best = inner.loglik;
            fit.beta = beta;
            fit.mu = inner.mu;
            fit.alpha = inner.alpha;
            fit.loglik = inner.loglik;
            fit.converged = inner.converged;
        }
    }
    fit.bound_hit = fit.beta == grid.front() || fit.beta == grid.back();
    fit.runtime_seconds = timer.seconds();
    return fit;
}

double van_der_corput(std::size_t i) {
    double result = 0.0, f = 0.5;
    for (std::size_t n = i; n > 0; n >>= 1U) {
        if (n & 1U) result += f;
        f *= 0.5;
    }
    return result;
}

FitResult smbo_impl(StreamSpan streams, std::size_t dims, const FitConfig& config) {
    Timer timer;
    const double zlo = std::log(config.beta_lo);
    const double zhi = std::log(config.beta_hi);
    ProfileObjective profile(streams, dims, config.horizon_mode);
    Rng rng(config.seed);

    struct Point {
        double z;
        double value;
        ConvexFit fit;
    };
    std::vector<Point> evaluated;
    const auto eval_at = [&](double z) {
        const double beta = std::exp(z);
        const ConvexFit& inner = profile.evaluate(beta);
        evaluated.push_back({z, inner.loglik, inner});
    };

    const std::size_t n_init = std::min<std::size_t>(10, config.budget);
    for (std::size_t i = 1; i <= n_init; ++i) {
        eval_at(zlo + van_der_corput(i) * (zhi - zlo));
    }

    // Proposals are draws from a kernel mixture over the top quartile of
    // evaluated points. Component bandwidths follow the nearest good
    // neighbor so isolated promising points keep wide kernels, and every
    // fourth proposal is uniform over the range.
    const double range = zhi - zlo;
    std::size_t proposal_index = 0;
    while (evaluated.size() < config.budget) {
        std::vector<std::size_t> order(evaluated.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return evaluated[a].value > evaluated[b].value;
        });
        const std::size_t n_good =
            std::max<std::size_t>(1, (evaluated.size() + 3) / 4);  // top quartile
        std::vector<double> good;
        for (std::size_t i = 0; i < n_good; ++i) good.push_back(evaluated[order[i]].z);

        double z;
        if (++proposal_index % 4 == 0) {
            z = zlo + rng.uniform() * range;
        } else {
            const std::size_t pick = rng.index(good.size());
            double bw = 0.25 * range;
            for (std::size_t i = 0; i < good.size(); ++i) {
                if (i != pick) bw = std::min(bw, std::abs(good[i] - good[pick]));
            }
            bw = std::max(bw, 0.02 * range);
            z = std::clamp(good[pick] + bw * rng.normal(), zlo, zhi);
        }
        eval_at(z);
    }

    const auto best = std::max_element(
        evaluated.begin(), evaluated.end(),
        [](const Point& a, const Point& b) { return a.value < b.value; });

    FitResult fit;
    fit.method = to_string(FitMethod::Smbo);
    fit.beta = std::exp(best->z);
    fit.mu = best->fit.mu;
    fit.alpha = best->fit.alpha;
    fit.loglik = best->value;
    fit.converged = best->fit.converged;
    fit.bound_hit = best->z <= zlo + 1e-12 || best->z >= zhi - 1e-12;
    fit.runtime_seconds = timer.seconds();
    return fit;
}

// ---------------------------------------------------------------------------
// Branching-structure EM (shared decay). The objective tracked for
// monotonicity is the edge-effect-free likelihood the closed-form M-steps
// maximize: sum_i log lambda(t_i) - sum_p mu_p H - sum_{p,q} alpha_pq n_q / beta.
// ---------------------------------------------------------------------------

struct EmState {
    std::vector<double> mu;
    Matrix alpha;
    double beta;
};

FitResult em_impl(StreamSpan streams, std::size_t dims, const FitConfig& config,
                  const EmState* warm) {
    Timer timer;
    double horizon_sum = 0.0;
    for (const auto& s : streams) horizon_sum += horizon_of(s, config.horizon_mode);
    std::vector<std::size_t> per_dim;
    const std::size_t n_total = total_events(streams, dims, dims, &per_dim);

    EmState state;
    if (warm) {
        state = *warm;
    } else {
        const double beta0 = std::clamp(config.init, config.beta_lo, config.beta_hi);
        state.beta = beta0;
        state.mu.resize(dims);
        for (std::size_t p = 0; p < dims; ++p) {
            state.mu[p] = std::max(1e-8, 0.5 * static_cast<double>(per_dim[p]) / horizon_sum);
        }
        state.alpha.assign(dims, std::vector<double>(dims, 0.25 * beta0 / static_cast<double>(dims)));
    }

    FitResult fit;
    fit.method = to_string(FitMethod::Em);
    fit.converged = false;

    double prev_objective = -optim::kInf;
    for (std::size_t iter = 0; iter < config.em.max_iters; ++iter) {
        // E-step with pair cutoff where the kernel is numerically zero.
        const double window = 37.0 / state.beta;
        std::vector<double> background(dims, 0.0);
        Matrix pair_mass(dims, std::vector<double>(dims, 0.0));
        double pair_total = 0.0, pair_weighted_dt = 0.0;
        double objective = 0.0;
        for (const auto& s : streams) {
            const auto& events = s.events;
            for (std::size_t i = 0; i < events.size(); ++i) {
                const std::size_t p = events[i].dim;
                double lambda = state.mu[p];
                for (std::size_t j = i; j-- > 0;) {
                    const double dt = events[i].t - events[j].t;
                    if (dt > window) break;
                    lambda += state.alpha[p][events[j].dim] * std::exp(-state.beta * dt);
                }
                if (lambda <= 0.0) lambda = 1e-300;
                objective += std::log(lambda);
                background[p] += state.mu[p] / lambda;
                for (std::size_t j = i; j-- > 0;) {
                    const double dt = events[i].t - events[j].t;
                    if (dt > window) break;
                    const std::size_t q = events[j].dim;
                    const double w = state.alpha[p][q] * std::exp(-state.beta * dt) / lambda;
                    pair_mass[p][q] += w;
                    pair_total += w;
                    pair_weighted_dt += w * dt;
                }
            }
        }
        for (std::size_t p = 0; p < dims; ++p) {
            objective -= state.mu[p] * horizon_sum;
            for (std::size_t q = 0; q < dims; ++q) {
                objective -= state.alpha[p][q] * static_cast<double>(per_dim[q]) / state.beta;
            }
        }

        if (iter > 0) {
            if (objective < prev_objective - 1e-10 * std::max(1.0, std::abs(prev_objective))) {
                fail(ErrorCode::LikelihoodDecrease,
                     "EM objective decreased from " + std::to_string(prev_objective) + " to " +
                         std::to_string(objective));
            }
            if (std::abs(objective - prev_objective) <=
                config.em.tol * std::max(1.0, std::abs(prev_objective))) {
                fit.converged = true;
                prev_objective = objective;
                break;
            }
        }
        prev_objective = objective;

        // Closed-form M-step.
        for (std::size_t p = 0; p < dims; ++p) state.mu[p] = background[p] / horizon_sum;
        double beta_new = state.beta;
        if (pair_weighted_dt > 0.0 && pair_total > 0.0) {
            beta_new = pair_total / pair_weighted_dt;
        }
        const double beta_clamped = std::clamp(beta_new, config.beta_lo, config.beta_hi);
        for (std::size_t p = 0; p < dims; ++p) {
            for (std::size_t q = 0; q < dims; ++q) {
                state.alpha[p][q] =
                    per_dim[q] > 0
                        ? beta_clamped * pair_mass[p][q] / static_cast<double>(per_dim[q])
                        : 0.0;
            }
        }
        state.beta = beta_clamped;
        if (beta_clamped != beta_new) {
            // Box became active; the monotone guarantee no longer applies.
            fit.bound_hit = true;
            break;
        }
    }

    fit.mu = state.mu;
    fit.alpha = state.alpha;
    fit.beta = state.beta;
    fit.loglik = pooled_loglik(streams, state.mu, state.alpha, state.beta, config.horizon_mode);
    fit.runtime_seconds = timer.seconds();
    return fit;
}

FitResult dispatch_fit(StreamSpan streams, std::size_t dims, const FitConfig& config) {
    switch (config.method) {
        case FitMethod::Nonlinear: return nonlinear_impl(streams, dims, config, {});
        case FitMethod::Grid: return grid_impl(streams, dims, config);
        case FitMethod::Smbo: return smbo_impl(streams, dims, config);
        case FitMethod::Em: return em_impl(streams, dims, config, nullptr);
    }
    fail(ErrorCode::InvalidArgument, "unknown fit method");
}

void prepare(StreamSpan streams, std::size_t dims, const FitConfig& config) {
    validate_config(config);
    if (streams.empty()) fail(ErrorCode::EmptyInput, "no realizations to fit");
    for (const auto& s : streams) validate_stream(s, dims);
    require_fittable(streams);
}

} // namespace

MuAlphaFit fit_mu_alpha(const RealizationSet& realizations, double beta, std::size_t dims,
                        HorizonMode horizon_mode) {
    if (!(beta > 0.0)) fail(ErrorCode::NegativeRate, "beta must be positive");
    if (realizations.empty()) fail(ErrorCode::EmptyInput, "no realizations to fit");
    for (const auto& s : realizations) validate_stream(s, dims);
    const ConvexStats stats =
        build_stats(StreamSpan(realizations), beta, dims, horizon_mode);
    const ConvexFit fit = solve_mu_alpha(stats, beta);
    return {fit.mu, fit.alpha, fit.loglik, fit.converged};
}

FitResult fit_decay_nonlinear(const RealizationSet& realizations, std::size_t dims,
                              const FitConfig& config) {
    prepare(StreamSpan(realizations), dims, config);
    return nonlinear_impl(StreamSpan(realizations), dims, config, {});
}

FitResult fit_decay_grid(const RealizationSet& realizations, std::size_t dims,
                         const FitConfig& config) {
    prepare(StreamSpan(realizations), dims, config);
    return grid_impl(StreamSpan(realizations), dims, config);
}

FitResult fit_decay_smbo(const RealizationSet& realizations, std::size_t dims,
                         const FitConfig& config) {
    prepare(StreamSpan(realizations), dims, config);
    return smbo_impl(StreamSpan(realizations), dims, config);
}

FitResult fit_decay_em(const RealizationSet& realizations, std::size_t dims,
                       const FitConfig& config) {
    prepare(StreamSpan(realizations), dims, config);
    return em_impl(StreamSpan(realizations), dims, config, nullptr);
}

FitResult fit_decay(const RealizationSet& realizations, std::size_t dims,
                    const FitConfig& config) {
    prepare(StreamSpan(realizations), dims, config);
    return dispatch_fit(StreamSpan(realizations), dims, config);
}

DecayEstimates sequential_estimates(const RealizationSet& realizations, std::size_t dims,
                                    const FitConfig& config, SequentialMode mode) {
    prepare(StreamSpan(realizations), dims, config);
    const std::size_t n = realizations.size();
    DecayEstimates out;
    out.method = to_string(config.method);
    out.values.resize(n);
    out.realization_counts.resize(n);

    if (mode == SequentialMode::Iid) {
        for (std::size_t k = 0; k < n; ++k) {
            if (realizations[k].size() < 2) {
                fail(ErrorCode::InsufficientData,
                     "iid sequential fitting: realization " + std::to_string(k) +
                         " has fewer than two events");
            }
        }
        if (config.method == FitMethod::Nonlinear && config.warm_start) {
            // Streaming reading of the per-realization protocol: each fit
            // starts from the previous realization's optimum.
            std::vector<double> warm_point;
            for (std::size_t k = 0; k < n; ++k) {
                FitConfig local = config;
                local.seed = config.seed + k;
                StreamSpan one(&realizations[k], 1);
                NonlinearOptions opts;
                opts.extra_starts = config.extra_starts;
                if (k > 0) opts.init_point = &warm_point;
                const FitResult fit = nonlinear_impl(one, dims, local, opts);
                warm_point.assign(fit.mu.begin(), fit.mu.end());
                for (const auto& row : fit.alpha) {
                    warm_point.insert(warm_point.end(), row.begin(), row.end());
                }
                warm_point.push_back(fit.beta);
                out.values[k] = fit.beta;
                out.realization_counts[k] = 1;
            }
            return out;
        }
        parallel_for(n, [&](std::size_t k) {
            FitConfig local = config;
            local.seed = config.seed + k;
            StreamSpan one(&realizations[k], 1);
            out.values[k] = dispatch_fit(one, dims, local).beta;
            out.realization_counts[k] = 1;
        });
        return out;
    }

    // Pooled mode: grow the data one realization at a time. Grid fits reuse
    // accumulated per-beta statistics; the other methods chain warm starts.
    if (config.method == FitMethod::Grid) {
        const std::vector<double> grid = make_log_grid(config.grid);
        std::vector<ConvexStats> stats(grid.size(), ConvexStats(dims));
        std::vector<ConvexFit> warm(grid.size());
        std::vector<bool> has_warm(grid.size(), false);
        for (std::size_t k = 0; k < n; ++k) {
            double best = -optim::kInf;
            double best_beta = grid.front();
            for (std::size_t g = 0; g < grid.size(); ++g) {
                stats[g].append_stream(realizations[k], grid[g], config.horizon_mode);
                ConvexFit fit = solve_mu_alpha(stats[g], grid[g],
                                               has_warm[g] && config.warm_start ? &warm[g]
                                                                                : nullptr);
                if (fit.loglik > best) {
                    best = fit.loglik;
                    best_beta = grid[g];
                }
                warm[g] = std::move(fit);
                has_warm[g] = true;
            }
            out.values[k] = best_beta;
            out.realization_counts[k] = k + 1;
        }
        return out;
    }

    std::vector<double> warm_point;
    EmState em_warm;
    bool have_warm = false;
    for (std::size_t k = 0; k < n; ++k) {
        StreamSpan pooled(realizations.data(), k + 1);
        FitConfig local = config;
        local.seed = config.seed + k;
        FitResult fit;
        switch (config.method) {
            case FitMethod::Nonlinear: {
                NonlinearOptions opts;
                if (have_warm && config.warm_start) {
                    opts.init_point = &warm_point;
                    opts.extra_starts = 1;
                }
                fit = nonlinear_impl(pooled, dims, local, opts);
                warm_point.assign(fit.mu.begin(), fit.mu.end());
                for (const auto& row : fit.alpha) {
                    warm_point.insert(warm_point.end(), row.begin(), row.end());
                }
                warm_point.push_back(fit.beta);
                have_warm = true;
                break;
            }
            case FitMethod::Em: {
                fit = em_impl(pooled, dims, local,
                              have_warm && config.warm_start ? &em_warm : nullptr);
                em_warm = {fit.mu, fit.alpha, fit.beta};
                have_warm = true;
                break;
            }
            case FitMethod::Smbo:
                fit = smbo_impl(pooled, dims, local);
                break;
            case FitMethod::Grid:
                break;  // handled above
        }
        out.values[k] = fit.beta;
        out.realization_counts[k] = k + 1;
    }
    return out;
}

} // namespace hawkes
