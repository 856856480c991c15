#include "hawkes/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hawkes/rng.hpp"

namespace hawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double horizon_of(const EventStream& stream, const LoglikOptions& options) {
    return options.horizon_mode == HorizonMode::LastEvent ? stream.last_time() : stream.horizon;
}

void require_univariate(const HawkesParams& params) {
    if (params.dims() != 1) {
        fail(ErrorCode::ShapeMismatch, "univariate log-likelihood needs M = 1, got M = " +
                                           std::to_string(params.dims()));
    }
}

} // namespace

double loglik_uni(const HawkesParams& params, const EventStream& stream,
                  const LoglikOptions& options) {
    validate_or_throw(params);
    require_univariate(params);
    if (stream.empty()) fail(ErrorCode::EmptyStream, "log-likelihood of an empty stream");
    validate_stream(stream, 1);

    const double mu = params.mu[0];
    const double alpha = params.alpha[0][0];
    const double beta = params.beta.at(0, 0);
    const double horizon = horizon_of(stream, options);

    double compensator_excitation = 0.0;
    double event_terms = 0.0;
    double a = 0.0;  // A(1) = 0
    double prev_t = 0.0;
    bool first = true;
    for (const Event& e : stream.events) {
        if (!first) a = std::exp(-beta * (e.t - prev_t)) * (1.0 + a);
        const double lambda = mu + alpha * a;
        if (lambda <= 0.0) return kNegInf;
        event_terms += std::log(lambda);
        compensator_excitation += 1.0 - std::exp(-beta * (horizon - e.t));
        prev_t = e.t;
        first = false;
    }
    return -mu * horizon - (alpha / beta) * compensator_excitation + event_terms;
}

double loglik_uni_naive(const HawkesParams& params, const EventStream& stream,
                        const LoglikOptions& options) {
    validate_or_throw(params);
    require_univariate(params);
    if (stream.empty()) fail(ErrorCode::EmptyStream, "log-likelihood of an empty stream");
    validate_stream(stream, 1);

    const double mu = params.mu[0];
    const double alpha = params.alpha[0][0];
    const double beta = params.beta.at(0, 0);
    const double horizon = horizon_of(stream, options);
    const auto& events = stream.events;

    double compensator_excitation = 0.0;
    double event_terms = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        double a = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            a += std::exp(-beta * (events[i].t - events[j].t));
        }
        const double lambda = mu + alpha * a;
        if (lambda <= 0.0) return kNegInf;
        event_terms += std::log(lambda);
        compensator_excitation += 1.0 - std::exp(-beta * (horizon - events[i].t));
    }
    return -mu * horizon - (alpha / beta) * compensator_excitation + event_terms;
}

double loglik_multi(const HawkesParams& params, const EventStream& stream,
                    const LoglikOptions& options) {
    validate_or_throw(params);
    const std::size_t dims = params.dims();
    if (dims == 1) return loglik_uni(params, stream, options);
    if (stream.empty()) fail(ErrorCode::EmptyStream, "log-likelihood of an empty stream");
    validate_stream(stream, dims);

    const double horizon = horizon_of(stream, options);

    // state[p][q] = sum over past events j of dim q of exp(-beta_pq (t - t_j)),
    // kept current at `prev_t`.
    Matrix state(dims, std::vector<double>(dims, 0.0));
    double prev_t = 0.0;
    double event_terms = 0.0;
    double compensator = 0.0;
    for (std::size_t p = 0; p < dims; ++p) compensator += params.mu[p] * horizon;

    for (const Event& e : stream.events) {
        const double dt = e.t - prev_t;
        if (dt > 0.0) {
            for (std::size_t p = 0; p < dims; ++p) {
                for (std::size_t q = 0; q < dims; ++q) {
                    state[p][q] *= std::exp(-params.beta.at(p, q) * dt);
                }
            }
        }
        double lambda = params.mu[e.dim];
        for (std::size_t q = 0; q < dims; ++q) {
            lambda += params.alpha[e.dim][q] * state[e.dim][q];
        }
        if (lambda <= 0.0) return kNegInf;
        event_terms += std::log(lambda);
        for (std::size_t p = 0; p < dims; ++p) {
            const double b = params.beta.at(p, e.dim);
            compensator +=
                (params.alpha[p][e.dim] / b) * (1.0 - std::exp(-b * (horizon - e.t)));
            state[p][e.dim] += 1.0;
        }
        prev_t = e.t;
    }
    return event_terms - compensator;
}

std::vector<double> rescale(const HawkesParams& params, const EventStream& stream) {
    validate_or_throw(params);
    const std::size_t dims = params.dims();
    validate_stream(stream, dims);

    // Lambda_p(t) = mu_p t + sum_q (alpha_pq/beta_pq) (N_q(t^-) - S_pq(t)),
    // where S_pq carries the decayed kernel sums used by the intensity.
    Matrix state(dims, std::vector<double>(dims, 0.0));
    std::vector<double> counts(dims, 0.0);
    std::vector<double> last_compensator(dims, 0.0);
    std::vector<std::vector<double>> gaps(dims);
    double prev_t = 0.0;

    for (const Event& e : stream.events) {
        const double dt = e.t - prev_t;
        if (dt > 0.0) {
            for (std::size_t p = 0; p < dims; ++p) {
                for (std::size_t q = 0; q < dims; ++q) {
                    state[p][q] *= std::exp(-params.beta.at(p, q) * dt);
                }
            }
        }
        const std::size_t p = e.dim;
        double compensator = params.mu[p] * e.t;
        for (std::size_t q = 0; q < dims; ++q) {
            const double b = params.beta.at(p, q);
            compensator += (params.alpha[p][q] / b) * (counts[q] - state[p][q]);
        }
        gaps[p].push_back(compensator - last_compensator[p]);
        last_compensator[p] = compensator;
        for (std::size_t r = 0; r < dims; ++r) state[r][p] += 1.0;
        counts[p] += 1.0;
        prev_t = e.t;
    }

    std::vector<double> out;
    out.reserve(stream.size());
    for (auto& g : gaps) out.insert(out.end(), g.begin(), g.end());
    return out;
}

ScanResult loglik_scan(const HawkesParams& true_params, const RealizationSet& realizations,
                       const std::vector<double>& beta_grid, std::uint64_t seed,
                       const LoglikOptions& options) {
    validate_or_throw(true_params);
    validate_realizations(realizations, true_params.dims());
    if (beta_grid.empty()) fail(ErrorCode::EmptyInput, "beta grid is empty");
    for (double b : beta_grid) {
        if (!(b > 0.0)) fail(ErrorCode::NegativeRate, "grid beta = " + std::to_string(b));
    }

    constexpr int kResamples = 1000;
    const std::size_t n_real = realizations.size();

    ScanResult result;
    result.beta_grid = beta_grid;
    result.mean_negloglik.reserve(beta_grid.size());
    result.ci_low.reserve(beta_grid.size());
    result.ci_high.reserve(beta_grid.size());

    for (std::size_t g = 0; g < beta_grid.size(); ++g) {
        HawkesParams params = true_params;
        params.beta = Decay(beta_grid[g]);
        std::vector<double> negll(n_real);
        for (std::size_t k = 0; k < n_real; ++k) {
            negll[k] = -loglik_multi(params, realizations[k], options);
        }
        const double mean =
            std::accumulate(negll.begin(), negll.end(), 0.0) / static_cast<double>(n_real);

        Rng rng = Rng::substream(seed, g);
        std::vector<double> means(kResamples);
        for (int r = 0; r < kResamples; ++r) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n_real; ++k) sum += negll[rng.index(n_real)];
            means[r] = sum / static_cast<double>(n_real);
        }
        std::sort(means.begin(), means.end());
        const auto pct = [&](double u) {
            const double pos = u * (kResamples - 1);
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min<std::size_t>(lo + 1, kResamples - 1);
            const double w = pos - static_cast<double>(lo);
            return means[lo] * (1.0 - w) + means[hi] * w;
        };
        result.mean_negloglik.push_back(mean);
        result.ci_low.push_back(std::min(pct(0.025), mean));
        result.ci_high.push_back(std::max(pct(0.975), mean));
    }
    return result;
}

} // namespace hawkes
