#include "hawkes/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hawkes/rng.hpp"

namespace hawkes {

namespace {

void check_model(const GammaExpModel& model) {
    if (!(model.a0 > 0.0)) fail(ErrorCode::InvalidArgument, "prior shape a0 must be > 0");
    if (!(model.b0 > 0.0)) fail(ErrorCode::InvalidArgument, "prior scale b0 must be > 0");
}

double sum_estimates(const DecayEstimates& estimates) {
    for (double v : estimates.values) {
        if (!(v > 0.0)) {
            fail(ErrorCode::NonPositiveEstimate,
                 "decay estimate " + std::to_string(v) + " must be positive");
        }
    }
    return std::accumulate(estimates.values.begin(), estimates.values.end(), 0.0);
}

double percentile(std::vector<double> xs, double u) {
    std::sort(xs.begin(), xs.end());
    const double pos = u * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - w) + xs[hi] * w;
}

} // namespace

GammaPosterior posterior(const GammaExpModel& model, const DecayEstimates& estimates) {
    check_model(model);
    (void)sum_estimates(estimates);  // validates positivity
    // Accumulate from b0 so one-shot and chained updates agree bit for bit.
    double b = model.b0;
    for (double v : estimates.values) b += v;
    return {model.a0 + static_cast<double>(estimates.values.size()), b};
}

double predictive_mean_prior_shape(const GammaExpModel& model, const DecayEstimates& estimates) {
    check_model(model);
    if (model.a0 <= 1.0) {
        fail(ErrorCode::ShapeTooSmall,
             "prior-shape predictive mean needs a0 > 1, got a0 = " + std::to_string(model.a0));
    }
    return (model.b0 + sum_estimates(estimates)) / (model.a0 - 1.0);
}

double predictive_mean_conjugate(const GammaExpModel& model, const DecayEstimates& estimates) {
    check_model(model);
    const double shape = model.a0 + static_cast<double>(estimates.values.size());
    if (shape <= 1.0) {
        fail(ErrorCode::ShapeTooSmall, "conjugate predictive mean needs a0 + K > 1");
    }
    return (model.b0 + sum_estimates(estimates)) / (shape - 1.0);
}

double lomax_quantile(double shape, double scale, double u) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
        fail(ErrorCode::InvalidArgument, "Lomax quantile needs positive shape and scale");
    }
    if (!(u >= 0.0) || !(u < 1.0)) {
        fail(ErrorCode::InvalidArgument, "quantile level must lie in [0, 1)");
    }
    return scale * (std::pow(1.0 - u, -1.0 / shape) - 1.0);
}

std::pair<double, double> predictive_interval(const GammaExpModel& model,
                                              const DecayEstimates& estimates, double level,
                                              PredictiveConvention convention) {
    check_model(model);
    if (!(level > 0.0) || !(level < 1.0)) {
        fail(ErrorCode::InvalidArgument,
             "interval level must lie strictly in (0, 1), got " + std::to_string(level));
    }
    const double sum = sum_estimates(estimates);
    const double shape = convention == PredictiveConvention::PriorShape
                             ? model.a0
                             : model.a0 + static_cast<double>(estimates.values.size());
    const double scale = model.b0 + sum;
    const double tail = 0.5 * (1.0 - level);
    return {lomax_quantile(shape, scale, tail), lomax_quantile(shape, scale, 1.0 - tail)};
}

PredictiveSummary summarize_predictive(const GammaExpModel& model,
                                       const DecayEstimates& estimates, double level,
                                       PredictiveConvention convention) {
    PredictiveSummary out;
    out.beta_prime = predictive_mean_prior_shape(model, estimates);
    out.beta_prime_conjugate = predictive_mean_conjugate(model, estimates);
    const auto [lo, hi] = predictive_interval(model, estimates, level, convention);
    out.ci_low = lo;
    out.ci_high = hi;
    out.level = level;
    out.shift = model.b0 - out.beta_prime;
    out.count = estimates.values.size();
    out.sum_estimates = sum_estimates(estimates);
    return out;
}

ShiftReport diagnose(const GammaExpModel& model, const DecayEstimates& estimates,
                     std::uint64_t seed, std::size_t draws, double level) {
    const double beta_prime = predictive_mean_prior_shape(model, estimates);
    ShiftReport report;
    report.shift = model.b0 - beta_prime;

    const double k = static_cast<double>(estimates.values.size());
    const auto shift_stat = [&](const std::vector<double>& xs, const std::vector<double>& w) {
        // Dirichlet-weighted analogue of b0 - (b0 + sum)/(a0 - 1), keeping
        // the sum on the K-estimate scale.
        const double weighted_sum = k * weighted_mean(xs, w);
        return model.b0 - (model.b0 + weighted_sum) / (model.a0 - 1.0);
    };
    const auto boot = bayesian_bootstrap(estimates.values, shift_stat, draws, seed, level);
    report.ci_low = boot.ci_low;
    report.ci_high = boot.ci_high;
    return report;
}

BootstrapInterval empirical_bootstrap(const std::vector<double>& samples,
                                      const Statistic& statistic, double level,
                                      std::size_t resamples, std::uint64_t seed) {
    if (samples.empty()) fail(ErrorCode::EmptyInput, "bootstrap of an empty sample");
    if (resamples < 2) fail(ErrorCode::TooFewResamples, "need at least 2 resamples");
    if (!(level > 0.0) || !(level < 1.0)) {
        fail(ErrorCode::InvalidArgument, "bootstrap level must lie in (0, 1)");
    }
    const double theta = statistic(samples);
    Rng rng(seed);
    std::vector<double> stats(resamples);
    std::vector<double> resample(samples.size());
    for (std::size_t r = 0; r < resamples; ++r) {
        for (auto& x : resample) x = samples[rng.index(samples.size())];
        stats[r] = statistic(resample);
    }
    const double tail = 0.5 * (1.0 - level);
    const double q_lo = percentile(stats, tail);
    const double q_hi = percentile(stats, 1.0 - tail);
    return {theta, 2.0 * theta - q_hi, 2.0 * theta - q_lo};
}

double weighted_mean(const std::vector<double>& samples, const std::vector<double>& weights) {
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) sum += samples[i] * weights[i];
    return sum;
}

BayesianBootstrapSummary bayesian_bootstrap(const std::vector<double>& samples,
                                            const WeightedStatistic& statistic,
                                            std::size_t draws, std::uint64_t seed,
                                            double level) {
    if (samples.empty()) fail(ErrorCode::EmptyInput, "bootstrap of an empty sample");
    if (draws == 0) fail(ErrorCode::TooFewResamples, "need at least 1 Bayesian-bootstrap draw");
    Rng rng(seed);
    BayesianBootstrapSummary out;
    out.draws.resize(draws);
    for (std::size_t d = 0; d < draws; ++d) {
        out.draws[d] = statistic(samples, rng.dirichlet(samples.size()));
    }
    out.mean = std::accumulate(out.draws.begin(), out.draws.end(), 0.0) /
               static_cast<double>(draws);
    const double tail = 0.5 * (1.0 - level);
    out.ci_low = percentile(out.draws, tail);
    out.ci_high = percentile(out.draws, 1.0 - tail);
    return out;
}

} // namespace hawkes
