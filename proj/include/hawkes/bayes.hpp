#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hawkes/estimators.hpp"

namespace hawkes {

// Gamma(a0, b0) prior over the rate of an Exponential likelihood for the
// decay estimates. b0 carries the hypothesis on beta; a0 defaults to the
// estimate count K. All predictive formulas below are stated in Lomax
// (shape, scale) terms to keep the Gamma rate/scale ambiguity out of the
// results.
struct GammaExpModel {
    double a0 = 1.0;
    double b0 = 1.0;
};

struct GammaPosterior {
    double a = 0.0;  // shape
    double b = 0.0;  // scale in the Lomax sense (rate of the Gamma over lambda)
};

// Conjugate update: a = a0 + K, b = b0 + sum(beta_hat).
GammaPosterior posterior(const GammaExpModel& model, const DecayEstimates& estimates);

// Closed-form predictive mean (b0 + sum) / (a0 - 1): the Lomax predictive
// keeps the prior shape a0 (the natural reading when a0 is set to K).
// Requires a0 > 1.
double predictive_mean_prior_shape(const GammaExpModel& model, const DecayEstimates& estimates);

// Standard conjugate predictive mean: Lomax(a0 + K, b0 + sum) has mean
// (b0 + sum) / (a0 + K - 1).
double predictive_mean_conjugate(const GammaExpModel& model, const DecayEstimates& estimates);

enum class PredictiveConvention {
    PriorShape,  // Lomax shape a0; the CLI calls this convention "paper"
    Conjugate,   // Lomax shape a0 + K
};

// Central predictive interval at the given level via the Lomax inverse CDF
// q(u) = scale ((1-u)^{-1/shape} - 1).
std::pair<double, double> predictive_interval(const GammaExpModel& model,
                                              const DecayEstimates& estimates, double level,
                                              PredictiveConvention convention =
                                                  PredictiveConvention::PriorShape);

double lomax_quantile(double shape, double scale, double u);

struct PredictiveSummary {
    double beta_prime = 0.0;           // prior-shape predictive mean
    double beta_prime_conjugate = 0.0; // standard conjugate predictive mean
    double ci_low = 0.0;
    double ci_high = 0.0;
    double level = 0.95;
    double shift = 0.0;  // b0 - beta_prime
    std::size_t count = 0;
    double sum_estimates = 0.0;
};

PredictiveSummary summarize_predictive(const GammaExpModel& model,
                                       const DecayEstimates& estimates, double level = 0.95,
                                       PredictiveConvention convention =
                                           PredictiveConvention::PriorShape);

struct ShiftReport {
    double shift = 0.0;  // b0 - beta_prime, positive when the hypothesis over-estimates
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// b0 - beta_prime with a Bayesian-bootstrap interval over the estimates.
ShiftReport diagnose(const GammaExpModel& model, const DecayEstimates& estimates,
                     std::uint64_t seed, std::size_t draws = 2000, double level = 0.95);

struct BootstrapInterval {
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

using Statistic = std::function<double(const std::vector<double>&)>;

// Empirical (pivotal) bootstrap: CI = [2 th - q_{1-a/2}, 2 th - q_{a/2}].
BootstrapInterval empirical_bootstrap(const std::vector<double>& samples,
                                      const Statistic& statistic, double level,
                                      std::size_t resamples, std::uint64_t seed);

using WeightedStatistic =
    std::function<double(const std::vector<double>&, const std::vector<double>&)>;

double weighted_mean(const std::vector<double>& samples, const std::vector<double>& weights);

struct BayesianBootstrapSummary {
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::vector<double> draws;
};

// Flat-Dirichlet reweighting of the samples; returns the draw mean and a
// central percentile interval.
BayesianBootstrapSummary bayesian_bootstrap(const std::vector<double>& samples,
                                            const WeightedStatistic& statistic,
                                            std::size_t draws, std::uint64_t seed,
                                            double level = 0.95);

} // namespace hawkes
