#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hawkes/core.hpp"
#include "hawkes/likelihood.hpp"

namespace hawkes {

enum class FitMethod { Nonlinear, Grid, Smbo, Em };

const char* to_string(FitMethod method);
FitMethod fit_method_from_string(const std::string& name);

struct GridSpec {
    std::size_t count = 10;
    double log10_lo = -1.0;
    double log10_hi = 2.0;
};

struct EmOptions {
    std::size_t max_iters = 500;
    double tol = 1e-9;
};

struct FitConfig {
    FitMethod method = FitMethod::Nonlinear;
    double beta_lo = 1e-3;
    double beta_hi = 1e3;
    std::size_t budget = 50;  // smbo evaluations
    GridSpec grid;
    EmOptions em;
    double init = 1.0;
    std::uint64_t seed = 0;
    HorizonMode horizon_mode = HorizonMode::StreamT;
    bool warm_start = true;       // chain inits through pooled sequential fits
    std::size_t extra_starts = 3; // perturbed starts beside the init point
};

void validate_config(const FitConfig& config);

// 10^linspace(log10_lo, log10_hi, count)
std::vector<double> make_log_grid(const GridSpec& spec);

struct MuAlphaFit {
    std::vector<double> mu;
    Matrix alpha;
    double loglik = 0.0;
    bool converged = true;
};

// Convex subproblem: maximize the pooled log-likelihood over mu >= 0,
// alpha >= 0 with the shared decay held fixed. Spectral projected gradient
// ascent with backtracking; returns the best iterate with converged=false
// after 5000 iterations.
MuAlphaFit fit_mu_alpha(const RealizationSet& realizations, double beta, std::size_t dims,
                        HorizonMode horizon_mode = HorizonMode::StreamT);

struct FitResult {
    std::vector<double> mu;
    Matrix alpha;
    double beta = 1.0;
    double loglik = 0.0;
    bool converged = true;
    bool bound_hit = false;
    double runtime_seconds = 0.0;
    std::string method;
};

// Joint (mu, alpha, beta) maximum likelihood by box-constrained
// quasi-Newton with central finite differences; multi-start from the
// configured init plus 3 perturbed starts.
FitResult fit_decay_nonlinear(const RealizationSet& realizations, std::size_t dims,
                              const FitConfig& config);

// Profile likelihood over the log grid; ties break toward the smaller beta.
FitResult fit_decay_grid(const RealizationSet& realizations, std::size_t dims,
                         const FitConfig& config);

// Sequential model-based search on log beta: 10 quasi-random starts, then
// TPE-style proposals from a density ratio favoring the top quartile.
FitResult fit_decay_smbo(const RealizationSet& realizations, std::size_t dims,
                         const FitConfig& config);

// Branching-structure EM with closed-form M-steps; raises
// LikelihoodDecrease if its objective ever drops (beyond 1e-10 slack).
FitResult fit_decay_em(const RealizationSet& realizations, std::size_t dims,
                       const FitConfig& config);

FitResult fit_decay(const RealizationSet& realizations, std::size_t dims, const FitConfig& config);

struct DecayEstimates {
    std::vector<double> values;  // beta_hat_k, k = 1..K
    std::string method;
    std::vector<std::size_t> realization_counts;
};

enum class SequentialMode {
    Pooled,  // beta_hat_k fitted on the first k realizations together
    Iid,     // beta_hat_k fitted on realization k alone
};

DecayEstimates sequential_estimates(const RealizationSet& realizations, std::size_t dims,
                                    const FitConfig& config,
                                    SequentialMode mode = SequentialMode::Pooled);

} // namespace hawkes
