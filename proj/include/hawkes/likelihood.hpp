#pragma once

#include <cstdint>
#include <vector>

#include "hawkes/core.hpp"

namespace hawkes {

// The compensator can be integrated up to the last event time (the
// log-likelihood formula as usually printed) or up to the stream's
// observation horizon T. Default is the stream horizon.
enum class HorizonMode { LastEvent, StreamT };

struct LoglikOptions {
    HorizonMode horizon_mode = HorizonMode::StreamT;
};

// Univariate log-likelihood via the linear-time A(i) recursion,
// A(1) = 0, A(i) = exp(-beta (t_i - t_{i-1})) (1 + A(i-1)).
// Returns -inf when an event intensity is nonpositive (mu = 0 with no
// excitation) so optimizers can reject the region.
double loglik_uni(const HawkesParams& params, const EventStream& stream,
                  const LoglikOptions& options = {});

// Same value through the O(n^2) double sum; kept as the independent route.
double loglik_uni_naive(const HawkesParams& params, const EventStream& stream,
                        const LoglikOptions& options = {});

// Multivariate log-likelihood with per-(p,q) recursions. Reduces exactly
// to loglik_uni for M = 1.
double loglik_multi(const HawkesParams& params, const EventStream& stream,
                    const LoglikOptions& options = {});

// Compensator-rescaled inter-event gaps, per dimension (dimension 0's gaps
// first, then dimension 1's, ...). Under the true model these are iid
// Exp(1).
std::vector<double> rescale(const HawkesParams& params, const EventStream& stream);

struct ScanResult {
    std::vector<double> beta_grid;
    std::vector<double> mean_negloglik;
    std::vector<double> ci_low;   // bootstrap 95% bounds across realizations
    std::vector<double> ci_high;
};

// Negative log-likelihood curve over a beta grid with mu, alpha held at
// the supplied values. CI: 1000 percentile-bootstrap resamples over
// realizations.
ScanResult loglik_scan(const HawkesParams& true_params, const RealizationSet& realizations,
                       const std::vector<double>& beta_grid, std::uint64_t seed,
                       const LoglikOptions& options = {});

} // namespace hawkes
