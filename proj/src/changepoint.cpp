#include "hawkes/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hawkes/rng.hpp"

namespace hawkes {

namespace {

void check_inputs(const DecayEstimates& estimates, const ChangepointModel& model) {
    if (!(model.rate1 > 0.0) || !(model.rate2 > 0.0)) {
        fail(ErrorCode::InvalidArgument, "hyper-prior rates must be positive");
    }
    if (estimates.values.size() == 1) {
        fail(ErrorCode::InvalidArgument, "changepoint inference needs K >= 2 estimates");
    }
    for (double v : estimates.values) {
        if (!(v > 0.0)) {
            fail(ErrorCode::NonPositiveEstimate,
                 "decay estimate " + std::to_string(v) + " must be positive");
        }
    }
}

// log of Exponential(rate r) prior times Exponential(mean b) likelihood of a
// segment with m values summing to s, as a function of z = log b. Includes
// the log-scale Jacobian.
double segment_log_density(double z, double m, double s, double rate) {
    const double b = std::exp(z);
    return -rate * b - (m - 1.0) * z - s / b;
}

} // namespace

ChangepointPosterior mcmc(const DecayEstimates& estimates, const ChangepointModel& model,
                          const McmcOptions& options) {
    check_inputs(estimates, model);
    if (options.n_samples == 0 || options.thin == 0) {
        fail(ErrorCode::InvalidArgument, "need n_samples >= 1 and thin >= 1");
    }
    const std::size_t k_max = estimates.values.size();
    const std::size_t support = std::max<std::size_t>(k_max, 1);

    // Prefix sums make every segment (count, sum) O(1).
    std::vector<double> prefix(k_max + 1, 0.0);
    for (std::size_t i = 0; i < k_max; ++i) prefix[i + 1] = prefix[i] + estimates.values[i];
    const auto segment1 = [&](std::size_t kappa) {  // k < kappa
        const double m = static_cast<double>(kappa - 1);
        return std::pair<double, double>{m, prefix[kappa - 1]};
    };
    const auto segment2 = [&](std::size_t kappa) {  // k >= kappa
        const double m = static_cast<double>(k_max - (kappa - 1));
        return std::pair<double, double>{m, prefix[k_max] - prefix[kappa - 1]};
    };

    Rng rng(options.seed);
    double z1 = std::log(1.0 / model.rate1);  // start at the prior means
    double z2 = std::log(1.0 / model.rate2);
    std::size_t kappa = support > 1 ? support / 2 : 1;
    double sigma1 = 0.5, sigma2 = 0.5;

    const std::size_t total = options.burn_in + options.n_samples;
    std::size_t accept1 = 0, accept2 = 0, window_acc1 = 0, window_acc2 = 0, window_n = 0;
    ChangepointPosterior out;
    out.support = support;
    out.b1.reserve(options.n_samples / options.thin + 1);
    out.b2.reserve(options.n_samples / options.thin + 1);
    out.kappa.reserve(options.n_samples / options.thin + 1);

    std::vector<double> kappa_logp(support);
    for (std::size_t iter = 0; iter < total; ++iter) {
        const auto [m1, s1] = segment1(kappa);
        const auto [m2, s2] = segment2(kappa);

        // Block 1: random-walk Metropolis on log b1.
        {
            const double proposal = z1 + sigma1 * rng.normal();
            const double log_ratio = segment_log_density(proposal, m1, s1, model.rate1) -
                                     segment_log_density(z1, m1, s1, model.rate1);
            if (std::log(rng.uniform() + 1e-300) < log_ratio) {
                z1 = proposal;
                if (iter >= options.burn_in) ++accept1;
                ++window_acc1;
            }
        }
        // Block 2: random-walk Metropolis on log b2.
        {
            const double proposal = z2 + sigma2 * rng.normal();
            const double log_ratio = segment_log_density(proposal, m2, s2, model.rate2) -
                                     segment_log_density(z2, m2, s2, model.rate2);
            if (std::log(rng.uniform() + 1e-300) < log_ratio) {
                z2 = proposal;
                if (iter >= options.burn_in) ++accept2;
                ++window_acc2;
            }
        }
        ++window_n;

        // Adapt proposal widths toward 30-45% acceptance during burn-in.
        if (iter < options.burn_in && window_n == 50) {
            const double r1 = static_cast<double>(window_acc1) / 50.0;
            const double r2 = static_cast<double>(window_acc2) / 50.0;
            if (r1 > 0.45) sigma1 *= 1.25;
            if (r1 < 0.30) sigma1 /= 1.25;
            if (r2 > 0.45) sigma2 *= 1.25;
            if (r2 < 0.30) sigma2 /= 1.25;
            window_acc1 = window_acc2 = window_n = 0;
        }

        // Block 3: exact Gibbs draw of kappa from its full conditional.
        if (k_max >= 2) {
            const double b1 = std::exp(z1);
            const double b2 = std::exp(z2);
            const double log_b1 = z1, log_b2 = z2;
            double max_logp = -1e300;
            for (std::size_t c = 1; c <= support; ++c) {
                const double mm1 = static_cast<double>(c - 1);
                const double ss1 = prefix[c - 1];
                const double mm2 = static_cast<double>(k_max) - mm1;
                const double ss2 = prefix[k_max] - ss1;
                const double logp =
                    -mm1 * log_b1 - ss1 / b1 - mm2 * log_b2 - ss2 / b2;
                kappa_logp[c - 1] = logp;
                max_logp = std::max(max_logp, logp);
            }
            double norm = 0.0;
            for (double& lp : kappa_logp) {
                lp = std::exp(lp - max_logp);
                norm += lp;
            }
            const double u = rng.uniform() * norm;
            double cum = 0.0;
            kappa = support;
            for (std::size_t c = 1; c <= support; ++c) {
                cum += kappa_logp[c - 1];
                if (u <= cum) {
                    kappa = c;
                    break;
                }
            }
        }

        if (iter >= options.burn_in && (iter - options.burn_in) % options.thin == 0) {
            out.b1.push_back(std::exp(z1));
            out.b2.push_back(std::exp(z2));
            out.kappa.push_back(kappa);
        }
    }

    out.acceptance_b1 = static_cast<double>(accept1) / static_cast<double>(options.n_samples);
    out.acceptance_b2 = static_cast<double>(accept2) / static_cast<double>(options.n_samples);
    if (out.acceptance_b1 < 0.01 || out.acceptance_b2 < 0.01) {
        fail(ErrorCode::DegenerateChain,
             "post burn-in acceptance below 1% (b1: " + std::to_string(out.acceptance_b1) +
                 ", b2: " + std::to_string(out.acceptance_b2) + ")");
    }
    return out;
}

ChangepointSummary summarize(const ChangepointPosterior& posterior) {
    if (posterior.b1.empty()) fail(ErrorCode::EmptyInput, "empty posterior sample");
    ChangepointSummary out;
    out.beta1_bar = std::accumulate(posterior.b1.begin(), posterior.b1.end(), 0.0) /
                    static_cast<double>(posterior.b1.size());
    out.beta2_bar = std::accumulate(posterior.b2.begin(), posterior.b2.end(), 0.0) /
                    static_cast<double>(posterior.b2.size());
    std::vector<std::size_t> ks = posterior.kappa;
    std::sort(ks.begin(), ks.end());
    const std::size_t n = ks.size();
    out.kappa_hat = n % 2 == 1 ? static_cast<double>(ks[n / 2])
                               : 0.5 * static_cast<double>(ks[n / 2 - 1] + ks[n / 2]);
    out.kappa_ratio =
        posterior.support > 0 ? out.kappa_hat / static_cast<double>(posterior.support) : 0.0;
    out.ordered = out.beta1_bar < out.beta2_bar;
    return out;
}

namespace {

struct SegmentIntegral {
    double log_mass = 0.0;  // log of the marginal over b
    double mean = 0.0;      // posterior mean of b given this segment
    double second = 0.0;    // posterior second moment
};

// Integrates Exponential(rate) prior x Exponential-mean likelihood over b in
// log space with a Laplace-centered trapezoid grid.
SegmentIntegral integrate_segment(double m, double s, double rate) {
    if (m == 0.0) {
        // Empty segment: the marginal is 1 and b keeps its prior moments.
        return {0.0, 1.0 / rate, 2.0 / (rate * rate)};
    }
    // Mode of phi(u) = -rate e^u - (m-1) u - s e^{-u}.
    const double disc = std::sqrt((m - 1.0) * (m - 1.0) + 4.0 * rate * s);
    const double b_star = (-(m - 1.0) + disc) / (2.0 * rate);
    const double u_star = std::log(b_star);
    const double curvature = rate * b_star + s / b_star;  // -phi''(u*)
    const double sigma = 1.0 / std::sqrt(curvature);
    const double half_width = std::max(12.0 * sigma, 8.0);
    const int n_points = 40000;
    const double step = 2.0 * half_width / n_points;

    const double phi_star =
        -rate * b_star - (m - 1.0) * u_star - s / b_star;
    double mass = 0.0, first = 0.0, second = 0.0;
    for (int i = 0; i <= n_points; ++i) {
        const double u = u_star - half_width + step * i;
        const double b = std::exp(u);
        const double phi = -rate * b - (m - 1.0) * u - s / b;
        double w = std::exp(phi - phi_star);
        if (i == 0 || i == n_points) w *= 0.5;
        mass += w;
        first += w * b;
        second += w * b * b;
    }
    SegmentIntegral out;
    out.log_mass = std::log(rate) + phi_star + std::log(mass * step);
    out.mean = first / mass;
    out.second = second / mass;
    return out;
}

} // namespace

ExactChangepointPosterior exact_small_posterior(const DecayEstimates& estimates,
                                                const ChangepointModel& model) {
    check_inputs(estimates, model);
    const std::size_t k_max = estimates.values.size();
    if (k_max > 12) {
        fail(ErrorCode::InvalidArgument, "exact_small_posterior is limited to K <= 12");
    }
    if (k_max == 0) fail(ErrorCode::EmptyInput, "no estimates");

    std::vector<double> prefix(k_max + 1, 0.0);
    for (std::size_t i = 0; i < k_max; ++i) prefix[i + 1] = prefix[i] + estimates.values[i];

    std::vector<SegmentIntegral> seg1(k_max), seg2(k_max);
    std::vector<double> log_joint(k_max);
    double max_log = -1e300;
    for (std::size_t kappa = 1; kappa <= k_max; ++kappa) {
        const double m1 = static_cast<double>(kappa - 1);
        const double s1 = prefix[kappa - 1];
        const double m2 = static_cast<double>(k_max) - m1;
        const double s2 = prefix[k_max] - s1;
        seg1[kappa - 1] = integrate_segment(m1, s1, model.rate1);
        seg2[kappa - 1] = integrate_segment(m2, s2, model.rate2);
        log_joint[kappa - 1] = seg1[kappa - 1].log_mass + seg2[kappa - 1].log_mass;
        max_log = std::max(max_log, log_joint[kappa - 1]);
    }

    ExactChangepointPosterior out;
    out.kappa_pmf.resize(k_max);
    double norm = 0.0;
    for (std::size_t i = 0; i < k_max; ++i) {
        out.kappa_pmf[i] = std::exp(log_joint[i] - max_log);
        norm += out.kappa_pmf[i];
    }
    for (std::size_t i = 0; i < k_max; ++i) {
        out.kappa_pmf[i] /= norm;
        out.b1_mean += out.kappa_pmf[i] * seg1[i].mean;
        out.b2_mean += out.kappa_pmf[i] * seg2[i].mean;
        out.b1_var += out.kappa_pmf[i] * seg1[i].second;
        out.b2_var += out.kappa_pmf[i] * seg2[i].second;
    }
    out.b1_var -= out.b1_mean * out.b1_mean;
    out.b2_var -= out.b2_mean * out.b2_mean;
    return out;
}

} // namespace hawkes
