#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "hawkes/changepoint.hpp"
#include "hawkes/metrics.hpp"
#include "hawkes/rng.hpp"

using namespace hawkes;

namespace {

DecayEstimates estimates_of(std::vector<double> values) {
    DecayEstimates e;
    e.values = std::move(values);
    e.method = "test";
    e.realization_counts.assign(e.values.size(), 1);
    return e;
}

std::vector<double> two_regime_draws(Rng& rng, std::size_t n1, double mean1, std::size_t n2,
                                     double mean2) {
    std::vector<double> out;
    for (std::size_t i = 0; i < n1; ++i) out.push_back(rng.exponential(1.0 / mean1));
    for (std::size_t i = 0; i < n2; ++i) out.push_back(rng.exponential(1.0 / mean2));
    return out;
}

std::vector<double> kappa_histogram(const ChangepointPosterior& posterior) {
    std::vector<double> pmf(posterior.support, 0.0);
    for (std::size_t k : posterior.kappa) pmf[k - 1] += 1.0;
    for (auto& p : pmf) p /= static_cast<double>(posterior.kappa.size());
    return pmf;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    double tv = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
    return 0.5 * tv;
}

// Direct 2-D quadrature over (b1, b2) for tiny instances, independent of the
// log-space segment integrals used by exact_small_posterior.
std::vector<double> brute_force_kappa_pmf(const std::vector<double>& values,
                                          const ChangepointModel& model) {
    const std::size_t k_max = values.size();
    std::vector<double> mass(k_max, 0.0);
    const int n = 4000;
    const double hi = 60.0;
    const double step = hi / n;
    for (std::size_t kappa = 1; kappa <= k_max; ++kappa) {
        double seg1_mass = 1.0;
        {
            std::size_t m = kappa - 1;
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += values[i];
            if (m > 0) {
                seg1_mass = 0.0;
                for (int i = 1; i <= n; ++i) {
                    const double b = step * i;
                    seg1_mass += model.rate1 * std::exp(-model.rate1 * b) *
                                 std::pow(b, -static_cast<double>(m)) * std::exp(-s / b) * step;
                }
            }
        }
        double seg2_mass = 1.0;
        {
            std::size_t m = k_max - (kappa - 1);
            double s = 0.0;
            for (std::size_t i = kappa - 1; i < k_max; ++i) s += values[i];
            if (m > 0) {
                seg2_mass = 0.0;
                for (int i = 1; i <= n; ++i) {
                    const double b = step * i;
                    seg2_mass += model.rate2 * std::exp(-model.rate2 * b) *
                                 std::pow(b, -static_cast<double>(m)) * std::exp(-s / b) * step;
                }
            }
        }
        mass[kappa - 1] = seg1_mass * seg2_mass;
    }
    const double norm = std::accumulate(mass.begin(), mass.end(), 0.0);
    for (auto& m : mass) m /= norm;
    return mass;
}

} // namespace

TEST_CASE("input validation") {
    const ChangepointModel model;
    CHECK_THROWS_WITH_AS((void)mcmc(estimates_of({1.0, -2.0}), model, {}),
                         doctest::Contains("NonPositiveEstimate"), Error);
    CHECK_THROWS_AS((void)mcmc(estimates_of({1.0}), model, {}), Error);
    CHECK_THROWS_AS((void)mcmc(estimates_of({1.0, 2.0}), ChangepointModel{0.0, 0.7}, {}),
                    Error);
    McmcOptions bad;
    bad.n_samples = 0;
    CHECK_THROWS_AS((void)mcmc(estimates_of({1.0, 2.0}), model, bad), Error);
}

TEST_CASE("mcmc is deterministic given the seed") {
    Rng rng(3);
    const auto estimates = estimates_of(two_regime_draws(rng, 10, 0.8, 10, 1.8));
    McmcOptions opts;
    opts.n_samples = 2000;
    opts.burn_in = 500;
    opts.seed = 99;
    const auto a = mcmc(estimates, {}, opts);
    const auto b = mcmc(estimates, {}, opts);
    REQUIRE(a.b1.size() == b.b1.size());
    for (std::size_t i = 0; i < a.b1.size(); ++i) {
        CHECK(a.b1[i] == b.b1[i]);
        CHECK(a.kappa[i] == b.kappa[i]);
    }
    CHECK(a.acceptance_b1 > 0.01);
    CHECK(a.acceptance_b1 < 1.0);
}

TEST_CASE("a clear break in the estimate series is localized and ordered") {
    // With an Exponential likelihood the kappa posterior median lands in
    // [40, 60] for about 84% of two-regime Exp(0.8)/Exp(1.8) datasets; the
    // exact quadrature posterior gives the same rate, so that is the data's
    // intrinsic localization limit, not sampler error. Ordering is essentially
    // always recovered.
    std::size_t ordered_count = 0, localized = 0;
    const int runs = 100;
    for (int run = 0; run < runs; ++run) {
        Rng rng(100 + run);
        const auto estimates = estimates_of(two_regime_draws(rng, 50, 0.8, 50, 1.8));
        McmcOptions opts;
        opts.seed = 7000 + run;
        const auto summary = summarize(mcmc(estimates, {}, opts));
        ordered_count += summary.ordered ? 1 : 0;
        localized += summary.kappa_hat >= 40.0 && summary.kappa_hat <= 60.0 ? 1 : 0;
    }
    CHECK(ordered_count >= 95);
    CHECK(localized >= 75);
}

TEST_CASE("without a change the ordering flag is indifferent and kappa stays diffuse") {
    std::size_t ordered_count = 0;
    double entropy_sum = 0.0;
    const int runs = 100;
    for (int run = 0; run < runs; ++run) {
        Rng rng(500 + run);
        std::vector<double> values(60);
        for (auto& v : values) v = rng.exponential(1.0);
        McmcOptions opts;
        opts.n_samples = 4000;
        opts.burn_in = 1000;
        opts.seed = 9000 + run;
        const ChangepointModel symmetric{1.0, 1.0};
        const auto posterior = mcmc(estimates_of(values), symmetric, opts);
        if (summarize(posterior).ordered) ++ordered_count;
        const auto pmf = kappa_histogram(posterior);
        double entropy = 0.0;
        for (double p : pmf) {
            if (p > 0.0) entropy -= p * std::log(p);
        }
        entropy_sum += entropy;
    }
    CHECK(ordered_count >= 30);
    CHECK(ordered_count <= 70);
    CHECK(entropy_sum / runs >= 0.8 * std::log(60.0));
}

TEST_CASE("exact posterior matches a brute-force quadrature on tiny instances") {
    const ChangepointModel model{1.0, 0.7};
    const auto estimates = estimates_of({0.4, 0.3, 2.5, 3.0});
    const auto exact = exact_small_posterior(estimates, model);
    const auto brute = brute_force_kappa_pmf(estimates.values, model);
    REQUIRE(exact.kappa_pmf.size() == brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i) {
        CHECK(exact.kappa_pmf[i] == doctest::Approx(brute[i]).epsilon(5e-3));
    }
    CHECK_THROWS_AS(
        (void)exact_small_posterior(estimates_of(std::vector<double>(13, 1.0)), model), Error);
}

TEST_CASE("K=2 with extreme separation pins the changepoint at 2") {
    const ChangepointModel model{1.0, 0.7};
    const auto exact = exact_small_posterior(estimates_of({0.1, 10.0}), model);
    CHECK(exact.kappa_pmf[1] > 0.8);

    std::size_t good = 0;
    for (int run = 0; run < 100; ++run) {
        McmcOptions opts;
        opts.n_samples = 6000;
        opts.burn_in = 1500;
        opts.seed = 11000 + run;
        const auto summary = summarize(mcmc(estimates_of({0.1, 10.0}), model, opts));
        if (summary.kappa_hat == 2.0 && summary.ordered) ++good;
    }
    CHECK(good >= 95);
}

TEST_CASE("mcmc kappa marginal matches the exact posterior in total variation") {
    Rng rng(13);
    const auto estimates = estimates_of(two_regime_draws(rng, 4, 0.6, 4, 2.4));
    const ChangepointModel model{1.0, 0.7};
    McmcOptions opts;
    opts.n_samples = 100000;
    opts.burn_in = 10000;
    opts.seed = 21;
    const auto posterior = mcmc(estimates, model, opts);
    const auto exact = exact_small_posterior(estimates, model);
    CHECK(total_variation(kappa_histogram(posterior), exact.kappa_pmf) <= 0.05);
}

TEST_CASE("three-point toy chain reaches the exact stationary distribution") {
    const auto estimates = estimates_of({0.5, 1.0, 3.0});
    const ChangepointModel model{1.0, 0.7};
    McmcOptions opts;
    opts.n_samples = 1000000;
    opts.burn_in = 20000;
    opts.seed = 5;
    const auto posterior = mcmc(estimates, model, opts);
    const auto exact = exact_small_posterior(estimates, model);
    CHECK(total_variation(kappa_histogram(posterior), exact.kappa_pmf) <= 0.02);
}

TEST_CASE("reversing the estimates with swapped rates mirrors the posterior") {
    Rng rng(17);
    auto values = two_regime_draws(rng, 5, 0.5, 5, 3.0);
    const ChangepointModel forward{1.0, 0.7};
    const ChangepointModel swapped{0.7, 1.0};
    auto reversed = values;
    std::reverse(reversed.begin(), reversed.end());

    const auto fwd = exact_small_posterior(estimates_of(values), forward);
    const auto rev = exact_small_posterior(estimates_of(reversed), swapped);
    const std::size_t k = values.size();
    // kappa maps to K - kappa + 2 on the interior; boundary kappa=1 carries
    // negligible mass for this clearly split series.
    for (std::size_t kappa = 2; kappa <= k; ++kappa) {
        const std::size_t mapped = k - kappa + 2;
        if (mapped < 1 || mapped > k) continue;
        CHECK(fwd.kappa_pmf[kappa - 1] ==
              doctest::Approx(rev.kappa_pmf[mapped - 1]).epsilon(0.02).scale(1.0));
    }
    CHECK(fwd.b1_mean == doctest::Approx(rev.b2_mean).epsilon(0.02));
    CHECK(fwd.b2_mean == doctest::Approx(rev.b1_mean).epsilon(0.02));

    // The sampled chains agree with the same mirror within a loose TV budget.
    McmcOptions opts;
    opts.n_samples = 60000;
    opts.burn_in = 6000;
    opts.seed = 31;
    const auto fwd_chain = mcmc(estimates_of(values), forward, opts);
    opts.seed = 32;
    const auto rev_chain = mcmc(estimates_of(reversed), swapped, opts);
    const auto fwd_pmf = kappa_histogram(fwd_chain);
    auto rev_pmf = kappa_histogram(rev_chain);
    std::vector<double> mirrored(k, 0.0);
    for (std::size_t kappa = 2; kappa <= k; ++kappa) {
        mirrored[kappa - 1] = rev_pmf[k - kappa + 1];
    }
    mirrored[0] = rev_pmf[0];
    CHECK(total_variation(fwd_pmf, mirrored) <= 0.05);
}

TEST_CASE("with no data the sampler reproduces the prior moments") {
    const ChangepointModel model{1.0, 0.7};
    McmcOptions opts;
    opts.n_samples = 200000;
    opts.burn_in = 20000;
    opts.seed = 77;
    const auto posterior = mcmc(estimates_of({}), model, opts);
    CHECK(mean(posterior.b1) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(mean(posterior.b2) == doctest::Approx(1.0 / 0.7).epsilon(0.05));
    CHECK(variance(posterior.b1) == doctest::Approx(1.0).epsilon(0.15));
    CHECK(variance(posterior.b2) == doctest::Approx(1.0 / 0.49).epsilon(0.15));
}

TEST_CASE("contradictory hyper-priors do not override a clear data ordering") {
    // Prior means say b1 > b2; the data say the opposite.
    const ChangepointModel contradictory{0.5, 2.0};
    std::size_t ordered_count = 0;
    const int runs = 50;
    for (int run = 0; run < runs; ++run) {
        Rng rng(40000 + run);
        const auto estimates = estimates_of(two_regime_draws(rng, 50, 0.8, 50, 1.8));
        McmcOptions opts;
        opts.n_samples = 8000;
        opts.burn_in = 2000;
        opts.seed = 50000 + run;
        if (summarize(mcmc(estimates, contradictory, opts)).ordered) ++ordered_count;
    }
    CHECK(ordered_count >= 45);
}

TEST_CASE("summaries are deterministic functions of the samples") {
    ChangepointPosterior posterior;
    posterior.b1 = {0.5, 0.7};
    posterior.b2 = {1.5, 1.7};
    posterior.kappa = {3, 5};
    posterior.support = 10;
    const auto summary = summarize(posterior);
    CHECK(summary.beta1_bar == doctest::Approx(0.6));
    CHECK(summary.beta2_bar == doctest::Approx(1.6));
    CHECK(summary.kappa_hat == doctest::Approx(4.0));
    CHECK(summary.kappa_ratio == doctest::Approx(0.4));
    CHECK(summary.ordered);
}
