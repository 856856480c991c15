#include <doctest.h>

#include <cmath>

#include "hawkes/estimators.hpp"
#include "hawkes/likelihood.hpp"
#include "hawkes/metrics.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/sim.hpp"
#include "test_util.hpp"

using namespace hawkes;

TEST_CASE("Poisson reduction is exact") {
    const auto params = HawkesParams::univariate(0.5, 0.0, 1.0);
    const auto stream = test::stream_of({1.0, 2.0, 3.0}, 3.0);
    const double expected = -0.5 * 3.0 + 3.0 * std::log(0.5);
    CHECK(loglik_uni(params, stream) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(loglik_uni_naive(params, stream) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("single event at the horizon removes the excitation compensator") {
    const auto params = HawkesParams::univariate(0.1, 0.7, 2.3);
    const auto stream = test::stream_of({2.0}, 2.0);
    LoglikOptions options{HorizonMode::LastEvent};
    const double expected = -0.2 + std::log(0.1);
    CHECK(loglik_uni(params, stream, options) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("large decay limit matches -mu t_n + n log mu") {
    const auto truth = HawkesParams::univariate(0.1, 0.5, 1.2);
    const SimSpec spec{truth, StopAtHorizon{1000.0}, 42};
    const EventStream stream = simulate(spec);
    REQUIRE(stream.size() > 50);
    auto params = truth;
    params.beta = Decay(1e8);
    const LoglikOptions options{HorizonMode::LastEvent};
    const double limit =
        -0.1 * stream.last_time() + static_cast<double>(stream.size()) * std::log(0.1);
    CHECK(loglik_uni(params, stream, options) == doctest::Approx(limit).epsilon(1e-6));
    CHECK(std::abs(loglik_uni(params, stream, options) - limit) < 1e-4);
}

TEST_CASE("recursive evaluation matches the quadratic-time oracle") {
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        const auto params = HawkesParams::univariate(
            rng.uniform(0.05, 2.0), rng.uniform(0.0, 1.5), rng.uniform(0.2, 4.0));
        const auto stream = test::random_stream(rng, 1 + rng.index(300), 1, rng.uniform(0.2, 2.0));
        for (auto mode : {HorizonMode::StreamT, HorizonMode::LastEvent}) {
            const LoglikOptions options{mode};
            const double fast = loglik_uni(params, stream, options);
            const double slow = loglik_uni_naive(params, stream, options);
            CHECK(std::abs(fast - slow) <= 1e-9 * std::max(1.0, std::abs(slow)));
        }
    }
}

TEST_CASE("multivariate log-likelihood agrees with loglik_uni for M=1") {
    Rng rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        const auto params = HawkesParams::univariate(
            rng.uniform(0.05, 2.0), rng.uniform(0.0, 1.5), rng.uniform(0.2, 4.0));
        const auto stream = test::random_stream(rng, 1 + rng.index(120), 1, 0.7);
        CHECK(loglik_multi(params, stream) ==
              doctest::Approx(loglik_uni(params, stream)).epsilon(1e-13));
    }
}

TEST_CASE("multivariate log-likelihood with zero excitation is a Poisson sum") {
    HawkesParams params;
    params.mu = {0.4, 0.9};
    params.alpha = {{0.0, 0.0}, {0.0, 0.0}};
    params.beta = Decay(1.0);
    Rng rng(17);
    const auto stream = test::random_stream(rng, 60, 2, 0.4);
    std::size_t n0 = 0;
    for (const auto& e : stream.events) n0 += e.dim == 0 ? 1 : 0;
    const double expected = -0.4 * stream.horizon + static_cast<double>(n0) * std::log(0.4) -
                            0.9 * stream.horizon +
                            static_cast<double>(stream.size() - n0) * std::log(0.9);
    CHECK(loglik_multi(params, stream) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("multivariate log-likelihood matches the nested-sum oracle") {
    Rng rng(19);
    for (int rep = 0; rep < 25; ++rep) {
        HawkesParams params;
        params.mu = {rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)};
        params.alpha = {{rng.uniform(0.0, 0.8), rng.uniform(0.0, 0.8)},
                        {rng.uniform(0.0, 0.8), rng.uniform(0.0, 0.8)}};
        if (rep % 2 == 0) {
            params.beta = Decay(rng.uniform(0.5, 3.0));
        } else {
            params.beta = Decay(Matrix{{rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0)},
                                       {rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0)}});
        }
        const auto stream = test::random_stream(rng, 1 + rng.index(150), 2, 0.5);
        for (auto mode : {HorizonMode::StreamT, HorizonMode::LastEvent}) {
            const LoglikOptions options{mode};
            const double fast = loglik_multi(params, stream, options);
            const double slow = test::naive_loglik_multi(params, stream, options);
            CHECK(std::abs(fast - slow) <= 1e-9 * std::max(1.0, std::abs(slow)));
        }
    }
}

TEST_CASE("empty streams are rejected, zero baseline yields -inf not a throw") {
    const auto params = HawkesParams::univariate(0.5, 0.1, 1.0);
    EventStream empty;
    empty.horizon = 1.0;
    CHECK_THROWS_WITH_AS((void)loglik_uni(params, empty), doctest::Contains("EmptyStream"),
                         Error);

    const auto zero_mu = HawkesParams::univariate(0.0, 0.5, 1.0);
    const auto stream = test::stream_of({1.0, 2.0}, 3.0);
    CHECK(loglik_uni(zero_mu, stream) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("extending the horizon lowers the log-likelihood by at least mu dT") {
    const auto params = HawkesParams::univariate(0.3, 0.5, 1.5);
    Rng rng(23);
    auto stream = test::random_stream(rng, 40, 1, 0.6);
    const double base = loglik_uni(params, stream);
    auto longer = stream;
    longer.horizon += 5.0;
    const double extended = loglik_uni(params, longer);
    CHECK(extended < base);
    CHECK(base - extended >= 0.3 * 5.0 - 1e-12);
}

TEST_CASE("rescaling with zero excitation returns baseline-scaled gaps") {
    const auto params = HawkesParams::univariate(0.4, 0.0, 1.0);
    const auto stream = test::stream_of({1.0, 3.0, 3.5}, 4.0);
    const auto gaps = rescale(params, stream);
    REQUIRE(gaps.size() == 3);
    CHECK(gaps[0] == doctest::Approx(0.4 * 1.0));
    CHECK(gaps[1] == doctest::Approx(0.4 * 2.0));
    CHECK(gaps[2] == doctest::Approx(0.4 * 0.5));
}

TEST_CASE("rescaled gaps from the true model pass K-S against Exp(1)") {
    const auto truth = HawkesParams::univariate(0.1, 0.5, 1.2);
    std::size_t passes = 0;
    for (int seed = 0; seed < 50; ++seed) {
        const EventStream stream = simulate({truth, StopAtHorizon{1000.0}, static_cast<std::uint64_t>(900 + seed)});
        const auto gaps = rescale(truth, stream);
        if (gaps.size() < 10) continue;
        const double d = ks_exp1(gaps);
        if (ks_pvalue_one_sample(d, gaps.size()) >= 0.01) ++passes;
    }
    CHECK(passes >= 46);
}

TEST_CASE("multivariate rescaled gaps at the truth are unit exponential") {
    HawkesParams params;
    params.mu = {0.1, 0.5};
    params.alpha = {{0.1, 0.7}, {0.7, 0.2}};
    params.beta = Decay(1.2);
    std::size_t passes = 0, runs = 0;
    for (int seed = 0; seed < 30; ++seed) {
        const EventStream stream =
            simulate({params, StopAtHorizon{400.0}, static_cast<std::uint64_t>(2200 + seed)});
        const auto gaps = rescale(params, stream);
        if (gaps.size() < 50) continue;
        ++runs;
        if (ks_pvalue_one_sample(ks_exp1(gaps), gaps.size()) >= 0.01) ++passes;
    }
    REQUIRE(runs >= 25);
    CHECK(passes >= runs - 2);
}

TEST_CASE("a tenfold decay error inflates the K-S distance on average") {
    const auto truth = HawkesParams::univariate(0.1, 0.5, 1.2);
    auto wrong = truth;
    wrong.beta = Decay(12.0);
    double mean_true = 0.0, mean_wrong = 0.0;
    for (int seed = 0; seed < 100; ++seed) {
        const EventStream stream = simulate({truth, StopAtHorizon{600.0}, static_cast<std::uint64_t>(5000 + seed)});
        if (stream.size() < 10) continue;
        mean_true += ks_exp1(rescale(truth, stream));
        mean_wrong += ks_exp1(rescale(wrong, stream));
    }
    CHECK(mean_wrong > mean_true);
}

TEST_CASE("scan handles degenerate grids and rejects empty input") {
    const auto truth = HawkesParams::univariate(0.1, 0.5, 1.2);
    const RealizationSet realizations = simulate_batch({truth, StopAtHorizon{200.0}, 0}, 5, 77);
    const ScanResult single = loglik_scan(truth, realizations, {1.2}, 1);
    CHECK(single.beta_grid.size() == 1);
    CHECK(single.ci_low[0] <= single.mean_negloglik[0]);
    CHECK(single.ci_high[0] >= single.mean_negloglik[0]);

    CHECK_THROWS_AS((void)loglik_scan(truth, {}, {1.0}, 1), Error);
    CHECK_THROWS_AS((void)loglik_scan(truth, realizations, {}, 1), Error);
    CHECK_THROWS_AS((void)loglik_scan(truth, realizations, {0.0}, 1), Error);
}

TEST_CASE("scan over the wide grid localizes the basin near the true decay") {
    const auto truth = HawkesParams::univariate(0.1, 0.5, 1.2);
    const RealizationSet realizations =
        simulate_batch({truth, StopAtHorizon{1000.0}, 0}, 100, 4242);
    const auto grid = make_log_grid({60, -1.0, 2.0});
    const ScanResult scan = loglik_scan(truth, realizations, grid, 9);

    std::size_t argmin = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (scan.mean_negloglik[i] < scan.mean_negloglik[argmin]) argmin = i;
        CHECK(scan.ci_low[i] <= scan.mean_negloglik[i]);
        CHECK(scan.ci_high[i] >= scan.mean_negloglik[i]);
    }
    CHECK(grid[argmin] >= 0.5 * 1.2);
    CHECK(grid[argmin] <= 2.0 * 1.2);

    // Non-convexity witness: curvature changes sign along the curve.
    bool pos = false, neg = false;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double dd = scan.mean_negloglik[i + 1] - 2.0 * scan.mean_negloglik[i] +
                          scan.mean_negloglik[i - 1];
        pos = pos || dd > 0.0;
        neg = neg || dd < 0.0;
    }
    CHECK(pos);
    CHECK(neg);
}
