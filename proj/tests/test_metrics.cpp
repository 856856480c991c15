#include <doctest.h>

#include <cmath>

#include "hawkes/metrics.hpp"
#include "hawkes/rng.hpp"
#include "test_util.hpp"

using namespace hawkes;

TEST_CASE("rmse basics") {
    CHECK(metric_rmse({1.0, 1.0, 1.0}, 1.0) == 0.0);
    CHECK(metric_rmse({0.0, 2.0}, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)metric_rmse({}, 1.0), Error);

    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> xs(1 + rng.index(30));
        for (auto& x : xs) x = rng.normal(0.0, 2.0);
        const double truth = rng.normal();
        double sum = 0.0;
        for (double x : xs) sum += (x - truth) * (x - truth);
        CHECK(metric_rmse(xs, truth) ==
              doctest::Approx(std::sqrt(sum / xs.size())).epsilon(1e-12));
    }
}

TEST_CASE("two-sample K-S extremes and oracle agreement") {
    CHECK(metric_ks({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
    CHECK(metric_ks({1.0, 2.0}, {5.0, 6.0, 7.0}) == doctest::Approx(1.0));

    Rng rng(9);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> a(1 + rng.index(40)), b(1 + rng.index(40));
        for (auto& x : a) x = rng.normal();
        for (auto& x : b) x = rng.normal(0.3, 1.2);
        CHECK(std::abs(metric_ks(a, b) - test::naive_ks_two_sample(a, b)) < 1e-12);
    }
}

TEST_CASE("one-sample K-S against Exp(1) and the standard normal") {
    // Plug-in quantiles give a small but nonzero distance.
    std::vector<double> exp_grid;
    for (int i = 1; i <= 200; ++i) exp_grid.push_back(-std::log(1.0 - i / 201.0));
    CHECK(ks_exp1(exp_grid) < 0.02);

    Rng rng(33);
    std::vector<double> gauss(2000);
    for (auto& x : gauss) x = rng.normal();
    CHECK(ks_standard_normal(gauss) < 0.05);
    CHECK(ks_pvalue_one_sample(ks_standard_normal(gauss), gauss.size()) > 0.01);
}

TEST_CASE("K-S p-value is calibrated under the null") {
    Rng rng(101);
    std::size_t rejections = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> xs(150);
        for (auto& x : xs) x = rng.exponential(1.0);
        if (ks_pvalue_one_sample(ks_exp1(xs), xs.size()) < 0.05) ++rejections;
    }
    // ~5% nominal; allow binomial 3 sigma.
    CHECK(rejections >= 5);
    CHECK(rejections <= 40);
}

TEST_CASE("inter-event times start from zero") {
    const auto stream = test::stream_of({0.5, 2.0, 2.25}, 3.0);
    const auto gaps = inter_event_times(stream);
    REQUIRE(gaps.size() == 3);
    CHECK(gaps[0] == doctest::Approx(0.5));
    CHECK(gaps[1] == doctest::Approx(1.5));
    CHECK(gaps[2] == doctest::Approx(0.25));
}

TEST_CASE("standardize centers and scales") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto z = standardize(xs);
    CHECK(mean(z) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(variance(z) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)standardize({2.0, 2.0, 2.0}), Error);
}
