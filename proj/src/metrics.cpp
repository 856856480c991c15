#include "hawkes/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hawkes {

double metric_rmse(const std::vector<double>& estimates, double truth) {
    if (estimates.empty()) fail(ErrorCode::EmptyInput, "rmse of an empty sample");
    double sum = 0.0;
    for (double x : estimates) {
        const double d = x - truth;
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(estimates.size()));
}

double metric_ks(const std::vector<double>& sample_a, const std::vector<double>& sample_b) {
    if (sample_a.empty() || sample_b.empty()) {
        fail(ErrorCode::EmptyInput, "two-sample K-S needs nonempty samples");
    }
    std::vector<double> a = sample_a;
    std::vector<double> b = sample_b;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

namespace {

template <typename Cdf>
double ks_one_sample(const std::vector<double>& sample, Cdf cdf) {
    if (sample.empty()) fail(ErrorCode::EmptyInput, "one-sample K-S needs a nonempty sample");
    std::vector<double> xs = sample;
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

} // namespace

double ks_exp1(const std::vector<double>& sample) {
    return ks_one_sample(sample, [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); });
}

double ks_standard_normal(const std::vector<double>& sample) {
    return ks_one_sample(sample, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
}

double ks_pvalue_one_sample(double statistic, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
    if (lambda < 1e-8) return 1.0;
    // Q_KS(lambda) = 2 sum_j (-1)^{j-1} exp(-2 j^2 lambda^2)
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

std::vector<double> inter_event_times(const EventStream& stream) {
    std::vector<double> gaps;
    gaps.reserve(stream.size());
    double prev = 0.0;
    for (const Event& e : stream.events) {
        gaps.push_back(e.t - prev);
        prev = e.t;
    }
    return gaps;
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) fail(ErrorCode::EmptyInput, "mean of an empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
    if (xs.size() < 2) fail(ErrorCode::EmptyInput, "variance needs at least two values");
    const double m = mean(xs);
    double sum = 0.0;
    for (double x : xs) sum += (x - m) * (x - m);
    return sum / static_cast<double>(xs.size() - 1);
}

std::vector<double> standardize(const std::vector<double>& xs) {
    const double m = mean(xs);
    const double sd = std::sqrt(variance(xs));
    if (!(sd > 0.0)) fail(ErrorCode::InvalidArgument, "standardize with zero spread");
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (xs[i] - m) / sd;
    return out;
}

} // namespace hawkes
