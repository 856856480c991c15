#pragma once

#include <vector>

#include "hawkes/core.hpp"

namespace hawkes {

// sqrt(mean((x_i - truth)^2))
double metric_rmse(const std::vector<double>& estimates, double truth);

// Two-sample Kolmogorov-Smirnov statistic, sup |F_a - F_b|, in [0, 1].
double metric_ks(const std::vector<double>& sample_a, const std::vector<double>& sample_b);

// One-sample statistics against fixed references.
double ks_exp1(const std::vector<double>& sample);
double ks_standard_normal(const std::vector<double>& sample);

// Asymptotic one-sample K-S p-value with the Stephens small-sample
// correction.
double ks_pvalue_one_sample(double statistic, std::size_t n);

// Inter-event gaps of the merged stream (first gap measured from 0).
std::vector<double> inter_event_times(const EventStream& stream);

double mean(const std::vector<double>& xs);
double variance(const std::vector<double>& xs);  // unbiased

// (x - mean) / stdev elementwise.
std::vector<double> standardize(const std::vector<double>& xs);

} // namespace hawkes
