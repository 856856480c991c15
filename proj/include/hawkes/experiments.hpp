#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hawkes/changepoint.hpp"
#include "hawkes/estimators.hpp"

namespace hawkes {

enum class ExperimentScale { Desk, Full };

struct ExperimentConfig {
    ExperimentScale scale = ExperimentScale::Desk;
    std::uint64_t seed = 1;
    // Optional overrides of the per-scale defaults.
    std::optional<std::size_t> repetitions;   // outer repetitions / seed count
    std::optional<std::size_t> realizations;  // K per condition
    std::optional<std::size_t> events_per_realization;
    std::optional<double> horizon;
    std::vector<std::string> estimators;      // subset of nonlinear/grid/smbo/em
    std::optional<std::size_t> smbo_budget;
    std::optional<std::size_t> kstar;         // changepoint break index (0-based)
    std::optional<std::string> sequential_mode;  // "pooled" | "iid"
};

struct MetricRow {
    std::string condition;  // e.g. estimator name or "c=0.75"
    std::string metric;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::string ci_method;  // "empirical_bootstrap" | "bayesian_bootstrap" | "none"
};

struct ReportTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
    std::string name;
    std::vector<std::pair<std::string, std::string>> config_echo;
    std::vector<MetricRow> metrics;
    std::vector<ReportTable> tables;
    std::vector<std::uint64_t> seeds;
    double runtime_seconds = 0.0;  // reported via the run manifest, not report.json
};

// Standardized fitted-decay distributions with and without a stationarity
// break, scored by K-S distance to the standard Gaussian.
ExperimentReport exp_estimate_distribution(const ExperimentConfig& config);

// Negative log-likelihood scans over large/medium/small decay ranges around
// the true value.
ExperimentReport exp_loglik_scan(const ExperimentConfig& config);

// Influence-direction recovery across the credible interval of the fitted
// decay, for cross-excitation ratios c in [0.75, 1.25].
ExperimentReport exp_influence_direction(const ExperimentConfig& config);

// Prior-hypothesis diagnosis: RMSE per estimator and the shift b0 - beta'.
ExperimentReport exp_diagnosis(const ExperimentConfig& config);

// Changepoint recovery: ordering accuracy and kappa localization under a
// mid-sequence decay break.
ExperimentReport exp_changepoint(const ExperimentConfig& config);

// Estimator benchmark on random stationary two-dimensional processes
// against fixed-decay baselines.
ExperimentReport exp_estimator_bench(const ExperimentConfig& config);

ExperimentReport run_experiment(const std::string& name, const ExperimentConfig& config);

// report.json plus one plot-ready CSV per table. Timing is left to the run
// manifest so reruns are byte-identical.
std::vector<std::string> write_report(const std::filesystem::path& directory,
                                      const ExperimentReport& report);

} // namespace hawkes
