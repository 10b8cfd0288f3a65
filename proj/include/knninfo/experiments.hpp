#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "knninfo/distributions.hpp"
#include "knninfo/estimators.hpp"

namespace knninfo {

enum class EstimatorKind { KL, TruncatedKL, KSG };

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string& name);

/// One bias/variance convergence experiment: estimator, target
/// distribution, sample-size grid, and the adaptive-trial stopping rule
/// (run trials until the ci_level confidence interval of the bias is
/// shorter than uncertainty_target times its magnitude).
struct ExperimentSpec {
    DistributionSpec distribution = DistributionSpec::gaussian_std(1);
    EstimatorKind estimator = EstimatorKind::KL;
    int k = 3;
    std::optional<Metric> metric;          // default: l2 for entropy, linf for KSG
    std::optional<Truncation> truncation;  // TruncatedKL only
    std::vector<std::int64_t> n_grid;
    std::uint64_t seed = 1;
    double uncertainty_target = 0.05;
    double ci_level = 0.99;
    std::int64_t min_trials = 100;
    std::int64_t max_trials = 1000000;
    std::optional<std::int64_t> bias_fit_min_n;
    std::optional<double> tau;    // tail exponent override
    std::optional<double> alpha;  // moment order; tau approaches alpha/(alpha+d)

    Metric resolved_metric() const;
    double resolved_tau() const;
    void validate() const;
};

struct CellRow {
    std::int64_t n = 0;
    std::int64_t trials = 0;
    double bias_mean = 0.0;
    double bias_ci_halfwidth = 0.0;
    double variance = 0.0;
    double variance_ci_halfwidth = 0.0;
    bool converged = false;
};

struct FittedRates {
    double bias_slope = 0.0;
    double variance_slope = 0.0;
    std::int64_t bias_fit_min_n = 0;
    int bias_rows_used = 0;
    int variance_rows_used = 0;
};

struct TheoreticalRates {
    double bias_slope = 0.0;
    double variance_slope = 0.0;
};

struct RateModel {
    EstimatorKind kind = EstimatorKind::KL;
    int dx = 1;
    int dy = 0;
    double tau = 1.0;

    static double tau_from_alpha(double alpha, int d);
};

/// Convergence-rate exponents predicted by the bias/variance bounds,
/// log factors dropped: entropy bias 2*tau/(dx+2), KSG bias
/// min(2*tau/(dz+2), min(dx,dy)/dz), variance 1 for both.
TheoreticalRates theoretical_rates(const RateModel& model);

struct ConvergenceReport {
    ExperimentSpec spec;
    double truth = 0.0;
    std::vector<CellRow> rows;
    FittedRates fitted;
    TheoreticalRates theoretical;
    std::vector<std::string> warnings;
};

/// One estimate on a fresh sample of size n; trial indexing is part of
/// the seed derivation, so results are reproducible cell by cell.
double run_trial(const ExperimentSpec& spec, std::int64_t n, std::int64_t trial);

/// Adaptive-trials cell: repeats run_trial in batches of 100 until the
/// relative uncertainty of the bias falls below the target or max_trials
/// is reached (converged=false then). Thread count never changes the
/// result.
CellRow run_cell(const ExperimentSpec& spec, std::int64_t n, int threads = 1);

struct AdaptiveParams {
    double truth = 0.0;
    double uncertainty_target = 0.05;
    double ci_level = 0.99;
    std::int64_t min_trials = 100;
    std::int64_t max_trials = 1000000;
};

/// The stopping loop behind run_cell, with the per-trial estimate
/// supplied by trial_fn (which must be safe to call concurrently when
/// threads > 1).
CellRow run_adaptive_cell(const std::function<double(std::int64_t)>& trial_fn,
                          const AdaptiveParams& params, std::int64_t n, int threads = 1);

/// OLS slopes of log10|bias| (rows with n >= bias_fit_min_n) and of
/// log10 variance (all rows) against log10 n, reported negated so a
/// positive value is a decay rate. Rows whose |bias| is at or below
/// machine noise are excluded with a warning.
FittedRates fit_rates(const std::vector<CellRow>& rows, std::int64_t bias_fit_min_n,
                      double truth_scale, std::vector<std::string>* warnings);

ConvergenceReport run_experiment(const ExperimentSpec& spec, int threads = 1);

/// Inverse standard normal CDF (used for the confidence intervals).
double inverse_normal_cdf(double p);

}  // namespace knninfo
