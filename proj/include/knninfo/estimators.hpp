#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "knninfo/kdtree.hpp"
#include "knninfo/metrics.hpp"
#include "knninfo/samples.hpp"

namespace knninfo {

/// Truncation radius a_N = A * N^(-beta). When beta is not given it
/// defaults to 1/(d+2) at estimation time.
struct Truncation {
    double A = 1.0;
    std::optional<double> beta;
};

struct EstimatorConfig {
    int k = 3;
    Metric metric = Metric::euclidean();
    std::optional<Truncation> truncation;
};

struct Diagnostics {
    std::int64_t truncated_points = 0;
    double mean_epsilon = 0.0;
    double mean_rho = 0.0;
    double truncation_radius = 0.0;  // 0 when truncation is inactive
};

struct EstimateResult {
    double value = 0.0;  // nats
    EstimatorConfig config;
    Diagnostics diagnostics;
};

/// Per-point neighbor statistics backing the estimators: eps(i) is the
/// k-th neighbor distance, rho(i) = min(eps(i), a_N), and n_x/n_y are the
/// strict marginal counts (joint queries only). tie_count is the number
/// of neighbors exactly at distance eps(i) beyond the k-th.
struct NeighborStats {
    std::vector<double> epsilon;
    std::vector<double> rho;
    std::vector<std::int64_t> n_x;
    std::vector<std::int64_t> n_y;
    std::int64_t tie_count = 0;
};

/// Kozachenko-Leonenko entropy estimate, in nats:
///   -psi(k) + psi(N) + ln c_d + (d/N) * sum ln eps(i)
EstimateResult kl_entropy(const SampleSet& samples, const EstimatorConfig& cfg);

/// KL estimate with eps(i) replaced by rho(i) = min(eps(i), A * N^-beta).
EstimateResult truncated_kl_entropy(const SampleSet& samples, const EstimatorConfig& cfg);

/// KSG mutual information estimate, in nats:
///   psi(N) + psi(k) - (1/N) sum [psi(n_x(i)+1) + psi(n_y(i)+1)]
/// with eps(i) taken in the joint max metric and strict marginal counts.
/// Never truncated.
EstimateResult ksg_mi(const SampleSet& x, const SampleSet& y, int k, const JointMetric& metric);

/// KSG with Chebyshev marginals on both spaces.
EstimateResult ksg_mi(const SampleSet& x, const SampleSet& y, int k);

/// Expose the per-point intermediates for diagnostics and tests. Pass y
/// for the joint (KSG) statistics; cfg.metric is then used on both
/// marginals.
NeighborStats neighbor_stats(const SampleSet& x, const SampleSet* y, const EstimatorConfig& cfg);

}  // namespace knninfo
