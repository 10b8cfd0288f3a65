#include "knninfo/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "knninfo/special.hpp"

namespace knninfo {

namespace {

void check_k(int k, std::int64_t n) {
    if (k < 1) {
        throw std::invalid_argument("estimator: k must be >= 1, got " + std::to_string(k));
    }
    if (k >= n) {
        throw std::invalid_argument("estimator: need k < N, got k=" + std::to_string(k) +
                                    " with N=" + std::to_string(n));
    }
}

[[noreturn]] void throw_duplicates(const std::vector<std::int64_t>& idx, const char* what) {
    std::string msg = std::string(what) + " produce zero k-th neighbor distances at sample indices ";
    const std::size_t shown = std::min<std::size_t>(idx.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) {
        if (i) msg += ", ";
        msg += std::to_string(idx[i]);
    }
    if (idx.size() > shown) {
        msg += " and " + std::to_string(idx.size() - shown) + " more";
    }
    msg += "; jitter or deduplicate the data";
    throw std::invalid_argument(msg);
}

std::vector<double> kth_distances(const NeighborIndex& index, int k, const char* what) {
    const std::int64_t n = index.size();
    std::vector<double> eps(n);
    std::vector<std::int64_t> zeros;
    for (std::int64_t i = 0; i < n; ++i) {
        eps[i] = index.kth_distance(i, k);
        if (eps[i] == 0.0) zeros.push_back(i);
    }
    if (!zeros.empty()) throw_duplicates(zeros, what);
    return eps;
}

double resolve_beta(const Truncation& t, int d) {
    const double beta = t.beta.value_or(1.0 / (d + 2));
    if (!(t.A > 0.0)) {
        throw std::invalid_argument("truncation: A must be positive");
    }
    if (!(beta > 0.0) || !(beta < 1.0 / d)) {
        throw std::invalid_argument("truncation: beta must lie in (0, 1/d), got " +
                                    std::to_string(beta) + " with d=" + std::to_string(d));
    }
    return beta;
}

EstimateResult kl_core(const SampleSet& samples, const EstimatorConfig& cfg, bool truncate) {
    const std::int64_t n = samples.n();
    const int d = samples.d();
    check_k(cfg.k, n);

    NeighborIndex index(samples, cfg.metric);
    std::vector<double> eps = kth_distances(index, cfg.k, "duplicate points");

    double a_n = 0.0;
    std::int64_t truncated = 0;
    std::vector<double> rho = eps;
    if (truncate) {
        const Truncation& t = cfg.truncation.value();
        const double beta = resolve_beta(t, d);
        a_n = t.A * std::pow(static_cast<double>(n), -beta);
        for (auto& r : rho) {
            if (r > a_n) {
                r = a_n;
                ++truncated;
            }
        }
    }

    std::vector<double> log_rho(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) log_rho[i] = std::log(rho[i]);

    EstimateResult out;
    out.config = cfg;
    out.value = -digamma(cfg.k) + digamma(static_cast<double>(n)) +
                log_unit_ball_volume(cfg.metric, d) +
                d * sorted_pairwise_sum(std::move(log_rho)) / static_cast<double>(n);
    out.diagnostics.truncated_points = truncated;
    out.diagnostics.truncation_radius = a_n;
    out.diagnostics.mean_epsilon = sorted_pairwise_sum(std::move(eps)) / static_cast<double>(n);
    out.diagnostics.mean_rho =
        truncate ? sorted_pairwise_sum(std::move(rho)) / static_cast<double>(n)
                 : out.diagnostics.mean_epsilon;
    return out;
}

}  // namespace

EstimateResult kl_entropy(const SampleSet& samples, const EstimatorConfig& cfg) {
    if (cfg.truncation) {
        throw std::invalid_argument("kl_entropy: config has truncation set; use truncated_kl_entropy");
    }
    return kl_core(samples, cfg, false);
}

EstimateResult truncated_kl_entropy(const SampleSet& samples, const EstimatorConfig& cfg) {
    if (!cfg.truncation) {
        EstimatorConfig with_default = cfg;
        with_default.truncation = Truncation{};
        return kl_core(samples, with_default, true);
    }
    return kl_core(samples, cfg, true);
}

EstimateResult ksg_mi(const SampleSet& x, const SampleSet& y, int k, const JointMetric& metric) {
    if (x.n() != y.n()) {
        throw std::invalid_argument("ksg_mi: sample counts differ (" + std::to_string(x.n()) +
                                    " vs " + std::to_string(y.n()) + ")");
    }
    if (metric.dx != x.d() || metric.dy != y.d()) {
        throw std::invalid_argument("ksg_mi: joint metric dimensions do not match the data");
    }
    const std::int64_t n = x.n();
    check_k(k, n);

    const SampleSet joint = SampleSet::concat_columns(x, y);
    NeighborIndex joint_index(joint, metric);
    NeighborIndex x_index(x, metric.x_metric);
    NeighborIndex y_index(y, metric.y_metric);

    std::vector<double> eps = kth_distances(joint_index, k, "duplicate joint points");

    std::vector<double> psi_nx(n), psi_ny(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const auto nx = x_index.count_within(i, eps[i]);
        const auto ny = y_index.count_within(i, eps[i]);
        psi_nx[i] = digamma(static_cast<double>(nx + 1));
        psi_ny[i] = digamma(static_cast<double>(ny + 1));
    }

    EstimateResult out;
    out.config.k = k;
    out.config.metric = metric.x_metric;
    out.value = digamma(static_cast<double>(n)) + digamma(static_cast<double>(k)) -
                sorted_pairwise_sum(std::move(psi_nx)) / static_cast<double>(n) -
                sorted_pairwise_sum(std::move(psi_ny)) / static_cast<double>(n);
    out.diagnostics.mean_epsilon = sorted_pairwise_sum(std::move(eps)) / static_cast<double>(n);
    out.diagnostics.mean_rho = out.diagnostics.mean_epsilon;
    return out;
}

EstimateResult ksg_mi(const SampleSet& x, const SampleSet& y, int k) {
    return ksg_mi(x, y, k,
                  JointMetric{Metric::chebyshev(), Metric::chebyshev(), x.d(), y.d()});
}

NeighborStats neighbor_stats(const SampleSet& x, const SampleSet* y, const EstimatorConfig& cfg) {
    NeighborStats stats;
    if (y == nullptr) {
        const std::int64_t n = x.n();
        check_k(cfg.k, n);
        NeighborIndex index(x, cfg.metric);
        stats.epsilon = kth_distances(index, cfg.k, "duplicate points");
        stats.rho = stats.epsilon;
        if (cfg.truncation) {
            const double beta = resolve_beta(*cfg.truncation, x.d());
            const double a_n = cfg.truncation->A * std::pow(static_cast<double>(n), -beta);
            for (auto& r : stats.rho) r = std::min(r, a_n);
        }
        for (std::int64_t i = 0; i < n; ++i) {
            const double up = std::nextafter(stats.epsilon[i], HUGE_VAL);
            stats.tie_count += index.count_within(i, up) - index.count_within(i, stats.epsilon[i]) - 1;
        }
        return stats;
    }

    if (x.n() != y->n()) {
        throw std::invalid_argument("neighbor_stats: sample counts differ");
    }
    const std::int64_t n = x.n();
    check_k(cfg.k, n);
    const JointMetric metric{cfg.metric, cfg.metric, x.d(), y->d()};
    const SampleSet joint = SampleSet::concat_columns(x, *y);
    NeighborIndex joint_index(joint, metric);
    NeighborIndex x_index(x, cfg.metric);
    NeighborIndex y_index(*y, cfg.metric);

    stats.epsilon = kth_distances(joint_index, cfg.k, "duplicate joint points");
    stats.rho = stats.epsilon;
    stats.n_x.resize(n);
    stats.n_y.resize(n);
    for (std::int64_t i = 0; i < n; ++i) {
        stats.n_x[i] = x_index.count_within(i, stats.epsilon[i]);
        stats.n_y[i] = y_index.count_within(i, stats.epsilon[i]);
        const double up = std::nextafter(stats.epsilon[i], HUGE_VAL);
        stats.tie_count +=
            joint_index.count_within(i, up) - joint_index.count_within(i, stats.epsilon[i]) - 1;
    }
    return stats;
}

}  // namespace knninfo
