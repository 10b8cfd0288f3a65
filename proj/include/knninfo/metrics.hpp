#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace knninfo {

/// A norm on a single real vector space.
struct Metric {
    enum class Kind { Euclidean, Chebyshev };

    Kind kind = Kind::Euclidean;

    static Metric euclidean() { return Metric{Kind::Euclidean}; }
    static Metric chebyshev() { return Metric{Kind::Chebyshev}; }
};

/// Max-composition of two marginal metrics on a product space of
/// dimension dx + dy:  d((x,y),(x',y')) = max(dx_metric, dy_metric).
struct JointMetric {
    Metric x_metric = Metric::chebyshev();
    Metric y_metric = Metric::chebyshev();
    int dx = 1;
    int dy = 1;
};

double distance(const Metric& m, std::span<const double> a, std::span<const double> b);
double distance(const JointMetric& m, std::span<const double> a, std::span<const double> b);

/// Volume of the unit ball of the norm in d dimensions.
/// Chebyshev: 2^d.  Euclidean: pi^(d/2) / Gamma(d/2 + 1).
double unit_ball_volume(const Metric& m, int d);

/// ln of unit_ball_volume, computed without overflow for large d.
double log_unit_ball_volume(const Metric& m, int d);

namespace detail {

// A metric flattened to contiguous coordinate blocks combined by max.
// A plain metric is one block; a joint metric is two. This lets the
// kd-tree handle both with a single code path.
struct MetricBlock {
    int begin = 0;
    int end = 0;
    Metric::Kind kind = Metric::Kind::Euclidean;
};

struct FlatMetric {
    std::vector<MetricBlock> blocks;

    static FlatMetric from(const Metric& m, int dim);
    static FlatMetric from(const JointMetric& m);

    int dim() const { return blocks.empty() ? 0 : blocks.back().end; }

    // Block norms accumulate with plain sums so that the floating-point
    // ordering mindist <= dist <= maxdist is preserved term by term
    // (rounding is monotone). One-dimensional Euclidean blocks use
    // |a-b| directly, which also keeps huge coordinates overflow-free.
    double dist(const double* a, const double* b) const {
        double worst = 0.0;
        for (const auto& blk : blocks) {
            const double v = block_norm(blk, a, b);
            if (v > worst) worst = v;
        }
        return worst;
    }

    // Lower bound on dist(q, p) over all p in the box [lo, hi].
    double min_dist_to_box(const double* q, const double* lo, const double* hi) const {
        double worst = 0.0;
        for (const auto& blk : blocks) {
            double v;
            if (blk.kind == Metric::Kind::Euclidean && blk.end - blk.begin > 1) {
                double s = 0.0;
                for (int j = blk.begin; j < blk.end; ++j) {
                    const double g = gap(q[j], lo[j], hi[j]);
                    s += g * g;
                }
                v = std::sqrt(s);
            } else {
                v = 0.0;
                for (int j = blk.begin; j < blk.end; ++j) {
                    const double g = gap(q[j], lo[j], hi[j]);
                    if (g > v) v = g;
                }
            }
            if (v > worst) worst = v;
        }
        return worst;
    }

    // Upper bound on dist(q, p) over all p in the box [lo, hi].
    double max_dist_to_box(const double* q, const double* lo, const double* hi) const {
        double worst = 0.0;
        for (const auto& blk : blocks) {
            double v;
            if (blk.kind == Metric::Kind::Euclidean && blk.end - blk.begin > 1) {
                double s = 0.0;
                for (int j = blk.begin; j < blk.end; ++j) {
                    const double g = far(q[j], lo[j], hi[j]);
                    s += g * g;
                }
                v = std::sqrt(s);
            } else {
                v = 0.0;
                for (int j = blk.begin; j < blk.end; ++j) {
                    const double g = far(q[j], lo[j], hi[j]);
                    if (g > v) v = g;
                }
            }
            if (v > worst) worst = v;
        }
        return worst;
    }

private:
    static double block_norm(const MetricBlock& blk, const double* a, const double* b) {
        if (blk.kind == Metric::Kind::Euclidean && blk.end - blk.begin > 1) {
            double s = 0.0;
            for (int j = blk.begin; j < blk.end; ++j) {
                const double d = a[j] - b[j];
                s += d * d;
            }
            return std::sqrt(s);
        }
        double worst = 0.0;
        for (int j = blk.begin; j < blk.end; ++j) {
            const double d = std::fabs(a[j] - b[j]);
            if (d > worst) worst = d;
        }
        return worst;
    }

    static double gap(double q, double lo, double hi) {
        if (q < lo) return lo - q;
        if (q > hi) return q - hi;
        return 0.0;
    }

    static double far(double q, double lo, double hi) {
        const double a = std::fabs(q - lo);
        const double b = std::fabs(hi - q);
        return a > b ? a : b;
    }
};

}  // namespace detail
}  // namespace knninfo
