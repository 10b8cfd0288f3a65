#include "knninfo/metrics.hpp"

#include <numbers>
#include <stdexcept>

#include "knninfo/special.hpp"

namespace knninfo {

double distance(const Metric& m, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("distance: dimension mismatch");
    }
    const auto flat = detail::FlatMetric::from(m, static_cast<int>(a.size()));
    return flat.dist(a.data(), b.data());
}

double distance(const JointMetric& m, std::span<const double> a, std::span<const double> b) {
    const std::size_t dz = static_cast<std::size_t>(m.dx) + static_cast<std::size_t>(m.dy);
    if (a.size() != dz || b.size() != dz) {
        throw std::invalid_argument("distance: dimension mismatch with joint metric");
    }
    const auto flat = detail::FlatMetric::from(m);
    return flat.dist(a.data(), b.data());
}

double unit_ball_volume(const Metric& m, int d) {
    if (d < 1) {
        throw std::invalid_argument("unit_ball_volume: dimension must be >= 1");
    }
    switch (m.kind) {
        case Metric::Kind::Chebyshev:
            return std::ldexp(1.0, d);
        case Metric::Kind::Euclidean:
            if (d == 1) return 2.0;
            if (d == 2) return std::numbers::pi;
            return std::exp(log_unit_ball_volume(m, d));
    }
    throw std::logic_error("unit_ball_volume: unknown metric kind");
}

double log_unit_ball_volume(const Metric& m, int d) {
    if (d < 1) {
        throw std::invalid_argument("log_unit_ball_volume: dimension must be >= 1");
    }
    switch (m.kind) {
        case Metric::Kind::Chebyshev:
            return d * std::numbers::ln2;
        case Metric::Kind::Euclidean:
            if (d == 1) return std::numbers::ln2;
            if (d == 2) return std::log(std::numbers::pi);
            return 0.5 * d * std::log(std::numbers::pi) - log_gamma(0.5 * d + 1.0);
    }
    throw std::logic_error("log_unit_ball_volume: unknown metric kind");
}

namespace detail {

FlatMetric FlatMetric::from(const Metric& m, int dim) {
    if (dim < 1) {
        throw std::invalid_argument("FlatMetric: dimension must be >= 1");
    }
    return FlatMetric{{MetricBlock{0, dim, m.kind}}};
}

FlatMetric FlatMetric::from(const JointMetric& m) {
    if (m.dx < 1 || m.dy < 1) {
        throw std::invalid_argument("FlatMetric: joint metric dimensions must be >= 1");
    }
    return FlatMetric{{
        MetricBlock{0, m.dx, m.x_metric.kind},
        MetricBlock{m.dx, m.dx + m.dy, m.y_metric.kind},
    }};
}

}  // namespace detail
}  // namespace knninfo
