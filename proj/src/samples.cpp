#include "knninfo/samples.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace knninfo {

SampleSet::SampleSet(std::int64_t n, int d, std::vector<double> data)
    : n_(n), d_(d), data_(std::move(data)) {
    if (n_ < 2) {
        throw std::invalid_argument("SampleSet: need at least 2 samples, got " + std::to_string(n_));
    }
    if (d_ < 1) {
        throw std::invalid_argument("SampleSet: dimension must be >= 1, got " + std::to_string(d_));
    }
    if (static_cast<std::int64_t>(data_.size()) != n_ * d_) {
        throw std::invalid_argument("SampleSet: data size does not match n*d");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw std::invalid_argument(
                "SampleSet: non-finite value at sample " + std::to_string(i / d_) +
                ", coordinate " + std::to_string(i % d_));
        }
    }
}

SampleSet SampleSet::concat_columns(const SampleSet& x, const SampleSet& y) {
    if (x.n() != y.n()) {
        throw std::invalid_argument("concat_columns: sample counts differ");
    }
    const int d = x.d() + y.d();
    std::vector<double> joined(static_cast<std::size_t>(x.n()) * d);
    for (std::int64_t i = 0; i < x.n(); ++i) {
        auto rx = x.row(i);
        auto ry = y.row(i);
        std::copy(rx.begin(), rx.end(), joined.begin() + i * d);
        std::copy(ry.begin(), ry.end(), joined.begin() + i * d + x.d());
    }
    return SampleSet(x.n(), d, std::move(joined));
}

namespace {

double pairwise(const double* v, std::size_t count) {
    if (count <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += v[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise(v, half) + pairwise(v + half, count - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
    return pairwise(values.data(), values.size());
}

double sorted_pairwise_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return pairwise(values.data(), values.size());
}

}  // namespace knninfo
