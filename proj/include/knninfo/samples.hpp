#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace knninfo {

/// An N x d batch of finite real-valued sample points, row major.
class SampleSet {
public:
    SampleSet(std::int64_t n, int d, std::vector<double> data);

    std::int64_t n() const { return n_; }
    int d() const { return d_; }

    std::span<const double> row(std::int64_t i) const {
        return {data_.data() + i * d_, static_cast<std::size_t>(d_)};
    }
    std::span<const double> data() const { return data_; }

    /// Column-wise concatenation [x | y]; both sets must have equal n.
    static SampleSet concat_columns(const SampleSet& x, const SampleSet& y);

private:
    std::int64_t n_;
    int d_;
    std::vector<double> data_;
};

/// Sum of a sequence with the values sorted ascending first and then
/// combined pairwise. The result depends only on the multiset of values,
/// so estimator sums are invariant under sample permutation and thread
/// scheduling.
double sorted_pairwise_sum(std::vector<double> values);

/// Plain pairwise summation in the given order.
double pairwise_sum(std::span<const double> values);

}  // namespace knninfo
