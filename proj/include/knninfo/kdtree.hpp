#pragma once

#include <cstdint>
#include <vector>

#include "knninfo/metrics.hpp"
#include "knninfo/samples.hpp"

namespace knninfo {

/// k nearest neighbors of one stored sample, query point excluded.
/// Distances are nondecreasing; exact ties are broken toward the
/// smaller point index.
struct KnnResult {
    std::vector<std::int64_t> indices;
    std::vector<double> distances;
};

/// Exact k-nearest-neighbor index over a point set. Median-split kd-tree
/// with tight bounding boxes and leaf size 16. Immutable after
/// construction; queries are safe from any number of threads.
class NeighborIndex {
public:
    NeighborIndex(const SampleSet& points, const Metric& metric);
    NeighborIndex(const SampleSet& points, const JointMetric& metric);

    std::int64_t size() const { return n_; }
    int dim() const { return dim_; }

    /// The k nearest points to stored sample i among the other n-1.
    KnnResult knn_of_sample(std::int64_t i, int k) const;

    /// Distance from sample i to its k-th nearest neighbor.
    double kth_distance(std::int64_t i, int k) const;

    /// Number of points j != i with dist(x(j), x(i)) strictly less than r.
    std::int64_t count_within(std::int64_t i, double r) const;

private:
    struct Node {
        std::int32_t left = -1;   // child node ids, -1 for leaves
        std::int32_t right = -1;
        std::int32_t begin = 0;   // range into perm_
        std::int32_t end = 0;
    };

    void build(const SampleSet& points);
    std::int32_t build_node(std::int32_t begin, std::int32_t end);
    void check_query(std::int64_t i) const;

    std::int64_t n_ = 0;
    int dim_ = 0;
    detail::FlatMetric metric_;
    std::vector<double> pts_;          // permuted rows, leaf contiguous
    std::vector<std::int32_t> perm_;   // position -> original index
    std::vector<std::int32_t> where_;  // original index -> position
    std::vector<Node> nodes_;
    std::vector<double> box_lo_;       // node id * dim_
    std::vector<double> box_hi_;
};

}  // namespace knninfo
