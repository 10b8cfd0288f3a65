#pragma once

// Brute-force neighbor oracles used to verify the kd-tree exactly. These
// deliberately avoid NeighborIndex; distances come from the public
// distance() functions.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "knninfo/kdtree.hpp"
#include "knninfo/metrics.hpp"
#include "knninfo/samples.hpp"

namespace testsupport {

template <typename MetricT>
knninfo::KnnResult brute_knn(const knninfo::SampleSet& pts, const MetricT& metric, std::int64_t i,
                             int k) {
    std::vector<std::pair<double, std::int64_t>> all;
    all.reserve(pts.n() - 1);
    for (std::int64_t j = 0; j < pts.n(); ++j) {
        if (j == i) continue;
        all.emplace_back(knninfo::distance(metric, pts.row(i), pts.row(j)), j);
    }
    std::sort(all.begin(), all.end());
    knninfo::KnnResult result;
    for (int r = 0; r < k; ++r) {
        result.distances.push_back(all[r].first);
        result.indices.push_back(all[r].second);
    }
    return result;
}

template <typename MetricT>
std::int64_t brute_count(const knninfo::SampleSet& pts, const MetricT& metric, std::int64_t i,
                         double r) {
    std::int64_t count = 0;
    for (std::int64_t j = 0; j < pts.n(); ++j) {
        if (j == i) continue;
        if (knninfo::distance(metric, pts.row(i), pts.row(j)) < r) ++count;
    }
    return count;
}

}  // namespace testsupport
