#include "knninfo/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

namespace knninfo {

namespace {
constexpr std::int32_t kLeafSize = 16;
}

NeighborIndex::NeighborIndex(const SampleSet& points, const Metric& metric)
    : metric_(detail::FlatMetric::from(metric, points.d())) {
    build(points);
}

NeighborIndex::NeighborIndex(const SampleSet& points, const JointMetric& metric)
    : metric_(detail::FlatMetric::from(metric)) {
    if (metric.dx + metric.dy != points.d()) {
        throw std::invalid_argument("NeighborIndex: joint metric dimensions do not match points");
    }
    build(points);
}

void NeighborIndex::build(const SampleSet& points) {
    n_ = points.n();
    dim_ = points.d();
    if (n_ < 2) {
        throw std::invalid_argument("NeighborIndex: need at least 2 points");
    }

    perm_.resize(n_);
    for (std::int64_t i = 0; i < n_; ++i) perm_[i] = static_cast<std::int32_t>(i);

    // Build on a scratch copy of the rows, permuting indices in place.
    pts_.assign(points.data().begin(), points.data().end());
    std::vector<double> scratch = pts_;

    nodes_.reserve(static_cast<std::size_t>(2 * n_ / kLeafSize + 2));
    build_node(0, static_cast<std::int32_t>(n_));

    // Reorder rows to match perm_ for contiguous leaf scans.
    for (std::int64_t p = 0; p < n_; ++p) {
        const std::int32_t src = perm_[p];
        std::copy(scratch.begin() + static_cast<std::int64_t>(src) * dim_,
                  scratch.begin() + static_cast<std::int64_t>(src) * dim_ + dim_,
                  pts_.begin() + p * dim_);
    }
    where_.resize(n_);
    for (std::int64_t p = 0; p < n_; ++p) where_[perm_[p]] = static_cast<std::int32_t>(p);
}

std::int32_t NeighborIndex::build_node(std::int32_t begin, std::int32_t end) {
    const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{-1, -1, begin, end});
    box_lo_.resize(static_cast<std::size_t>(id + 1) * dim_);
    box_hi_.resize(static_cast<std::size_t>(id + 1) * dim_);

    double* lo = &box_lo_[static_cast<std::size_t>(id) * dim_];
    double* hi = &box_hi_[static_cast<std::size_t>(id) * dim_];
    for (int j = 0; j < dim_; ++j) {
        lo[j] = pts_[static_cast<std::int64_t>(perm_[begin]) * dim_ + j];
        hi[j] = lo[j];
    }
    for (std::int32_t p = begin + 1; p < end; ++p) {
        const double* row = &pts_[static_cast<std::int64_t>(perm_[p]) * dim_];
        for (int j = 0; j < dim_; ++j) {
            if (row[j] < lo[j]) lo[j] = row[j];
            if (row[j] > hi[j]) hi[j] = row[j];
        }
    }

    if (end - begin <= kLeafSize) {
        return id;
    }

    // Split the widest box dimension at the median position.
    int split_dim = 0;
    double widest = hi[0] - lo[0];
    for (int j = 1; j < dim_; ++j) {
        const double span = hi[j] - lo[j];
        if (span > widest) {
            widest = span;
            split_dim = j;
        }
    }
    const std::int32_t mid = begin + (end - begin) / 2;
    std::nth_element(
        perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
        [this, split_dim](std::int32_t a, std::int32_t b) {
            const double va = pts_[static_cast<std::int64_t>(a) * dim_ + split_dim];
            const double vb = pts_[static_cast<std::int64_t>(b) * dim_ + split_dim];
            if (va != vb) return va < vb;
            return a < b;
        });

    const std::int32_t left = build_node(begin, mid);
    const std::int32_t right = build_node(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void NeighborIndex::check_query(std::int64_t i) const {
    if (i < 0 || i >= n_) {
        throw std::out_of_range("NeighborIndex: sample index " + std::to_string(i) +
                                " out of range [0, " + std::to_string(n_) + ")");
    }
}

namespace {

// Max-heap over (distance, index); the lexicographic order implements the
// smaller-index tie-break.
using HeapEntry = std::pair<double, std::int64_t>;
using Heap = std::priority_queue<HeapEntry>;

}  // namespace

KnnResult NeighborIndex::knn_of_sample(std::int64_t i, int k) const {
    check_query(i);
    if (k < 1 || k >= n_) {
        throw std::invalid_argument("knn_of_sample: need 1 <= k <= n-1, got k=" + std::to_string(k) +
                                    " with n=" + std::to_string(n_));
    }
    const double* q = &pts_[static_cast<std::int64_t>(where_[i]) * dim_];
    Heap heap;

    // Iterative DFS, closer child first. A subtree is skipped only when its
    // box lower bound strictly exceeds the current k-th candidate, so points
    // tied with the current worst are always examined.
    std::vector<std::int32_t> stack;
    stack.reserve(64);
    stack.push_back(0);
    while (!stack.empty()) {
        const std::int32_t id = stack.back();
        stack.pop_back();
        const Node& node = nodes_[id];
        if (static_cast<int>(heap.size()) == k &&
            metric_.min_dist_to_box(q, &box_lo_[static_cast<std::size_t>(id) * dim_],
                                    &box_hi_[static_cast<std::size_t>(id) * dim_]) > heap.top().first) {
            continue;
        }
        if (node.left < 0) {
            for (std::int32_t p = node.begin; p < node.end; ++p) {
                const std::int64_t j = perm_[p];
                if (j == i) continue;
                const double d = metric_.dist(q, &pts_[static_cast<std::int64_t>(p) * dim_]);
                const HeapEntry cand{d, j};
                if (static_cast<int>(heap.size()) < k) {
                    heap.push(cand);
                } else if (cand < heap.top()) {
                    heap.pop();
                    heap.push(cand);
                }
            }
            continue;
        }
        const double dl = metric_.min_dist_to_box(
            q, &box_lo_[static_cast<std::size_t>(node.left) * dim_],
            &box_hi_[static_cast<std::size_t>(node.left) * dim_]);
        const double dr = metric_.min_dist_to_box(
            q, &box_lo_[static_cast<std::size_t>(node.right) * dim_],
            &box_hi_[static_cast<std::size_t>(node.right) * dim_]);
        if (dl <= dr) {
            stack.push_back(node.right);
            stack.push_back(node.left);
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }

    KnnResult result;
    result.indices.resize(heap.size());
    result.distances.resize(heap.size());
    for (std::size_t slot = heap.size(); slot-- > 0;) {
        result.distances[slot] = heap.top().first;
        result.indices[slot] = heap.top().second;
        heap.pop();
    }
    return result;
}

double NeighborIndex::kth_distance(std::int64_t i, int k) const {
    return knn_of_sample(i, k).distances[static_cast<std::size_t>(k) - 1];
}

std::int64_t NeighborIndex::count_within(std::int64_t i, double r) const {
    check_query(i);
    if (!(r > 0.0)) {
        throw std::invalid_argument("count_within: radius must be positive");
    }
    const double* q = &pts_[static_cast<std::int64_t>(where_[i]) * dim_];
    std::int64_t count = 0;

    std::vector<std::int32_t> stack;
    stack.reserve(64);
    stack.push_back(0);
    while (!stack.empty()) {
        const std::int32_t id = stack.back();
        stack.pop_back();
        const Node& node = nodes_[id];
        const double* lo = &box_lo_[static_cast<std::size_t>(id) * dim_];
        const double* hi = &box_hi_[static_cast<std::size_t>(id) * dim_];
        if (metric_.min_dist_to_box(q, lo, hi) >= r) {
            continue;
        }
        if (metric_.max_dist_to_box(q, lo, hi) < r) {
            count += node.end - node.begin;
            continue;
        }
        if (node.left < 0) {
            for (std::int32_t p = node.begin; p < node.end; ++p) {
                if (metric_.dist(q, &pts_[static_cast<std::int64_t>(p) * dim_]) < r) ++count;
            }
            continue;
        }
        stack.push_back(node.left);
        stack.push_back(node.right);
    }
    // The query point itself always lands in the count at distance zero.
    return count - 1;
}

}  // namespace knninfo
