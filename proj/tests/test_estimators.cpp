#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "knninfo/distributions.hpp"
#include "knninfo/estimators.hpp"
#include "knninfo/special.hpp"

using namespace knninfo;

namespace {

SampleSet translated(const SampleSet& s, std::span<const double> shift) {
    std::vector<double> data(s.data().begin(), s.data().end());
    for (std::int64_t i = 0; i < s.n(); ++i) {
        for (int j = 0; j < s.d(); ++j) data[i * s.d() + j] += shift[j];
    }
    return SampleSet(s.n(), s.d(), std::move(data));
}

SampleSet scaled(const SampleSet& s, double factor) {
    std::vector<double> data(s.data().begin(), s.data().end());
    for (auto& v : data) v *= factor;
    return SampleSet(s.n(), s.d(), std::move(data));
}

SampleSet permuted(const SampleSet& s, std::mt19937_64& eng) {
    std::vector<std::int64_t> order(s.n());
    for (std::int64_t i = 0; i < s.n(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), eng);
    std::vector<double> data(s.data().size());
    for (std::int64_t i = 0; i < s.n(); ++i) {
        const auto row = s.row(order[i]);
        std::copy(row.begin(), row.end(), data.begin() + i * s.d());
    }
    return SampleSet(s.n(), s.d(), std::move(data));
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("two-point KL estimate") {
    SampleSet pts(2, 1, {0.0, 1.0});
    EstimatorConfig cfg;
    cfg.k = 1;
    const auto r = kl_entropy(pts, cfg);
    CHECK(std::fabs(r.value - (1.0 + std::numbers::ln2)) <= 1e-12);
    CHECK(r.diagnostics.truncated_points == 0);
    CHECK(r.diagnostics.mean_epsilon == 1.0);
}

TEST_CASE("two-point truncated estimate") {
    SampleSet pts(2, 1, {0.0, 10.0});
    EstimatorConfig cfg;
    cfg.k = 1;
    cfg.truncation = Truncation{1.0, 1.0 / 3.0};
    const auto r = truncated_kl_entropy(pts, cfg);
    CHECK(std::fabs(r.value - (1.0 + 2.0 / 3.0 * std::numbers::ln2)) <= 1e-12);
    CHECK(r.diagnostics.truncated_points == 2);
    CHECK(r.diagnostics.truncation_radius == std::pow(2.0, -1.0 / 3.0));
}

TEST_CASE("inactive truncation reproduces the plain estimate") {
    const auto samples = DistributionSpec::uniform01(2).sample(400, 3, 0);
    EstimatorConfig plain;
    plain.k = 3;
    EstimatorConfig wide = plain;
    wide.truncation = Truncation{100.0, std::nullopt};
    const auto a = kl_entropy(samples, plain);
    const auto b = truncated_kl_entropy(samples, wide);
    CHECK(b.diagnostics.truncated_points == 0);
    CHECK(std::fabs(a.value - b.value) <= 1e-12);
}

TEST_CASE("default truncation constants") {
    const auto samples = DistributionSpec::gaussian_std(3).sample(200, 9, 0);
    EstimatorConfig cfg;
    cfg.k = 3;
    const auto r = truncated_kl_entropy(samples, cfg);  // no constants given
    CHECK(r.diagnostics.truncation_radius ==
          doctest::Approx(std::pow(200.0, -1.0 / 5.0)).epsilon(1e-15));
}

TEST_CASE("truncation validation") {
    const auto samples = DistributionSpec::uniform01(2).sample(50, 4, 0);
    EstimatorConfig cfg;
    cfg.k = 2;
    cfg.truncation = Truncation{1.0, 0.9};  // beta >= 1/d
    CHECK_THROWS_AS(truncated_kl_entropy(samples, cfg), std::invalid_argument);
    cfg.truncation = Truncation{-1.0, 0.1};
    CHECK_THROWS_AS(truncated_kl_entropy(samples, cfg), std::invalid_argument);
    CHECK_THROWS_AS(kl_entropy(samples, cfg), std::invalid_argument);
}

TEST_CASE("duplicate points are rejected with indices") {
    SampleSet pts(3, 1, {0.0, 0.0, 1.0});
    EstimatorConfig cfg;
    cfg.k = 1;
    CHECK_THROWS_WITH_AS(kl_entropy(pts, cfg),
                         doctest::Contains("duplicate points"), std::invalid_argument);
}

TEST_CASE("k bounds") {
    SampleSet pts(3, 1, {0.0, 1.0, 3.0});
    EstimatorConfig cfg;
    cfg.k = 3;
    CHECK_THROWS_AS(kl_entropy(pts, cfg), std::invalid_argument);
    cfg.k = 0;
    CHECK_THROWS_AS(kl_entropy(pts, cfg), std::invalid_argument);
}

TEST_CASE("translation invariance") {
    const auto base = DistributionSpec::gaussian_std(2).sample(500, 21, 0);
    const std::vector<double> shift{0.25, -1.5};
    const auto moved = translated(base, shift);
    EstimatorConfig cfg;
    cfg.k = 3;
    CHECK(std::fabs(kl_entropy(base, cfg).value - kl_entropy(moved, cfg).value) <= 1e-12);

    EstimatorConfig trunc = cfg;
    trunc.truncation = Truncation{};
    CHECK(std::fabs(truncated_kl_entropy(base, trunc).value -
                    truncated_kl_entropy(moved, trunc).value) <= 1e-12);
}

TEST_CASE("scaling covariance of the untruncated estimator") {
    const auto base = DistributionSpec::gaussian_std(2).sample(500, 22, 0);
    EstimatorConfig cfg;
    cfg.k = 3;
    const double h = kl_entropy(base, cfg).value;
    for (const double a : {2.0, 3.0, 0.125}) {
        const double ha = kl_entropy(scaled(base, a), cfg).value;
        CHECK(std::fabs(ha - h - base.d() * std::log(a)) <= 1e-10);
    }
}

TEST_CASE("permutation invariance is exact") {
    std::mt19937_64 eng(99);
    const auto base = DistributionSpec::gaussian_std(2).sample(300, 23, 0);
    const auto shuffled = permuted(base, eng);
    EstimatorConfig cfg;
    cfg.k = 3;
    CHECK(kl_entropy(base, cfg).value == kl_entropy(shuffled, cfg).value);
}

TEST_CASE("ksg on four hand-placed points") {
    SampleSet x(4, 1, {0.0, 1.0, 3.0, 7.0});
    SampleSet y(4, 1, {0.0, 2.0, 6.0, 14.0});
    EstimatorConfig cfg;
    cfg.k = 1;
    cfg.metric = Metric::chebyshev();
    const auto stats = neighbor_stats(x, &y, cfg);
    CHECK(stats.epsilon == std::vector<double>{2.0, 2.0, 4.0, 8.0});
    CHECK(stats.n_x == std::vector<std::int64_t>{1, 1, 2, 3});
    CHECK(stats.n_y == std::vector<std::int64_t>{0, 0, 0, 0});

    const double expected = digamma(4) + digamma(1) -
                            (digamma(2) + digamma(2) + digamma(3) + digamma(4)) / 4.0 -
                            digamma(1);
    CHECK(std::fabs(ksg_mi(x, y, 1).value - expected) <= 1e-12);
}

TEST_CASE("ksg joint translation and scaling invariance") {
    const auto spec = DistributionSpec::joint_gaussian_equicorr(1, 1, 0.6);
    auto [x, y] = spec.sample_joint(500, 31, 0);
    const double base = ksg_mi(x, y, 3).value;

    const std::vector<double> sx{0.75};
    const std::vector<double> sy{-2.25};
    CHECK(std::fabs(ksg_mi(translated(x, sx), translated(y, sy), 3).value - base) <= 1e-12);
    CHECK(std::fabs(ksg_mi(scaled(x, 3.0), scaled(y, 3.0), 3).value - base) <= 1e-10);
}

TEST_CASE("ksg validation") {
    const auto spec = DistributionSpec::joint_gaussian_equicorr(1, 1, 0.0);
    auto [x, y] = spec.sample_joint(50, 32, 0);
    const auto spec2 = DistributionSpec::joint_gaussian_equicorr(1, 1, 0.0);
    auto [x2, y2] = spec2.sample_joint(60, 33, 0);
    CHECK_THROWS_AS(ksg_mi(x, y2, 3), std::invalid_argument);
    CHECK_THROWS_AS(ksg_mi(x, y, 50), std::invalid_argument);
    CHECK_THROWS_AS(ksg_mi(x, y, 3, JointMetric{Metric::chebyshev(), Metric::chebyshev(), 2, 1}),
                    std::invalid_argument);
}

TEST_CASE("ksg point estimates on Gaussian data") {
    {
        auto [x, y] =
            DistributionSpec::joint_gaussian_equicorr(1, 1, 0.0).sample_joint(10000, 41, 0);
        CHECK(std::fabs(ksg_mi(x, y, 3).value) < 0.05);
    }
    {
        auto [x, y] =
            DistributionSpec::joint_gaussian_equicorr(1, 1, 0.6).sample_joint(10000, 42, 0);
        const double truth = -0.5 * std::log(1.0 - 0.36);
        CHECK(std::fabs(ksg_mi(x, y, 3).value - truth) < 0.05);
    }
}

TEST_CASE("kl point estimate on uniform data") {
    const auto samples = DistributionSpec::uniform01(1).sample(10000, 43, 0);
    EstimatorConfig cfg;
    cfg.k = 3;
    CHECK(std::fabs(kl_entropy(samples, cfg).value) < 0.05);
}

TEST_CASE("neighbor_stats on collinear points") {
    SampleSet pts(3, 1, {0.0, 1.0, 3.0});
    EstimatorConfig cfg;
    cfg.k = 1;
    const auto stats = neighbor_stats(pts, nullptr, cfg);
    CHECK(stats.epsilon == std::vector<double>{1.0, 1.0, 2.0});
    CHECK(stats.rho == stats.epsilon);

    EstimatorConfig tight = cfg;
    tight.truncation = Truncation{0.5, 0.5};  // a_N = 0.5 * 3^-0.5 < min eps
    const auto truncated = neighbor_stats(pts, nullptr, tight);
    const double a_n = 0.5 * std::pow(3.0, -0.5);
    CHECK(truncated.rho == std::vector<double>{a_n, a_n, a_n});
}

TEST_CASE("marginal count floor and digamma range") {
    const auto spec = DistributionSpec::joint_gaussian_equicorr(2, 1, 0.4);
    auto [x, y] = spec.sample_joint(400, 51, 0);
    for (const int k : {1, 3, 5}) {
        EstimatorConfig cfg;
        cfg.k = k;
        cfg.metric = Metric::chebyshev();
        const auto stats = neighbor_stats(x, &y, cfg);
        for (std::int64_t i = 0; i < x.n(); ++i) {
            CHECK(stats.n_x[i] >= k - 1);
            CHECK(stats.n_y[i] >= k - 1);
            CHECK(stats.n_x[i] <= x.n() - 1);
            const double px = digamma(static_cast<double>(stats.n_x[i] + 1));
            CHECK(px >= digamma(k));
            CHECK(px <= digamma(static_cast<double>(x.n())));
        }
    }
}

TEST_CASE("tie diagnostics count exact-distance neighbors") {
    // Four equally spaced points: every interior point sees two exact ties.
    SampleSet pts(4, 1, {0.0, 1.0, 2.0, 3.0});
    EstimatorConfig cfg;
    cfg.k = 1;
    const auto stats = neighbor_stats(pts, nullptr, cfg);
    // Points 1 and 2 each have both neighbors at distance exactly 1.
    CHECK(stats.tie_count == 2);
}

}  // TEST_SUITE
