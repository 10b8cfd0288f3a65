#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <vector>

#include "knninfo/distributions.hpp"
#include "knninfo/special.hpp"

using namespace knninfo;

namespace {

// In-test Simpson rule, independent of the library quadrature.
template <typename F>
double simpson(F f, double a, double b, int slices) {
    const double h = (b - a) / slices;
    double acc = f(a) + f(b);
    for (int i = 1; i < slices; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

constexpr double pi4 = 97.40909103400243723645;  // pi^4

double bump(double t) {
    const double w = 0.25 - t * t;
    return w <= 0.0 ? 0.0 : 2700.0 / pi4 * w * w;
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("sampling is deterministic per (seed, trial)") {
    const auto spec = DistributionSpec::gaussian_std(3);
    const auto a = spec.sample(50, 123, 7);
    const auto b = spec.sample(50, 123, 7);
    const auto c = spec.sample(50, 123, 8);
    CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
    CHECK(!std::equal(a.data().begin(), a.data().end(), c.data().begin()));
}

TEST_CASE("gaussian moments") {
    const auto s = DistributionSpec::gaussian_std(2).sample(1000, 5, 0);
    for (int j = 0; j < 2; ++j) {
        double mean = 0.0;
        for (std::int64_t i = 0; i < s.n(); ++i) mean += s.row(i)[j];
        mean /= s.n();
        CHECK(std::fabs(mean) < 4.0 / std::sqrt(1000.0));

        double var = 0.0;
        for (std::int64_t i = 0; i < s.n(); ++i) var += (s.row(i)[j] - mean) * (s.row(i)[j] - mean);
        var /= (s.n() - 1);
        // 5 standard errors of the sample variance of a unit Gaussian
        CHECK(std::fabs(var - 1.0) < 5.0 * std::sqrt(2.0 / (s.n() - 1)));
    }
}

TEST_CASE("joint equicorrelated correlation") {
    auto [x, y] = DistributionSpec::joint_gaussian_equicorr(1, 1, 0.6).sample_joint(100000, 6, 0);
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::int64_t i = 0; i < x.n(); ++i) {
        const double a = x.row(i)[0];
        const double b = y.row(i)[0];
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    const double n = static_cast<double>(x.n());
    const double corr =
        (sxy - sx * sy / n) / std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
    CHECK(std::fabs(corr - 0.6) < 0.01);
}

TEST_CASE("uniform and exponential draws") {
    const auto u = DistributionSpec::uniform01(2).sample(2000, 7, 0);
    for (const double v : u.data()) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
    const auto e = DistributionSpec::exponential(2.0).sample(5000, 8, 0);
    double mean = 0.0;
    for (const double v : e.data()) {
        CHECK(v >= 0.0);
        mean += v;
    }
    mean /= e.n();
    CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("closed-form entropies") {
    CHECK(DistributionSpec::uniform01(3).true_entropy() == 0.0);
    CHECK(DistributionSpec::gaussian_std(1).true_entropy() ==
          doctest::Approx(1.4189385332046727).epsilon(1e-14));
    CHECK(DistributionSpec::cauchy().true_entropy() ==
          doctest::Approx(std::log(4.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(DistributionSpec::exponential(2.0).true_entropy() ==
          doctest::Approx(1.0 - std::numbers::ln2).epsilon(1e-14));
}

TEST_CASE("true mutual information") {
    CHECK(DistributionSpec::joint_gaussian_equicorr(1, 1, 0.0).true_mi() == 0.0);
    CHECK(DistributionSpec::joint_gaussian_equicorr(1, 1, 0.6).true_mi() ==
          doctest::Approx(-0.5 * std::log(1.0 - 0.36)).epsilon(1e-14));

    // Cross-check dx=1, dy=2 against a direct 3x3 determinant.
    const double rho = 0.6;
    auto det3 = [](double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    double k3[3][3];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) k3[i][j] = i == j ? 1.0 : rho;
    }
    const double det_joint = det3(k3);
    const double det_y = 1.0 - rho * rho;  // 2x2 block
    const double oracle = 0.5 * (0.0 + std::log(det_y) - std::log(det_joint));
    CHECK(DistributionSpec::joint_gaussian_equicorr(1, 2, rho).true_mi() ==
          doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("mutual information grows with correlation and stays nonnegative") {
    double prev = -1.0;
    for (double rho = 0.0; rho < 0.95; rho += 0.05) {
        const double mi = DistributionSpec::joint_gaussian_equicorr(2, 2, rho).true_mi();
        CHECK(mi >= 0.0);
        CHECK(mi > prev);
        prev = mi;
    }
}

TEST_CASE("family validation") {
    CHECK_THROWS_AS(DistributionSpec::joint_gaussian_equicorr(1, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(DistributionSpec::joint_gaussian_equicorr(1, 1, -0.2), std::invalid_argument);
    CHECK_THROWS_AS(DistributionSpec::gaussian_std(0), std::invalid_argument);
    CHECK_THROWS_AS(DistributionSpec::exponential(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DistributionSpec::uniform01(1).true_mi(), std::invalid_argument);
    CHECK_THROWS_AS(DistributionSpec::uniform01(1).sample_joint(10, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(DistributionSpec::pathological_mixture_lite({0, 1e6}), std::invalid_argument);
}

TEST_CASE("mixture mass integrates to one") {
    const auto model = detail::MixtureModel::build(MixtureParams{});
    double mass = 0.0;
    for (std::size_t j = 0; j < model.lambda.size(); ++j) {
        const double lambda = model.lambda[j];
        const double s = model.scale[j];
        mass += s / (lambda * lambda * lambda) * simpson(bump, -0.5, 0.5, 4096);
    }
    CHECK(std::fabs(mass - 1.0) < 1e-9);
}

TEST_CASE("mixture entropy quadrature matches the closed form") {
    // Exact value of int g ln g over the bump support:
    //   (90/pi^4) ln(2700/pi^4) - 282/pi^4
    const double ig = 90.0 / pi4 * std::log(2700.0 / pi4) - 282.0 / pi4;
    const auto model = detail::MixtureModel::build(MixtureParams{});
    double oracle = 0.0;
    for (std::size_t j = 0; j < model.lambda.size(); ++j) {
        const double lambda = model.lambda[j];
        const double s = model.scale[j];
        const double w = model.weight[j];
        oracle += w * (2.0 * std::log(lambda) - std::log(s)) -
                  s / (lambda * lambda * lambda) * ig;
    }
    const double lib = DistributionSpec::pathological_mixture_lite().true_entropy();
    CHECK(std::fabs(lib - oracle) <= 1e-8);
}

TEST_CASE("mixture samples stay inside their component supports") {
    const auto spec = DistributionSpec::pathological_mixture_lite();
    const auto model = detail::MixtureModel::build(spec.mixture());
    const auto s = spec.sample(5000, 17, 0);
    for (const double v : s.data()) {
        bool inside = false;
        for (std::size_t j = 0; j < model.center.size(); ++j) {
            const double half = 0.5 / model.lambda[j];
            if (v >= model.center[j] - half && v <= model.center[j] + half) {
                inside = true;
                break;
            }
        }
        CHECK(inside);
    }
}

TEST_CASE("mixture shifts follow the capped ladder") {
    const auto model = detail::MixtureModel::build(MixtureParams{8, 1e6});
    // Uncapped shifts for j = 1, 2; capped at j * shift_cap beyond.
    CHECK(model.center[0] == doctest::Approx(1.0 + 2.0).epsilon(1e-12));
    const double a2 = 2.0 + std::pow(2.0, -4.0 / 3.0);
    CHECK(model.center[1] == doctest::Approx(a2 + 65536.0).epsilon(1e-12));
    CHECK(model.center[2] > 2.9e6);
    CHECK(model.center[2] < 3.1e6);
    CHECK(model.center[7] > 7.9e6);
}

TEST_CASE("default tail exponents") {
    CHECK(DistributionSpec::gaussian_std(2).default_tau() == 1.0);
    CHECK(DistributionSpec::cauchy().default_tau() == 0.5);
}

}  // TEST_SUITE
