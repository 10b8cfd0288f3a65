#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "knninfo/metrics.hpp"

using namespace knninfo;

TEST_SUITE("metrics") {

TEST_CASE("distance on hand points") {
    const std::vector<double> origin{0.0, 0.0};
    const std::vector<double> p{3.0, 4.0};
    CHECK(distance(Metric::euclidean(), origin, p) == 5.0);

    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> b{4.0, 0.0};
    CHECK(distance(Metric::chebyshev(), a, b) == 3.0);

    CHECK(distance(Metric::euclidean(), p, p) == 0.0);
}

TEST_CASE("distance rejects dimension mismatch") {
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> b{1.0};
    CHECK_THROWS_AS(distance(Metric::euclidean(), a, b), std::invalid_argument);
}

TEST_CASE("metric axioms on random triples") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (const Metric m : {Metric::euclidean(), Metric::chebyshev()}) {
        for (int rep = 0; rep < 200; ++rep) {
            const int d = 1 + static_cast<int>(eng() % 6);
            std::vector<double> a(d), b(d), c(d);
            for (int j = 0; j < d; ++j) {
                a[j] = u(eng);
                b[j] = u(eng);
                c[j] = u(eng);
            }
            const double ab = distance(m, a, b);
            const double ba = distance(m, b, a);
            const double ac = distance(m, a, c);
            const double cb = distance(m, c, b);
            CHECK(ab >= 0.0);
            CHECK(ab == ba);
            CHECK(distance(m, a, a) == 0.0);
            CHECK(ab <= ac + cb + 1e-12 * (ac + cb));
        }
    }
}

TEST_CASE("unit ball volumes") {
    CHECK(unit_ball_volume(Metric::chebyshev(), 3) == 8.0);
    CHECK(unit_ball_volume(Metric::euclidean(), 2) == std::numbers::pi);
    CHECK(unit_ball_volume(Metric::euclidean(), 1) == 2.0);
    CHECK(unit_ball_volume(Metric::euclidean(), 3) ==
          doctest::Approx(4.0 / 3.0 * std::numbers::pi).epsilon(1e-14));
    CHECK_THROWS_AS(unit_ball_volume(Metric::euclidean(), 0), std::invalid_argument);
}

TEST_CASE("l2 ball fits inside the linf ball") {
    for (int d = 1; d <= 25; ++d) {
        CHECK(unit_ball_volume(Metric::euclidean(), d) <= unit_ball_volume(Metric::chebyshev(), d));
    }
}

TEST_CASE("log volume is consistent and overflow-free") {
    for (int d = 1; d <= 20; ++d) {
        for (const Metric m : {Metric::euclidean(), Metric::chebyshev()}) {
            CHECK(std::exp(log_unit_ball_volume(m, d)) ==
                  doctest::Approx(unit_ball_volume(m, d)).epsilon(1e-12));
        }
    }
    CHECK(std::isfinite(log_unit_ball_volume(Metric::euclidean(), 400)));
}

TEST_CASE("joint max metric") {
    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const JointMetric cheb_joint{Metric::chebyshev(), Metric::chebyshev(), 2, 3};
    const JointMetric mixed{Metric::euclidean(), Metric::chebyshev(), 2, 3};
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> a(5), b(5);
        for (int j = 0; j < 5; ++j) {
            a[j] = u(eng);
            b[j] = u(eng);
        }
        // Chebyshev marginals compose to Chebyshev on the concatenation.
        CHECK(distance(cheb_joint, a, b) == distance(Metric::chebyshev(), a, b));

        const double dx = distance(Metric::euclidean(), std::span(a).subspan(0, 2),
                                   std::span(b).subspan(0, 2));
        const double dy = distance(Metric::chebyshev(), std::span(a).subspan(2, 3),
                                   std::span(b).subspan(2, 3));
        CHECK(distance(mixed, a, b) == std::max(dx, dy));
    }
}

}  // TEST_SUITE
