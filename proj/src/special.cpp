#include "knninfo/special.hpp"

#include <cmath>
#include <stdexcept>

namespace knninfo {

// Upward recurrence to t >= 10, then the de Moivre asymptotic series.
// The remainder after the t^-12 term is below 1e-15 at t = 10.
double digamma(double t) {
    if (!(t > 0.0)) {
        throw std::invalid_argument("digamma: argument must be positive");
    }
    double acc = 0.0;
    while (t < 10.0) {
        acc -= 1.0 / t;
        t += 1.0;
    }
    const double inv = 1.0 / t;
    const double u = inv * inv;
    // -sum B_{2n}/(2n t^{2n}) expanded in u = 1/t^2
    const double series =
        u * (1.0 / 12.0 -
        u * (1.0 / 120.0 -
        u * (1.0 / 252.0 -
        u * (1.0 / 240.0 -
        u * (1.0 / 132.0 -
        u * (691.0 / 32760.0))))));
    return acc + std::log(t) - 0.5 * inv - series;
}

double log_gamma(double t) {
    if (!(t > 0.0)) {
        throw std::invalid_argument("log_gamma: argument must be positive");
    }
    if (t == 1.0 || t == 2.0) {
        return 0.0;
    }
    // Shift to s >= 12 where the Stirling series through s^-9 is exact
    // to double precision.
    double acc = 0.0;
    double s = t;
    while (s < 12.0) {
        acc -= std::log(s);
        s += 1.0;
    }
    constexpr double half_log_two_pi = 0.91893853320467274178;
    const double inv = 1.0 / s;
    const double u = inv * inv;
    const double series =
        inv * (1.0 / 12.0 -
        u * (1.0 / 360.0 -
        u * (1.0 / 1260.0 -
        u * (1.0 / 1680.0 -
        u * (1.0 / 1188.0)))));
    return acc + (s - 0.5) * std::log(s) - s + half_log_two_pi + series;
}

}  // namespace knninfo
