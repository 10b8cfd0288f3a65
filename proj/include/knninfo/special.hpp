#pragma once

namespace knninfo {

/// Digamma function psi(t) = Gamma'(t)/Gamma(t) for t > 0.
/// Absolute error <= 1e-10 for t >= 1 (in practice ~1e-15).
double digamma(double t);

/// Natural log of the gamma function for t > 0.
double log_gamma(double t);

}  // namespace knninfo
