#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "knninfo/samples.hpp"

namespace knninfo {

enum class Family {
    GaussianStd,
    JointGaussianEquicorr,
    Uniform01,
    Exponential,
    Cauchy,
    PathologicalMixtureLite,
};

/// Desk-scale variant of the two-distribution construction that defeats
/// the untruncated estimator: a 1-d mixture of bumps with weights
/// 90/(pi^4 j^4) and scales lambda_j = j^(4/3), whose components are
/// shifted apart by delta_j = min(2^(j^4), j * shift_cap). The exact
/// 2^(j^4) shifts exceed double range from j = 5 on, and components with
/// many points collapse onto one representable value once the shift's
/// ulp passes the within-component point spacing, so the cap keeps every
/// component resolvable while leaving the far ones isolated.
struct MixtureParams {
    int n_components = 64;
    double shift_cap = 1e6;
};

class DistributionSpec {
public:
    static DistributionSpec gaussian_std(int d);
    static DistributionSpec joint_gaussian_equicorr(int dx, int dy, double rho);
    static DistributionSpec uniform01(int d);
    static DistributionSpec exponential(double rate);
    static DistributionSpec cauchy();
    static DistributionSpec pathological_mixture_lite(MixtureParams params = {});

    Family family() const { return family_; }
    bool is_joint() const { return family_ == Family::JointGaussianEquicorr; }
    int dim() const { return dx_ + dy_; }
    int dx() const { return dx_; }
    int dy() const { return dy_; }
    double rho() const { return rho_; }
    double rate() const { return rate_; }
    const MixtureParams& mixture() const { return mixture_; }

    /// n i.i.d. draws, bit-deterministic for a fixed (seed, trial) pair.
    SampleSet sample(std::int64_t n, std::uint64_t seed, std::uint64_t trial) const;

    /// Joint families: the paired (x, y) marginals of the same draws.
    std::pair<SampleSet, SampleSet> sample_joint(std::int64_t n, std::uint64_t seed,
                                                 std::uint64_t trial) const;

    double true_entropy() const;
    double true_mi() const;

    /// Tail exponent for theoretical rate predictions: 1 for
    /// exponentially decaying tails, alpha/(alpha+d) -> 1/2 for Cauchy.
    double default_tau() const;

    std::string name() const;

private:
    DistributionSpec() = default;

    Family family_ = Family::GaussianStd;
    int dx_ = 1;
    int dy_ = 0;
    double rho_ = 0.0;
    double rate_ = 1.0;
    MixtureParams mixture_;
};

namespace detail {

/// Deterministic engine for one (seed, stream, trial) triple.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

/// Portable draws on top of mt19937_64 (no libstdc++ distribution objects,
/// so results are reproducible across standard libraries).
class Rng {
public:
    explicit Rng(std::mt19937_64 engine) : engine_(engine) {}

    double uniform();  // [0, 1)
    double normal();   // N(0, 1) via Box-Muller

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Precomputed bump-mixture layout: per-component scale, center, weight.
struct MixtureModel {
    std::vector<double> lambda;
    std::vector<double> center;
    std::vector<double> weight;      // sums to 1; remainder folded into j=1
    std::vector<double> cum_weight;
    std::vector<double> scale;       // density scale factor s_j (1 except j=1)

    static MixtureModel build(const MixtureParams& params);
};

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance tol.
double integrate(double (*f)(double, const void*), const void* ctx, double a, double b,
                 double tol);

}  // namespace detail
}  // namespace knninfo
