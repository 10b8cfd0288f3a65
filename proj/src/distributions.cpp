#include "knninfo/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace knninfo {

namespace detail {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ splitmix64(stream ^ 0xA5A5A5A5A5A5A5A5ULL));
    s = splitmix64(s ^ splitmix64(trial ^ 0x5A5A5A5A5A5A5A5AULL));
    return std::mt19937_64(s);
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

MixtureModel MixtureModel::build(const MixtureParams& params) {
    if (params.n_components < 1) {
        throw std::invalid_argument("mixture: n_components must be >= 1");
    }
    if (!(params.shift_cap > 0.0)) {
        throw std::invalid_argument("mixture: shift_cap must be positive");
    }
    const int count = params.n_components;
    MixtureModel m;
    m.lambda.resize(count);
    m.center.resize(count);
    m.weight.resize(count);
    m.scale.assign(count, 1.0);

    constexpr double mass_unit = 90.0 / (std::numbers::pi * std::numbers::pi *
                                         std::numbers::pi * std::numbers::pi);
    double base = 0.0;  // running sum of 2/lambda_i for i < j
    double total = 0.0;
    for (int j = 1; j <= count; ++j) {
        const double lambda = std::pow(static_cast<double>(j), 4.0 / 3.0);
        const double a_j = base + 1.0 / lambda;
        base += 2.0 / lambda;

        const double exact_log2 = static_cast<double>(j) * j * j * j;
        double delta;
        if (exact_log2 * std::numbers::ln2 < std::log(params.shift_cap * j)) {
            delta = std::exp2(exact_log2);
        } else {
            delta = params.shift_cap * j;
        }

        m.lambda[j - 1] = lambda;
        m.center[j - 1] = a_j + delta;
        m.weight[j - 1] = mass_unit / (lambda * lambda * lambda);
        total += m.weight[j - 1];
    }
    // Remainder mass goes to component 1.
    m.scale[0] = (m.weight[0] + (1.0 - total)) / m.weight[0];
    m.weight[0] += 1.0 - total;

    m.cum_weight.resize(count);
    double cum = 0.0;
    for (int j = 0; j < count; ++j) {
        cum += m.weight[j];
        m.cum_weight[j] = cum;
    }
    m.cum_weight.back() = 1.0;
    return m;
}

double integrate(double (*f)(double, const void*), const void* ctx, double a, double b,
                 double tol) {
    struct Simpson {
        double (*f)(double, const void*);
        const void* ctx;

        double eval(double x) const { return f(x, ctx); }

        double recurse(double a, double fa, double b, double fb, double m, double fm,
                       double whole, double tol, int depth) const {
            const double lm = 0.5 * (a + m);
            const double rm = 0.5 * (m + b);
            const double flm = eval(lm);
            const double frm = eval(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth > 50 || std::fabs(delta) <= 15.0 * tol) {
                return left + right + delta / 15.0;
            }
            return recurse(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
                   recurse(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
        }
    };
    Simpson s{f, ctx};
    const double m = 0.5 * (a + b);
    const double fa = s.eval(a);
    const double fb = s.eval(b);
    const double fm = s.eval(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return s.recurse(a, fa, b, fb, m, fm, whole, tol, 0);
}

}  // namespace detail

DistributionSpec DistributionSpec::gaussian_std(int d) {
    if (d < 1) throw std::invalid_argument("gaussian_std: dimension must be >= 1");
    DistributionSpec s;
    s.family_ = Family::GaussianStd;
    s.dx_ = d;
    return s;
}

DistributionSpec DistributionSpec::joint_gaussian_equicorr(int dx, int dy, double rho) {
    if (dx < 1 || dy < 1) {
        throw std::invalid_argument("joint_gaussian_equicorr: dimensions must be >= 1");
    }
    if (!(rho >= 0.0) || !(rho < 1.0)) {
        throw std::invalid_argument("joint_gaussian_equicorr: need rho in [0, 1)");
    }
    DistributionSpec s;
    s.family_ = Family::JointGaussianEquicorr;
    s.dx_ = dx;
    s.dy_ = dy;
    s.rho_ = rho;
    return s;
}

DistributionSpec DistributionSpec::uniform01(int d) {
    if (d < 1) throw std::invalid_argument("uniform01: dimension must be >= 1");
    DistributionSpec s;
    s.family_ = Family::Uniform01;
    s.dx_ = d;
    return s;
}

DistributionSpec DistributionSpec::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
    DistributionSpec s;
    s.family_ = Family::Exponential;
    s.rate_ = rate;
    return s;
}

DistributionSpec DistributionSpec::cauchy() {
    DistributionSpec s;
    s.family_ = Family::Cauchy;
    return s;
}

DistributionSpec DistributionSpec::pathological_mixture_lite(MixtureParams params) {
    detail::MixtureModel::build(params);  // validate
    DistributionSpec s;
    s.family_ = Family::PathologicalMixtureLite;
    s.mixture_ = params;
    return s;
}

SampleSet DistributionSpec::sample(std::int64_t n, std::uint64_t seed, std::uint64_t trial) const {
    if (n < 2) throw std::invalid_argument("sample: need n >= 2");
    detail::Rng rng(detail::make_engine(seed, static_cast<std::uint64_t>(family_), trial));
    const int d = dim();
    std::vector<double> data(static_cast<std::size_t>(n) * d);

    switch (family_) {
        case Family::GaussianStd:
            for (auto& v : data) v = rng.normal();
            break;
        case Family::Uniform01:
            for (auto& v : data) v = rng.uniform();
            break;
        case Family::Exponential:
            for (auto& v : data) v = -std::log1p(-rng.uniform()) / rate_;
            break;
        case Family::Cauchy:
            for (auto& v : data) {
                v = std::tan(std::numbers::pi * (rng.uniform() - 0.5));
            }
            break;
        case Family::JointGaussianEquicorr: {
            const double shared = std::sqrt(rho_);
            const double own = std::sqrt(1.0 - rho_);
            for (std::int64_t i = 0; i < n; ++i) {
                const double g0 = rng.normal();
                for (int j = 0; j < d; ++j) {
                    data[i * d + j] = shared * g0 + own * rng.normal();
                }
            }
            break;
        }
        case Family::PathologicalMixtureLite: {
            const auto model = detail::MixtureModel::build(mixture_);
            for (std::int64_t i = 0; i < n; ++i) {
                const double u = rng.uniform();
                const auto it =
                    std::upper_bound(model.cum_weight.begin(), model.cum_weight.end(), u);
                const std::size_t j = std::min<std::size_t>(
                    static_cast<std::size_t>(it - model.cum_weight.begin()),
                    model.cum_weight.size() - 1);
                // Rejection from the uniform envelope; the bump normalization
                // cancels out of the acceptance ratio (1 - 4t^2)^2.
                double t;
                for (;;) {
                    t = rng.uniform() - 0.5;
                    const double ratio = (1.0 - 4.0 * t * t) * (1.0 - 4.0 * t * t);
                    if (rng.uniform() <= ratio) break;
                }
                data[i] = model.center[j] + t / model.lambda[j];
            }
            break;
        }
    }
    return SampleSet(n, d, std::move(data));
}

std::pair<SampleSet, SampleSet> DistributionSpec::sample_joint(std::int64_t n, std::uint64_t seed,
                                                               std::uint64_t trial) const {
    if (!is_joint()) {
        throw std::invalid_argument("sample_joint: " + name() + " is not a joint family");
    }
    const SampleSet z = sample(n, seed, trial);
    std::vector<double> xs(static_cast<std::size_t>(n) * dx_);
    std::vector<double> ys(static_cast<std::size_t>(n) * dy_);
    for (std::int64_t i = 0; i < n; ++i) {
        const auto row = z.row(i);
        std::copy(row.begin(), row.begin() + dx_, xs.begin() + i * dx_);
        std::copy(row.begin() + dx_, row.end(), ys.begin() + i * dy_);
    }
    return {SampleSet(n, dx_, std::move(xs)), SampleSet(n, dy_, std::move(ys))};
}

namespace {

// ln det of the d x d equicorrelation matrix K_ij = rho + (1-rho) delta_ij,
// from its eigenvalues 1-rho (multiplicity d-1) and 1+(d-1)rho.
double log_det_equicorr(int d, double rho) {
    const double top = 1.0 + (d - 1) * rho;
    if (!(top > 0.0) || !(1.0 - rho > 0.0)) {
        throw std::invalid_argument("equicorrelation matrix is not positive definite");
    }
    return (d - 1) * std::log1p(-rho) + std::log(top);
}

struct BumpCtx {
    double log_prefactor;  // ln(s_j / lambda_j^2)
};

constexpr double bump_height = 2700.0 / (std::numbers::pi * std::numbers::pi *
                                         std::numbers::pi * std::numbers::pi);

double bump(double t) {
    const double w = 0.25 - t * t;
    return w <= 0.0 ? 0.0 : bump_height * w * w;
}

double bump_mass_integrand(double t, const void*) { return bump(t); }

// g(t) * ln(q g(t)) with the component prefactor q folded in via ctx.
double bump_entropy_integrand(double t, const void* ctx) {
    const double g = bump(t);
    if (g <= 0.0) return 0.0;
    return g * (static_cast<const BumpCtx*>(ctx)->log_prefactor + std::log(g));
}

}  // namespace

double DistributionSpec::true_entropy() const {
    constexpr double log_two_pi = 1.8378770664093454836;
    switch (family_) {
        case Family::GaussianStd:
            return 0.5 * dx_ * (log_two_pi + 1.0);
        case Family::Uniform01:
            return 0.0;
        case Family::Exponential:
            return 1.0 - std::log(rate_);
        case Family::Cauchy:
            return std::log(4.0 * std::numbers::pi);
        case Family::JointGaussianEquicorr:
            return 0.5 * dim() * (log_two_pi + 1.0) + 0.5 * log_det_equicorr(dim(), rho_);
        case Family::PathologicalMixtureLite: {
            // -sum_j (s_j / lambda_j^3) * int g(t) ln(s_j g(t) / lambda_j^2) dt,
            // one quadrature per component in the bump's own coordinates.
            const auto model = detail::MixtureModel::build(mixture_);
            double h = 0.0;
            for (std::size_t j = 0; j < model.lambda.size(); ++j) {
                const double lambda = model.lambda[j];
                BumpCtx ctx{std::log(model.scale[j]) - 2.0 * std::log(lambda)};
                const double piece = detail::integrate(bump_entropy_integrand, &ctx, -0.5, 0.5, 1e-12);
                h -= model.scale[j] / (lambda * lambda * lambda) * piece;
            }
            return h;
        }
    }
    throw std::logic_error("true_entropy: unknown family");
}

double DistributionSpec::true_mi() const {
    if (family_ != Family::JointGaussianEquicorr) {
        throw std::invalid_argument("true_mi: no closed form for " + name());
    }
    if (!(std::fabs(rho_) < 1.0)) {
        throw std::invalid_argument("true_mi: need |rho| < 1");
    }
    return 0.5 * (log_det_equicorr(dx_, rho_) + log_det_equicorr(dy_, rho_) -
                  log_det_equicorr(dim(), rho_));
}

double DistributionSpec::default_tau() const {
    // Cauchy has moments only below alpha = 1, so tau approaches
    // alpha/(alpha+1) = 1/2; everything else here decays exponentially.
    return family_ == Family::Cauchy ? 0.5 : 1.0;
}

std::string DistributionSpec::name() const {
    switch (family_) {
        case Family::GaussianStd:
            return "gaussian_std(d=" + std::to_string(dx_) + ")";
        case Family::JointGaussianEquicorr:
            return "joint_gaussian_equicorr(dx=" + std::to_string(dx_) +
                   ", dy=" + std::to_string(dy_) + ", rho=" + std::to_string(rho_) + ")";
        case Family::Uniform01:
            return "uniform01(d=" + std::to_string(dx_) + ")";
        case Family::Exponential:
            return "exponential(rate=" + std::to_string(rate_) + ")";
        case Family::Cauchy:
            return "cauchy";
        case Family::PathologicalMixtureLite:
            return "pathological_mixture_lite(components=" + std::to_string(mixture_.n_components) +
                   ", shift_cap=" + std::to_string(mixture_.shift_cap) + ")";
    }
    return "unknown";
}

}  // namespace knninfo
