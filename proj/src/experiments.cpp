#include "knninfo/experiments.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace knninfo {

namespace {
constexpr std::int64_t kBatchTrials = 100;

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Every (seed, n) pair gets its own sampling stream; the trial index is
// passed through to the sampler.
std::uint64_t cell_seed(std::uint64_t seed, std::int64_t n) {
    return mix64(seed ^ mix64(static_cast<std::uint64_t>(n)));
}

}  // namespace

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::KL: return "kl";
        case EstimatorKind::TruncatedKL: return "truncated_kl";
        case EstimatorKind::KSG: return "ksg";
    }
    return "unknown";
}

EstimatorKind estimator_kind_from_string(const std::string& name) {
    if (name == "kl") return EstimatorKind::KL;
    if (name == "truncated_kl") return EstimatorKind::TruncatedKL;
    if (name == "ksg") return EstimatorKind::KSG;
    throw std::invalid_argument("unknown estimator '" + name + "' (expected kl, truncated_kl or ksg)");
}

Metric ExperimentSpec::resolved_metric() const {
    if (metric) return *metric;
    return estimator == EstimatorKind::KSG ? Metric::chebyshev() : Metric::euclidean();
}

double ExperimentSpec::resolved_tau() const {
    if (tau) return *tau;
    if (alpha) {
        // The tail bound applies to the variable the kNN queries run on:
        // the full sampled dimension (d_z for KSG).
        return RateModel::tau_from_alpha(*alpha, distribution.dim());
    }
    return distribution.default_tau();
}

void ExperimentSpec::validate() const {
    if (n_grid.empty()) {
        throw std::invalid_argument("experiment: n_grid must not be empty");
    }
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] <= k) {
            throw std::invalid_argument("experiment: every n in n_grid must exceed k");
        }
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
            throw std::invalid_argument("experiment: n_grid must be strictly increasing");
        }
    }
    if (k < 1) throw std::invalid_argument("experiment: k must be >= 1");
    if (!(uncertainty_target > 0.0) || !(uncertainty_target < 1.0)) {
        throw std::invalid_argument("experiment: uncertainty_target must lie in (0, 1)");
    }
    if (!(ci_level > 0.0) || !(ci_level < 1.0)) {
        throw std::invalid_argument("experiment: ci_level must lie in (0, 1)");
    }
    if (min_trials < 2) throw std::invalid_argument("experiment: min_trials must be >= 2");
    if (max_trials < min_trials) {
        throw std::invalid_argument("experiment: max_trials must be >= min_trials");
    }
    if (estimator == EstimatorKind::KSG && !distribution.is_joint()) {
        throw std::invalid_argument("experiment: ksg requires a joint distribution family");
    }
    if (truncation && estimator != EstimatorKind::TruncatedKL) {
        throw std::invalid_argument("experiment: truncation constants apply to truncated_kl only");
    }
    const double t = resolved_tau();
    if (!(t > 0.0) || t > 1.0) {
        throw std::invalid_argument("experiment: tau must lie in (0, 1]");
    }
}

double RateModel::tau_from_alpha(double alpha, int d) {
    if (!(alpha > 0.0)) throw std::invalid_argument("tau_from_alpha: alpha must be positive");
    if (d < 1) throw std::invalid_argument("tau_from_alpha: dimension must be >= 1");
    return alpha / (alpha + d);
}

TheoreticalRates theoretical_rates(const RateModel& model) {
    if (!(model.tau > 0.0) || model.tau > 1.0) {
        throw std::invalid_argument("theoretical_rates: tau must lie in (0, 1]");
    }
    if (model.dx < 1) throw std::invalid_argument("theoretical_rates: dx must be >= 1");
    TheoreticalRates rates;
    rates.variance_slope = 1.0;
    if (model.kind == EstimatorKind::KSG) {
        if (model.dy < 1) throw std::invalid_argument("theoretical_rates: ksg needs dy >= 1");
        const int dz = model.dx + model.dy;
        rates.bias_slope = std::min(2.0 * model.tau / (dz + 2),
                                    static_cast<double>(std::min(model.dx, model.dy)) / dz);
    } else {
        rates.bias_slope = 2.0 * model.tau / (model.dx + 2);
    }
    return rates;
}

double run_trial(const ExperimentSpec& spec, std::int64_t n, std::int64_t trial) {
    const std::uint64_t seed = cell_seed(spec.seed, n);
    switch (spec.estimator) {
        case EstimatorKind::KL: {
            EstimatorConfig cfg{spec.k, spec.resolved_metric(), std::nullopt};
            return kl_entropy(spec.distribution.sample(n, seed, trial), cfg).value;
        }
        case EstimatorKind::TruncatedKL: {
            EstimatorConfig cfg{spec.k, spec.resolved_metric(),
                                spec.truncation ? *spec.truncation : Truncation{}};
            return truncated_kl_entropy(spec.distribution.sample(n, seed, trial), cfg).value;
        }
        case EstimatorKind::KSG: {
            auto [x, y] = spec.distribution.sample_joint(n, seed, trial);
            const Metric marginal = spec.resolved_metric();
            return ksg_mi(x, y, spec.k, JointMetric{marginal, marginal, x.d(), y.d()}).value;
        }
    }
    throw std::logic_error("run_trial: unknown estimator kind");
}

namespace {

void run_trial_range(const std::function<double(std::int64_t)>& trial_fn, std::int64_t begin,
                     std::int64_t end, int threads, std::vector<double>& out) {
    if (threads <= 1 || end - begin <= 1) {
        for (std::int64_t t = begin; t < end; ++t) out[t] = trial_fn(t);
        return;
    }
    std::atomic<std::int64_t> next(begin);
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            const std::int64_t t = next.fetch_add(1);
            if (t >= end) return;
            try {
                out[t] = trial_fn(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    const int count = static_cast<int>(std::min<std::int64_t>(threads, end - begin));
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct CellStats {
    double mean = 0.0;
    double variance = 0.0;
};

// Fixed-order two-pass moments so results do not depend on scheduling.
CellStats moments(const std::vector<double>& values, std::int64_t count) {
    CellStats s;
    s.mean = pairwise_sum({values.data(), static_cast<std::size_t>(count)}) / count;
    std::vector<double> sq(count);
    for (std::int64_t i = 0; i < count; ++i) {
        const double d = values[i] - s.mean;
        sq[i] = d * d;
    }
    s.variance = pairwise_sum(sq) / (count - 1);
    return s;
}

}  // namespace

CellRow run_adaptive_cell(const std::function<double(std::int64_t)>& trial_fn,
                          const AdaptiveParams& params, std::int64_t n, int threads) {
    const double z = inverse_normal_cdf(0.5 * (1.0 + params.ci_level));

    std::vector<double> estimates;
    CellRow row;
    row.n = n;
    std::int64_t done = 0;
    while (done < params.max_trials) {
        const std::int64_t target = std::min(done + kBatchTrials, params.max_trials);
        estimates.resize(target);
        run_trial_range(trial_fn, done, target, threads, estimates);
        done = target;
        if (done < params.min_trials) continue;

        const CellStats stats = moments(estimates, done);
        const double bias = stats.mean - params.truth;
        const double ci_len = 2.0 * z * std::sqrt(stats.variance / done);
        row.trials = done;
        row.bias_mean = bias;
        row.bias_ci_halfwidth = 0.5 * ci_len;
        row.variance = stats.variance;
        row.variance_ci_halfwidth = z * stats.variance * std::sqrt(2.0 / (done - 1));
        if (bias != 0.0 && ci_len < params.uncertainty_target * std::fabs(bias)) {
            row.converged = true;
            break;
        }
        // Zero spread cannot tighten further; stop and leave the cell
        // flagged as unresolved.
        if (stats.variance == 0.0) break;
    }
    return row;
}

CellRow run_cell(const ExperimentSpec& spec, std::int64_t n, int threads) {
    spec.validate();
    AdaptiveParams params;
    params.truth = spec.estimator == EstimatorKind::KSG ? spec.distribution.true_mi()
                                                        : spec.distribution.true_entropy();
    params.uncertainty_target = spec.uncertainty_target;
    params.ci_level = spec.ci_level;
    params.min_trials = spec.min_trials;
    params.max_trials = spec.max_trials;
    try {
        return run_adaptive_cell([&](std::int64_t t) { return run_trial(spec, n, t); }, params, n,
                                 threads);
    } catch (const std::exception& e) {
        throw std::runtime_error("experiment cell n=" + std::to_string(n) + " failed: " + e.what() +
                                 " (seed=" + std::to_string(spec.seed) + ")");
    }
}

FittedRates fit_rates(const std::vector<CellRow>& rows, std::int64_t bias_fit_min_n,
                      double truth_scale, std::vector<std::string>* warnings) {
    const double noise_floor = 1e-13 * std::max(1.0, std::fabs(truth_scale));
    std::vector<double> bx, by, vx, vy;
    for (const auto& row : rows) {
        if (row.variance > 0.0) {
            vx.push_back(std::log10(static_cast<double>(row.n)));
            vy.push_back(std::log10(row.variance));
        } else if (warnings) {
            warnings->push_back("variance fit: excluded n=" + std::to_string(row.n) +
                                " (zero variance)");
        }
        if (row.n < bias_fit_min_n) continue;
        if (std::fabs(row.bias_mean) <= noise_floor) {
            if (warnings) {
                warnings->push_back("bias fit: excluded n=" + std::to_string(row.n) +
                                    " (|bias| at machine noise)");
            }
            continue;
        }
        bx.push_back(std::log10(static_cast<double>(row.n)));
        by.push_back(std::log10(std::fabs(row.bias_mean)));
    }

    auto ols_slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const double n = static_cast<double>(xs.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= n;
        my /= n;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        return sxy / sxx;
    };

    if (bx.size() < 3) {
        throw std::invalid_argument("fit_rates: need at least 3 usable rows for the bias fit, have " +
                                    std::to_string(bx.size()));
    }
    if (vx.size() < 3) {
        throw std::invalid_argument("fit_rates: need at least 3 usable rows for the variance fit");
    }

    FittedRates fitted;
    fitted.bias_slope = -ols_slope(bx, by);
    fitted.variance_slope = -ols_slope(vx, vy);
    fitted.bias_fit_min_n = bias_fit_min_n;
    fitted.bias_rows_used = static_cast<int>(bx.size());
    fitted.variance_rows_used = static_cast<int>(vx.size());
    return fitted;
}

ConvergenceReport run_experiment(const ExperimentSpec& spec, int threads) {
    spec.validate();
    ConvergenceReport report;
    report.spec = spec;
    report.truth = spec.estimator == EstimatorKind::KSG ? spec.distribution.true_mi()
                                                        : spec.distribution.true_entropy();
    report.rows.reserve(spec.n_grid.size());
    for (const std::int64_t n : spec.n_grid) {
        report.rows.push_back(run_cell(spec, n, threads));
        if (!report.rows.back().converged) {
            report.warnings.push_back("cell n=" + std::to_string(n) +
                                      " did not reach the relative-uncertainty target after " +
                                      std::to_string(report.rows.back().trials) + " trials");
        }
    }
    report.fitted = fit_rates(report.rows, spec.bias_fit_min_n.value_or(spec.n_grid.front()),
                              report.truth, &report.warnings);

    RateModel model;
    model.kind = spec.estimator;
    model.dx = spec.estimator == EstimatorKind::KSG ? spec.distribution.dx()
                                                    : spec.distribution.dim();
    model.dy = spec.estimator == EstimatorKind::KSG ? spec.distribution.dy() : 0;
    model.tau = spec.resolved_tau();
    report.theoretical = theoretical_rates(model);
    return report;
}

// Acklam's rational approximation refined with one Halley step against
// the erfc-based CDF; accurate to full double precision on (0, 1).
double inverse_normal_cdf(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("inverse_normal_cdf: p must lie in (0, 1)");
    }
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

}  // namespace knninfo
