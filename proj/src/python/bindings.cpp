#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "knninfo/config.hpp"
#include "knninfo/distributions.hpp"
#include "knninfo/estimators.hpp"
#include "knninfo/experiments.hpp"
#include "knninfo/metrics.hpp"
#include "knninfo/report_io.hpp"
#include "knninfo/special.hpp"

namespace py = pybind11;
using namespace knninfo;

namespace {

SampleSet to_samples(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() == 1) {
        std::vector<double> data(arr.data(), arr.data() + arr.shape(0));
        return SampleSet(arr.shape(0), 1, std::move(data));
    }
    if (arr.ndim() != 2) {
        throw std::invalid_argument("expected a 1-d or 2-d array of samples");
    }
    std::vector<double> data(arr.data(), arr.data() + arr.shape(0) * arr.shape(1));
    return SampleSet(arr.shape(0), static_cast<int>(arr.shape(1)), std::move(data));
}

Metric to_metric(const std::string& name) {
    if (name == "l2") return Metric::euclidean();
    if (name == "linf") return Metric::chebyshev();
    throw std::invalid_argument("metric must be 'l2' or 'linf'");
}

py::dict result_dict(const EstimateResult& r) {
    py::dict d;
    d["value"] = r.value;
    d["truncated_points"] = r.diagnostics.truncated_points;
    d["mean_epsilon"] = r.diagnostics.mean_epsilon;
    d["mean_rho"] = r.diagnostics.mean_rho;
    d["truncation_radius"] = r.diagnostics.truncation_radius;
    return d;
}

DistributionSpec make_distribution(const std::string& family, int d, int dx, int dy, double rho,
                                   double rate) {
    if (family == "gaussian_std") return DistributionSpec::gaussian_std(d);
    if (family == "joint_gaussian_equicorr") {
        return DistributionSpec::joint_gaussian_equicorr(dx, dy, rho);
    }
    if (family == "uniform01") return DistributionSpec::uniform01(d);
    if (family == "exponential") return DistributionSpec::exponential(rate);
    if (family == "cauchy") return DistributionSpec::cauchy();
    if (family == "pathological_mixture_lite") return DistributionSpec::pathological_mixture_lite();
    throw std::invalid_argument("unknown distribution family '" + family + "'");
}

}  // namespace

PYBIND11_MODULE(knninfo, m) {
    m.doc() = "kNN information estimators: KL/truncated-KL entropy and KSG mutual information";

    m.def("digamma", &digamma, py::arg("t"));
    m.def("log_gamma", &log_gamma, py::arg("t"));
    m.def(
        "unit_ball_volume",
        [](const std::string& metric, int d) { return unit_ball_volume(to_metric(metric), d); },
        py::arg("metric"), py::arg("d"));

    m.def(
        "kl_entropy",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& samples, int k,
           const std::string& metric) {
            EstimatorConfig cfg;
            cfg.k = k;
            cfg.metric = to_metric(metric);
            return result_dict(kl_entropy(to_samples(samples), cfg));
        },
        py::arg("samples"), py::arg("k") = 3, py::arg("metric") = "l2",
        "Kozachenko-Leonenko entropy estimate in nats");

    m.def(
        "truncated_kl_entropy",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& samples, int k,
           double A, std::optional<double> beta, const std::string& metric) {
            EstimatorConfig cfg;
            cfg.k = k;
            cfg.metric = to_metric(metric);
            cfg.truncation = Truncation{A, beta};
            return result_dict(truncated_kl_entropy(to_samples(samples), cfg));
        },
        py::arg("samples"), py::arg("k") = 3, py::arg("A") = 1.0,
        py::arg("beta") = std::nullopt, py::arg("metric") = "l2",
        "KL estimate with neighbor distances truncated at A * N^-beta "
        "(beta defaults to 1/(d+2))");

    m.def(
        "ksg_mi",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& y, int k,
           const std::string& metric) {
            const SampleSet sx = to_samples(x);
            const SampleSet sy = to_samples(y);
            const Metric marginal = to_metric(metric);
            return result_dict(
                ksg_mi(sx, sy, k, JointMetric{marginal, marginal, sx.d(), sy.d()}));
        },
        py::arg("x"), py::arg("y"), py::arg("k") = 3, py::arg("metric") = "linf",
        "KSG mutual information estimate in nats");

    m.def(
        "sample",
        [](const std::string& family, std::int64_t n, std::uint64_t seed, std::uint64_t trial,
           int d, int dx, int dy, double rho, double rate) {
            const SampleSet s = make_distribution(family, d, dx, dy, rho, rate).sample(n, seed, trial);
            py::array_t<double> arr({s.n(), static_cast<std::int64_t>(s.d())});
            std::copy(s.data().begin(), s.data().end(), arr.mutable_data());
            return arr;
        },
        py::arg("family"), py::arg("n"), py::arg("seed"), py::arg("trial") = 0, py::arg("d") = 1,
        py::arg("dx") = 1, py::arg("dy") = 1, py::arg("rho") = 0.0, py::arg("rate") = 1.0,
        "Deterministic draws from a named synthetic distribution");

    m.def(
        "true_entropy",
        [](const std::string& family, int d, int dx, int dy, double rho, double rate) {
            return make_distribution(family, d, dx, dy, rho, rate).true_entropy();
        },
        py::arg("family"), py::arg("d") = 1, py::arg("dx") = 1, py::arg("dy") = 1,
        py::arg("rho") = 0.0, py::arg("rate") = 1.0);

    m.def(
        "true_mi",
        [](int dx, int dy, double rho) {
            return DistributionSpec::joint_gaussian_equicorr(dx, dy, rho).true_mi();
        },
        py::arg("dx"), py::arg("dy"), py::arg("rho"));

    m.def(
        "theoretical_rates",
        [](const std::string& estimator, int dx, int dy, double tau) {
            RateModel model;
            model.kind = estimator_kind_from_string(estimator);
            model.dx = dx;
            model.dy = dy;
            model.tau = tau;
            const auto r = theoretical_rates(model);
            py::dict d;
            d["bias_slope"] = r.bias_slope;
            d["variance_slope"] = r.variance_slope;
            return d;
        },
        py::arg("estimator"), py::arg("dx"), py::arg("dy") = 0, py::arg("tau") = 1.0);

    m.def(
        "run_experiment",
        [](const std::string& config_path, const std::string& out_dir, int threads) {
            const ExperimentSpec spec = parse_experiment_config(config_path);
            const ConvergenceReport report = run_experiment(spec, threads);
            const ReportPaths paths = write_report(report, out_dir);
            py::dict d;
            d["bias_slope"] = report.fitted.bias_slope;
            d["variance_slope"] = report.fitted.variance_slope;
            d["theoretical_bias_slope"] = report.theoretical.bias_slope;
            d["theoretical_variance_slope"] = report.theoretical.variance_slope;
            d["report_csv"] = paths.csv;
            d["summary"] = paths.summary;
            return d;
        },
        py::arg("config_path"), py::arg("out_dir"), py::arg("threads") = 1,
        "Run a config-driven convergence experiment and write its report");
}
