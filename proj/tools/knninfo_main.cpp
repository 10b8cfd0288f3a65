#include <cinttypes>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "knninfo/config.hpp"
#include "knninfo/errors.hpp"
#include "knninfo/estimators.hpp"
#include "knninfo/experiments.hpp"
#include "knninfo/report_io.hpp"

namespace {

using namespace knninfo;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNotConverged = 3;

Metric metric_from_name(const std::string& name) {
    if (name == "l2") return Metric::euclidean();
    if (name == "linf") return Metric::chebyshev();
    throw std::invalid_argument("unknown metric '" + name + "' (expected l2 or linf)");
}

void warn_duplicates(const LoadedSamples& loaded, const std::string& path) {
    if (loaded.duplicate_rows.empty()) return;
    std::fprintf(stderr, "warning: %s contains %zu duplicate row pair(s), e.g. rows %" PRId64
                         " and %" PRId64 "; the estimators reject duplicates\n",
                 path.c_str(), loaded.duplicate_rows.size(), loaded.duplicate_rows.front().first,
                 loaded.duplicate_rows.front().second);
}

struct EntropyArgs {
    std::string input;
    int k = 3;
    bool truncate = false;
    double A = 1.0;
    double beta = 0.0;
    bool beta_set = false;
    std::string metric = "l2";
};

int cmd_entropy(const EntropyArgs& args) {
    const LoadedSamples loaded = load_samples(args.input);
    warn_duplicates(loaded, args.input);

    EstimatorConfig cfg;
    cfg.k = args.k;
    cfg.metric = metric_from_name(args.metric);
    EstimateResult result;
    if (args.truncate) {
        Truncation t;
        t.A = args.A;
        if (args.beta_set) t.beta = args.beta;
        cfg.truncation = t;
        result = truncated_kl_entropy(loaded.samples, cfg);
    } else {
        result = kl_entropy(loaded.samples, cfg);
    }

    std::printf("entropy_nats = %.17g\n", result.value);
    std::printf("n = %" PRId64 "\nd = %d\nk = %d\nmetric = %s\n", loaded.samples.n(),
                loaded.samples.d(), args.k, args.metric.c_str());
    std::printf("mean_epsilon = %.17g\n", result.diagnostics.mean_epsilon);
    if (args.truncate) {
        std::printf("truncation_radius = %.17g\n", result.diagnostics.truncation_radius);
        std::printf("truncated_points = %" PRId64 "\n", result.diagnostics.truncated_points);
        std::printf("mean_rho = %.17g\n", result.diagnostics.mean_rho);
    }
    return 0;
}

struct MiArgs {
    std::string x_path;
    std::string y_path;
    std::string input;
    int dx = 0;
    int k = 3;
    std::string metric = "linf";
};

int cmd_mi(const MiArgs& args) {
    std::unique_ptr<SampleSet> x, y;
    if (!args.input.empty()) {
        const LoadedSamples loaded = load_samples(args.input);
        warn_duplicates(loaded, args.input);
        const int d = loaded.samples.d();
        if (args.dx < 1 || args.dx >= d) {
            throw std::invalid_argument("--dx must split the " + std::to_string(d) +
                                        " columns into two non-empty blocks");
        }
        std::vector<double> xs, ys;
        xs.reserve(loaded.samples.n() * args.dx);
        ys.reserve(loaded.samples.n() * (d - args.dx));
        for (std::int64_t i = 0; i < loaded.samples.n(); ++i) {
            const auto row = loaded.samples.row(i);
            xs.insert(xs.end(), row.begin(), row.begin() + args.dx);
            ys.insert(ys.end(), row.begin() + args.dx, row.end());
        }
        x = std::make_unique<SampleSet>(loaded.samples.n(), args.dx, std::move(xs));
        y = std::make_unique<SampleSet>(loaded.samples.n(), d - args.dx, std::move(ys));
    } else {
        const LoadedSamples lx = load_samples(args.x_path);
        const LoadedSamples ly = load_samples(args.y_path);
        warn_duplicates(lx, args.x_path);
        warn_duplicates(ly, args.y_path);
        if (lx.samples.n() != ly.samples.n()) {
            throw DataError("sample counts differ: " + args.x_path + " has " +
                            std::to_string(lx.samples.n()) + " rows, " + args.y_path + " has " +
                            std::to_string(ly.samples.n()));
        }
        x = std::make_unique<SampleSet>(lx.samples);
        y = std::make_unique<SampleSet>(ly.samples);
    }

    const Metric marginal = metric_from_name(args.metric);
    const EstimateResult result =
        ksg_mi(*x, *y, args.k, JointMetric{marginal, marginal, x->d(), y->d()});
    std::printf("mi_nats = %.17g\n", result.value);
    std::printf("n = %" PRId64 "\ndx = %d\ndy = %d\nk = %d\nmetric = %s\n", x->n(), x->d(), y->d(),
                args.k, args.metric.c_str());
    std::printf("mean_epsilon = %.17g\n", result.diagnostics.mean_epsilon);
    return 0;
}

struct ExperimentArgs {
    std::string config;
    std::string out_dir;
    int threads = 1;
};

int cmd_experiment(const ExperimentArgs& args) {
    const ExperimentSpec spec = parse_experiment_config(args.config);
    const ConvergenceReport report = run_experiment(spec, args.threads);
    const ReportPaths paths = write_report(report, args.out_dir);

    std::printf("%s", report_summary_text(report).c_str());
    std::printf("\nreport: %s\nsummary: %s\nplot data: %s\n", paths.csv.c_str(),
                paths.summary.c_str(), paths.plot.c_str());

    for (const auto& row : report.rows) {
        if (!row.converged) return kExitNotConverged;
    }
    return 0;
}

struct RatesArgs {
    std::string estimator;
    int dx = 0;
    int dy = 0;
    double tau = 0.0;
    bool tau_set = false;
    double alpha = 0.0;
    bool alpha_set = false;
};

int cmd_rates(const RatesArgs& args) {
    RateModel model;
    model.kind = estimator_kind_from_string(args.estimator);
    if (model.kind == EstimatorKind::TruncatedKL) model.kind = EstimatorKind::KL;
    model.dx = args.dx;
    model.dy = args.dy;
    if (model.kind == EstimatorKind::KSG && args.dy < 1) {
        throw std::invalid_argument("--dy is required for ksg rates");
    }
    const int tail_dim = model.kind == EstimatorKind::KSG ? args.dx + args.dy : args.dx;
    bool approached = false;
    if (args.tau_set) {
        model.tau = args.tau;
    } else if (args.alpha_set) {
        model.tau = RateModel::tau_from_alpha(args.alpha, tail_dim);
        approached = true;
    }

    const TheoreticalRates rates = theoretical_rates(model);
    std::printf("estimator = %s\n", to_string(model.kind).c_str());
    if (model.kind == EstimatorKind::KSG) {
        std::printf("dx = %d\ndy = %d\n", args.dx, args.dy);
    } else {
        std::printf("dx = %d\n", args.dx);
    }
    if (approached) {
        std::printf("tau < %.17g (from moment order alpha = %.17g)\n", model.tau, args.alpha);
        std::printf("bias_slope = %.2f (%.17g, approached from below)\n", rates.bias_slope,
                    rates.bias_slope);
    } else {
        std::printf("tau = %.17g\n", model.tau);
        std::printf("bias_slope = %.2f (%.17g)\n", rates.bias_slope, rates.bias_slope);
    }
    std::printf("variance_slope = %.2f\n", rates.variance_slope);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kNN information estimators: KL and truncated-KL entropy, KSG mutual "
                 "information, and convergence-rate experiments"};
    app.require_subcommand(1);

    EntropyArgs entropy_args;
    auto* entropy = app.add_subcommand("entropy", "Estimate differential entropy of a CSV dataset");
    entropy->add_option("--input", entropy_args.input, "CSV file, one sample per row")
        ->required()
        ->check(CLI::ExistingFile);
    entropy->add_option("--k", entropy_args.k, "number of neighbors")
        ->default_val(3)
        ->check(CLI::PositiveNumber);
    auto* truncate_flag =
        entropy->add_flag("--truncate", entropy_args.truncate,
                          "truncate neighbor distances at A * N^-beta (beta defaults to 1/(d+2))");
    entropy->add_option("--A", entropy_args.A, "truncation amplitude")->needs(truncate_flag);
    entropy->add_option("--beta", entropy_args.beta, "truncation exponent, in (0, 1/d)")
        ->needs(truncate_flag)
        ->each([&](const std::string&) { entropy_args.beta_set = true; });
    entropy->add_option("--metric", entropy_args.metric, "norm: l2 or linf")
        ->default_val("l2")
        ->check(CLI::IsMember({"l2", "linf"}));

    MiArgs mi_args;
    auto* mi = app.add_subcommand("mi", "Estimate mutual information (KSG) between two datasets");
    auto* mi_x = mi->add_option("--x", mi_args.x_path, "CSV file for X")->check(CLI::ExistingFile);
    auto* mi_y = mi->add_option("--y", mi_args.y_path, "CSV file for Y")->check(CLI::ExistingFile);
    auto* mi_input = mi->add_option("--input", mi_args.input, "single CSV holding [X | Y] columns")
                         ->check(CLI::ExistingFile);
    auto* mi_dx = mi->add_option("--dx", mi_args.dx, "number of leading columns forming X");
    mi->add_option("--k", mi_args.k, "number of neighbors")
        ->default_val(3)
        ->check(CLI::PositiveNumber);
    mi->add_option("--metric", mi_args.metric, "marginal norm: l2 or linf")
        ->default_val("linf")
        ->check(CLI::IsMember({"l2", "linf"}));
    mi_x->needs(mi_y)->excludes(mi_input);
    mi_input->needs(mi_dx);
    mi_dx->needs(mi_input);

    ExperimentArgs exp_args;
    auto* experiment =
        app.add_subcommand("experiment", "Run a bias/variance convergence experiment");
    experiment->add_option("--config", exp_args.config, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    experiment->add_option("--out", exp_args.out_dir, "output directory")->required();
    experiment->add_option("--threads", exp_args.threads, "worker threads for trials")
        ->default_val(1)
        ->check(CLI::PositiveNumber)
        ->envname("KNNINFO_THREADS");

    RatesArgs rates_args;
    auto* rates = app.add_subcommand("rates", "Print theoretical convergence-rate slopes");
    rates->add_option("--estimator", rates_args.estimator, "kl or ksg")
        ->required()
        ->check(CLI::IsMember({"kl", "ksg"}));
    rates->add_option("--dx", rates_args.dx, "dimension of X")
        ->required()
        ->check(CLI::PositiveNumber);
    rates->add_option("--dy", rates_args.dy, "dimension of Y (ksg)")->check(CLI::PositiveNumber);
    auto* tau_opt = rates->add_option("--tau", rates_args.tau, "tail exponent in (0, 1]")
                        ->each([&](const std::string&) { rates_args.tau_set = true; });
    rates->add_option("--alpha", rates_args.alpha, "finite moment order; tau approaches alpha/(alpha+d)")
        ->excludes(tau_opt)
        ->each([&](const std::string&) { rates_args.alpha_set = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (entropy->parsed()) return cmd_entropy(entropy_args);
        if (mi->parsed()) return cmd_mi(mi_args);
        if (experiment->parsed()) return cmd_experiment(exp_args);
        if (rates->parsed()) return cmd_rates(rates_args);
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return 0;
}
