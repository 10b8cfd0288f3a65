#include "knninfo/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "knninfo/config.hpp"
#include "knninfo/errors.hpp"

namespace knninfo {

namespace {

std::string render(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_field(const std::string& token, const std::string& path, std::int64_t line) {
    double v = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw DataError(path + ":" + std::to_string(line) + ": cannot parse '" + token +
                        "' as a real number");
    }
    if (!std::isfinite(v)) {
        throw DataError(path + ":" + std::to_string(line) + ": non-finite value '" + token + "'");
    }
    return v;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string token;
    for (const char ch : line) {
        if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
            if (!token.empty()) out.push_back(std::move(token));
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    if (!token.empty()) out.push_back(std::move(token));
    return out;
}

bool all_numeric(const std::vector<std::string>& fields) {
    for (const auto& f : fields) {
        double v = 0.0;
        const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) return false;
    }
    return true;
}

}  // namespace

LoadedSamples load_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset '" + path + "'");

    std::vector<double> data;
    std::int64_t rows = 0;
    int cols = 0;
    std::string line;
    std::int64_t line_no = 0;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (!header_checked) {
            header_checked = true;
            if (!all_numeric(fields)) continue;  // header line
        }
        if (cols == 0) {
            cols = static_cast<int>(fields.size());
        } else if (static_cast<int>(fields.size()) != cols) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(cols) + " columns, got " +
                            std::to_string(fields.size()));
        }
        for (const auto& f : fields) data.push_back(parse_field(f, path, line_no));
        ++rows;
    }
    if (rows == 0) throw DataError(path + ": no data rows");
    if (rows < 2) throw DataError(path + ": need at least 2 samples, got 1");

    LoadedSamples out{SampleSet(rows, cols, std::move(data)), {}};

    std::vector<std::int64_t> order(rows);
    std::iota(order.begin(), order.end(), 0);
    const auto& set = out.samples;
    std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        const auto ra = set.row(a);
        const auto rb = set.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });
    for (std::int64_t i = 1; i < rows; ++i) {
        const auto prev = set.row(order[i - 1]);
        const auto cur = set.row(order[i]);
        if (std::equal(prev.begin(), prev.end(), cur.begin())) {
            out.duplicate_rows.emplace_back(std::min(order[i - 1], order[i]),
                                            std::max(order[i - 1], order[i]));
        }
    }
    std::sort(out.duplicate_rows.begin(), out.duplicate_rows.end());
    return out;
}

void save_samples(const SampleSet& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    for (std::int64_t i = 0; i < samples.n(); ++i) {
        const auto row = samples.row(i);
        for (int j = 0; j < samples.d(); ++j) {
            if (j) out << ',';
            out << render(row[j]);
        }
        out << '\n';
    }
    if (!out.good()) throw DataError("write to '" + path + "' failed");
}

ReportPaths write_report(const ConvergenceReport& report, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory '" + out_dir + "': " + ec.message());

    ReportPaths paths;
    paths.csv = (std::filesystem::path(out_dir) / "report.csv").string();
    paths.summary = (std::filesystem::path(out_dir) / "summary.txt").string();
    paths.plot = (std::filesystem::path(out_dir) / "plotdata.dat").string();

    {
        std::ofstream csv(paths.csv);
        if (!csv) throw DataError("cannot open '" + paths.csv + "' for writing");
        csv << "n,trials,bias,bias_ci,variance,variance_ci\n";
        for (const auto& row : report.rows) {
            csv << row.n << ',' << row.trials << ',' << render(row.bias_mean) << ','
                << render(row.bias_ci_halfwidth) << ',' << render(row.variance) << ','
                << render(row.variance_ci_halfwidth) << '\n';
        }
        if (!csv.good()) throw DataError("write to '" + paths.csv + "' failed");
    }
    {
        std::ofstream plot(paths.plot);
        if (!plot) throw DataError("cannot open '" + paths.plot + "' for writing");
        plot << "# log10_n log10_abs_bias log10_variance\n";
        for (const auto& row : report.rows) {
            const double lb = std::log10(std::fabs(row.bias_mean));
            const double lv = std::log10(row.variance);
            plot << render(std::log10(static_cast<double>(row.n))) << ' '
                 << (std::isfinite(lb) ? render(lb) : "nan") << ' '
                 << (std::isfinite(lv) ? render(lv) : "nan") << '\n';
        }
        if (!plot.good()) throw DataError("write to '" + paths.plot + "' failed");
    }
    {
        std::ofstream summary(paths.summary);
        if (!summary) throw DataError("cannot open '" + paths.summary + "' for writing");
        summary << report_summary_text(report);
        if (!summary.good()) throw DataError("write to '" + paths.summary + "' failed");
    }
    return paths;
}

std::vector<CellRow> read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open report '" + path + "'");
    std::string line;
    std::getline(in, line);  // header
    std::vector<CellRow> rows;
    std::int64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != 6) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 6 fields");
        }
        CellRow row;
        row.n = static_cast<std::int64_t>(parse_field(fields[0], path, line_no));
        row.trials = static_cast<std::int64_t>(parse_field(fields[1], path, line_no));
        row.bias_mean = parse_field(fields[2], path, line_no);
        row.bias_ci_halfwidth = parse_field(fields[3], path, line_no);
        row.variance = parse_field(fields[4], path, line_no);
        row.variance_ci_halfwidth = parse_field(fields[5], path, line_no);
        rows.push_back(row);
    }
    return rows;
}

std::string report_summary_text(const ConvergenceReport& report) {
    std::ostringstream out;
    out << "estimator: " << to_string(report.spec.estimator) << "\n";
    out << "distribution: " << report.spec.distribution.name() << "\n";
    out << "k: " << report.spec.k << "\n";
    out << "seed: " << report.spec.seed << "\n";
    out << "truth: " << render(report.truth) << "\n";
    out << "\n";
    out << "n trials bias bias_ci_halfwidth variance variance_ci_halfwidth converged\n";
    for (const auto& row : report.rows) {
        out << row.n << ' ' << row.trials << ' ' << render(row.bias_mean) << ' '
            << render(row.bias_ci_halfwidth) << ' ' << render(row.variance) << ' '
            << render(row.variance_ci_halfwidth) << ' ' << (row.converged ? "yes" : "no") << "\n";
    }
    out << "\n";
    out << "rate            empirical   theoretical\n";
    char line[128];
    std::snprintf(line, sizeof(line), "bias slope      %-11.2f %-11.2f\n", report.fitted.bias_slope,
                  report.theoretical.bias_slope);
    out << line;
    std::snprintf(line, sizeof(line), "variance slope  %-11.2f %-11.2f\n",
                  report.fitted.variance_slope, report.theoretical.variance_slope);
    out << line;
    out << "bias fit range: n >= " << report.fitted.bias_fit_min_n << " ("
        << report.fitted.bias_rows_used << " rows); variance fit over all "
        << report.fitted.variance_rows_used << " rows\n";
    if (!report.warnings.empty()) {
        out << "\nwarnings:\n";
        for (const auto& w : report.warnings) out << "  - " << w << "\n";
    }
    return out.str();
}

}  // namespace knninfo
