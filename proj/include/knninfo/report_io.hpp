#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "knninfo/experiments.hpp"
#include "knninfo/samples.hpp"

namespace knninfo {

struct LoadedSamples {
    SampleSet samples;
    // (first occurrence, duplicate) index pairs; estimators reject these,
    // so callers can warn or jitter before estimating.
    std::vector<std::pair<std::int64_t, std::int64_t>> duplicate_rows;
};

/// Read a CSV dataset: one row per sample, columns are dimensions,
/// optional header line. Fields may be separated by commas or blanks.
LoadedSamples load_samples(const std::string& path);

/// Write samples as CSV with shortest round-trip float rendering;
/// load_samples(save_samples(x)) reproduces x bit for bit.
void save_samples(const SampleSet& samples, const std::string& path);

struct ReportPaths {
    std::string csv;
    std::string summary;
    std::string plot;
};

/// Emit report.csv (header n,trials,bias,bias_ci,variance,variance_ci),
/// summary.txt and plotdata.dat under out_dir.
ReportPaths write_report(const ConvergenceReport& report, const std::string& out_dir);

/// Numeric rows of a report.csv written by write_report.
std::vector<CellRow> read_report_csv(const std::string& path);

std::string report_summary_text(const ConvergenceReport& report);

}  // namespace knninfo
