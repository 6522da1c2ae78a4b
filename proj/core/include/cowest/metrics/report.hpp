#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cowest/core/records.hpp"
#include "cowest/metrics/metrics.hpp"

namespace cowest::metrics {

// Column label used by reports: em -> EM, token_f1 / macro_f1 -> F1, accuracy -> Acc.
std::string display_name(const std::string& metric);

struct ReportCell {
  std::string dataset;
  std::string metric;  // display name
  std::string value;   // rendered text
};

/// One column of the comparison table.
struct ReportColumn {
  std::string name;
  std::vector<ReportCell> cells;
};

// Metric report line: {dataset, metric, n, value, per_class?}.
Record report_record(const std::string& dataset, const MetricReport& report);

/// Reads a run's metric report file; values are rendered as percentages with
/// two decimals. The column is named "{run}/{stem}" when the file sits in
/// {run}/reports/, else after the file stem. Throws MissingFile for an
/// absent or empty file.
ReportColumn load_run_report(const std::filesystem::path& path);

/// Reads the reference-numbers fixture {method, source, rows: [{dataset,
/// metric, value}]}; values are kept as the exact strings in the file.
ReportColumn load_reference_fixture(const std::filesystem::path& path);

// Plain-text table, one row per (dataset, metric) in first-seen order, columns
// padded to equal width; "-" marks a missing cell.
std::string render_table(std::span<const ReportColumn> columns);

}  // namespace cowest::metrics
