// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cilgauge/ingestion.hpp"
#include "cilgauge/metrics.hpp"
#include "cilgauge/model.hpp"

namespace cilgauge::report {

struct RunMetrics {
  RunMetadata metadata;
  std::string source;
  int evaluated_through = 0;
  metrics::TaskAccuracyMatrix matrix;
  MetricSeries acc;
  MetricSeries bwt;
  MetricSeries bwt_gem;
  metrics::MicaSeries mica;
  MetricSeries mica_old;
  metrics::WamicaSummary wamica;
  std::vector<metrics::DistributionSummary> distribution;  // one per step
  double acc_final = 0.0;  // ACC at the last evaluated step
};

RunMetrics compute_run_metrics(const RunLog& run, std::string source = {});

// Population standard deviation (divides by n).
struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

Aggregate aggregate(std::span<const double> values);

struct SeriesAggregate {
  std::string name;
  // Per step over the seeds defining it; nullopt when none does.
  std::vector<std::optional<Aggregate>> steps;
};

// Seeds are aggregated metrics-first: each run is scored on its own and the
// scores are averaged, never the accuracies.
struct GroupReport {
  ingestion::RunGroupKey key;
  TaskSchedule schedule;
  std::vector<RunMetrics> runs;
  Aggregate acc_final;
  Aggregate wamica;
  Aggregate mica_mean;
  Aggregate weight;
  SeriesAggregate acc;
  SeriesAggregate bwt;
  SeriesAggregate bwt_gem;
  SeriesAggregate mica;
  SeriesAggregate mica_old;
};

struct ComparisonReport {
  std::vector<GroupReport> groups;  // method, dataset, buffer ascending
  std::vector<std::string> warnings;
};

ComparisonReport build_report(const std::vector<ingestion::RunGroup>& groups);

enum class Format { Table, Csv, Json };
std::optional<Format> parse_format(std::string_view name);

// Fraction x100, rounded half-to-even to 2 decimals ("66.77").
std::string format_percent(double fraction);
// Correctly rounded fixed notation; negative zero prints as zero.
std::string format_fixed(double value, int decimals);

struct RenderOptions {
  bool color = false;  // ANSI bold-green on best cells (table only)
};

/// One table per dataset: rows are methods, columns are buffer budgets x
/// {ACC, WAMICA} as final-step percentages; '*' marks the best mean per
/// column.
std::string render_compare(const ComparisonReport& report, Format format,
                           RenderOptions options = {});

enum class Metric { Acc, Bwt, BwtGem, Mica, MicaOld, Wamica, Distribution };
std::optional<Metric> parse_metric(std::string_view name);
std::string_view metric_name(Metric metric);
std::vector<Metric> all_metrics();

struct ThresholdFlag {
  RunMetadata run;
  std::string source;
  int step = 0;
  double mica = 0.0;
};

// Steps where a run's MICA falls strictly below `threshold`.
std::vector<ThresholdFlag> threshold_flags(const ComparisonReport& report,
                                           double threshold);

std::string render_metrics(const ComparisonReport& report,
                           std::span<const Metric> selection, Format format,
                           std::optional<double> threshold = std::nullopt);

enum class Figure { Acc, Mica, Boxplot, WamicaSurface };
std::optional<Figure> parse_figure(std::string_view name);

struct PlotFile {
  std::string name;
  std::string contents;
};

// CSV files with a header row. See docs/output-formats.md for columns.
std::vector<PlotFile> plot_data(const ComparisonReport& report, Figure figure);

// Throws Error(Io) when the directory cannot be created or written.
void write_plot_files(std::span<const PlotFile> files,
                      const std::filesystem::path& directory);

}  // namespace cilgauge::report
