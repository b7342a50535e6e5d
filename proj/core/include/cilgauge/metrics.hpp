// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cilgauge/model.hpp"

namespace cilgauge::metrics {

/// Neumaier-compensated sum; every reduction in this module goes through it.
double compensated_sum(std::span<const double> values) noexcept;
double compensated_mean(std::span<const double> values) noexcept;

// R[i][j]: mean accuracy over task j's classes after training task i, for
// 1 <= j <= i. Nothing is stored above the diagonal.
class TaskAccuracyMatrix {
 public:
  TaskAccuracyMatrix() = default;
  explicit TaskAccuracyMatrix(std::vector<std::vector<double>> rows);

  int size() const noexcept { return static_cast<int>(rows_.size()); }
  double at(int i, int j) const;
  std::span<const double> row(int i) const;

  bool operator==(const TaskAccuracyMatrix&) const = default;

 private:
  std::vector<std::vector<double>> rows_;
};

struct MicaSeries {
  MetricSeries series;
  // Per step, every class attaining the minimum, sorted by class id.
  std::vector<std::vector<ClassId>> argmin;
};

struct WamicaSummary {
  MetricSeries mica;
  double mica_min = 0.0;
  double mica_max = 0.0;
  double weight = 0.0;     // 1 - (max - min)
  double mica_mean = 0.0;  // mean over the series
  double wamica = 0.0;     // weight * mica_mean
};

struct DistributionSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t count = 0;

  bool operator==(const DistributionSummary&) const = default;
};

TaskAccuracyMatrix task_matrix(const AccuracyTensor& tensor);

// Mean over tasks (not classes) of R[i][j], j <= i.
MetricSeries acc_series(const TaskAccuracyMatrix& matrix);

// (1/(i-1)) * sum_{j<i} (R[i][i] - R[i][j]). Undefined at i = 1.
MetricSeries bwt_series(const TaskAccuracyMatrix& matrix);

// Literature form (1/(i-1)) * sum_{j<i} (R[i][j] - R[j][j]): how much the
// accuracy on each earlier task changed since it was learned.
MetricSeries bwt_gem_series(const TaskAccuracyMatrix& matrix);

// Minimum class accuracy over every class seen so far.
MicaSeries mica_series(const AccuracyTensor& tensor);

// Minimum restricted to classes of tasks before the current one.
// Undefined at i = 1.
MetricSeries mica_old_series(const AccuracyTensor& tensor);

// Throws Error(EmptySeries) on an empty series and
// Error(UndefinedMetricValue) if any step is undefined. For partial runs the
// mean runs over the steps present.
WamicaSummary wamica(const MetricSeries& mica);

// Linear interpolation between order statistics at position (n-1)p.
// `sorted` must be ascending and non-empty.
double quantile_type7(std::span<const double> sorted, double p);

DistributionSummary summarize(std::span<const double> values);

// Summary over every seen class at evaluation i.
DistributionSummary class_distribution(const AccuracyTensor& tensor, int i);

}  // namespace cilgauge::metrics
