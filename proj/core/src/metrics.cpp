// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "cilgauge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cilgauge::metrics {

double compensated_sum(std::span<const double> values) noexcept {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

double compensated_mean(std::span<const double> values) noexcept {
  if (values.empty()) return 0.0;
  return compensated_sum(values) / static_cast<double>(values.size());
}

TaskAccuracyMatrix::TaskAccuracyMatrix(std::vector<std::vector<double>> rows)
    : rows_(std::move(rows)) {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != r + 1) {
      throw std::invalid_argument("TaskAccuracyMatrix: row " +
                                  std::to_string(r + 1) +
                                  " is not lower-triangular");
    }
  }
}

double TaskAccuracyMatrix::at(int i, int j) const {
  if (j < 1 || j > i) throw std::out_of_range("R[i][j] requires 1 <= j <= i");
  return rows_.at(static_cast<std::size_t>(i - 1))
      .at(static_cast<std::size_t>(j - 1));
}

std::span<const double> TaskAccuracyMatrix::row(int i) const {
  return rows_.at(static_cast<std::size_t>(i - 1));
}

TaskAccuracyMatrix task_matrix(const AccuracyTensor& tensor) {
  std::vector<std::vector<double>> rows;
  const int steps = tensor.evaluated_through();
  rows.reserve(static_cast<std::size_t>(steps));
  for (int i = 1; i <= steps; ++i) {
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(i));
    for (int j = 1; j <= i; ++j) {
      row.push_back(compensated_mean(tensor.task_values(i, j)));
    }
    rows.push_back(std::move(row));
  }
  return TaskAccuracyMatrix(std::move(rows));
}

MetricSeries acc_series(const TaskAccuracyMatrix& matrix) {
  MetricSeries out{"acc", {}};
  for (int i = 1; i <= matrix.size(); ++i) {
    out.values.emplace_back(compensated_mean(matrix.row(i)));
  }
  return out;
}

MetricSeries bwt_series(const TaskAccuracyMatrix& matrix) {
  MetricSeries out{"bwt", {}};
  for (int i = 1; i <= matrix.size(); ++i) {
    if (i == 1) {
      out.values.emplace_back(std::nullopt);
      continue;
    }
    std::vector<double> gaps;
    gaps.reserve(static_cast<std::size_t>(i - 1));
    const double current = matrix.at(i, i);
    for (int j = 1; j < i; ++j) gaps.push_back(current - matrix.at(i, j));
    out.values.emplace_back(compensated_mean(gaps));
  }
  return out;
}

MetricSeries bwt_gem_series(const TaskAccuracyMatrix& matrix) {
  MetricSeries out{"bwt_gem", {}};
  for (int i = 1; i <= matrix.size(); ++i) {
    if (i == 1) {
      out.values.emplace_back(std::nullopt);
      continue;
    }
    std::vector<double> gaps;
    gaps.reserve(static_cast<std::size_t>(i - 1));
    for (int j = 1; j < i; ++j) {
      gaps.push_back(matrix.at(i, j) - matrix.at(j, j));
    }
    out.values.emplace_back(compensated_mean(gaps));
  }
  return out;
}

MicaSeries mica_series(const AccuracyTensor& tensor) {
  MicaSeries out{{"mica", {}}, {}};
  const auto& classes = tensor.schedule().flat_classes();
  for (int i = 1; i <= tensor.evaluated_through(); ++i) {
    const auto values = tensor.row(i);
    const double lowest = *std::min_element(values.begin(), values.end());
    std::vector<ClassId> argmin;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (values[k] == lowest) argmin.push_back(classes[k]);
    }
    std::sort(argmin.begin(), argmin.end());
    out.series.values.emplace_back(lowest);
    out.argmin.push_back(std::move(argmin));
  }
  return out;
}

MetricSeries mica_old_series(const AccuracyTensor& tensor) {
  MetricSeries out{"mica_old", {}};
  const auto& schedule = tensor.schedule();
  for (int i = 1; i <= tensor.evaluated_through(); ++i) {
    if (i == 1) {
      out.values.emplace_back(std::nullopt);
      continue;
    }
    const auto old = tensor.row(i).first(schedule.classes_through(i - 1));
    out.values.emplace_back(*std::min_element(old.begin(), old.end()));
  }
  return out;
}

WamicaSummary wamica(const MetricSeries& mica) {
  if (mica.values.empty()) {
    throw Error(ErrorKind::EmptySeries, "WAMICA needs at least one step",
                mica.name);
  }
  std::vector<double> values;
  values.reserve(mica.values.size());
  for (std::size_t s = 0; s < mica.values.size(); ++s) {
    if (!mica.values[s]) {
      throw Error(ErrorKind::UndefinedMetricValue,
                  "step " + std::to_string(s + 1) + " is undefined",
                  mica.name);
    }
    values.push_back(*mica.values[s]);
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  WamicaSummary out;
  out.mica = mica;
  out.mica_min = *lo;
  out.mica_max = *hi;
  out.weight = 1.0 - (out.mica_max - out.mica_min);
  out.mica_mean = compensated_mean(values);
  out.wamica = out.weight * out.mica_mean;
  return out;
}

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

DistributionSummary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summary of empty data");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  DistributionSummary out;
  out.min = sorted.front();
  out.q1 = quantile_type7(sorted, 0.25);
  out.median = quantile_type7(sorted, 0.5);
  out.q3 = quantile_type7(sorted, 0.75);
  out.max = sorted.back();
  out.mean = compensated_mean(values);
  out.count = sorted.size();
  return out;
}

DistributionSummary class_distribution(const AccuracyTensor& tensor, int i) {
  if (i < 1 || i > tensor.evaluated_through()) {
    throw std::out_of_range("evaluation index " + std::to_string(i) +
                            " not present");
  }
  return summarize(tensor.row(i));
}

}  // namespace cilgauge::metrics
