// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cilgauge/error.hpp"

namespace cilgauge {

/// Class identifiers are opaque labels. Integer labels from input files are
/// normalized to their decimal spelling.
using ClassId = std::string;

struct TaskSpec {
  int task_index = 0;  // 1-based
  std::vector<ClassId> class_ids;

  bool operator==(const TaskSpec&) const = default;
};

// Ordered tasks with pairwise disjoint, non-empty class sets. The order of
// class ids inside a task is kept and takes part in equality, so two exports
// that list a task's classes differently are different schedules.
class TaskSchedule {
 public:
  TaskSchedule() = default;

  // Throws Error(InvalidSchedule) for non-contiguous indices or empty tasks,
  // Error(OverlappingTaskClasses) when a class appears twice.
  explicit TaskSchedule(std::vector<TaskSpec> tasks);

  // Convenience: task j gets index j+1.
  static TaskSchedule from_class_sets(std::vector<std::vector<ClassId>> sets);

  int task_count() const noexcept { return static_cast<int>(tasks_.size()); }
  const std::vector<TaskSpec>& tasks() const noexcept { return tasks_; }
  const TaskSpec& task(int task_index) const;

  std::optional<int> task_of(std::string_view class_id) const;
  std::optional<std::size_t> flat_index(std::string_view class_id) const;

  // Classes of tasks 1..T in schedule order.
  const std::vector<ClassId>& flat_classes() const noexcept { return flat_; }
  // Number of classes introduced by tasks 1..i.
  std::size_t classes_through(int i) const;
  // First flat index of task j.
  std::size_t task_offset(int j) const;

  bool operator==(const TaskSchedule& other) const {
    return tasks_ == other.tasks_;
  }

 private:
  std::vector<TaskSpec> tasks_;
  std::vector<ClassId> flat_;
  std::vector<std::size_t> offsets_;  // size T+1
  std::map<ClassId, std::size_t, std::less<>> index_;
};

// Lower-triangular per-class accuracies. Row i (1-based) holds one fraction
// for every class of tasks 1..i, in flat schedule order.
class AccuracyTensor {
 public:
  AccuracyTensor() = default;

  // Throws Error(MissingObservation) on a wrongly sized row and
  // Error(OutOfRangeAccuracy) for values outside [0,1] (NaN included).
  AccuracyTensor(TaskSchedule schedule, std::vector<std::vector<double>> rows);

  const TaskSchedule& schedule() const noexcept { return schedule_; }
  int evaluated_through() const noexcept {
    return static_cast<int>(rows_.size());
  }

  std::span<const double> row(int i) const;
  // Accuracies of task j's classes at evaluation i, j <= i.
  std::span<const double> task_values(int i, int j) const;
  double at(int i, std::string_view class_id) const;

  bool operator==(const AccuracyTensor&) const = default;

 private:
  TaskSchedule schedule_;
  std::vector<std::vector<double>> rows_;
};

struct RunMetadata {
  std::string method;
  std::string dataset;
  std::int64_t seed = 0;
  std::int64_t buffer_per_class = 0;  // 0 = none recorded

  bool operator==(const RunMetadata&) const = default;
};

struct Observation {
  int evaluation_index = 0;
  ClassId class_id;
  double accuracy = 0.0;

  bool operator==(const Observation&) const = default;
};

class RunLog {
 public:
  RunLog(RunMetadata metadata, AccuracyTensor tensor);

  const RunMetadata& metadata() const noexcept { return metadata_; }
  const TaskSchedule& schedule() const noexcept { return tensor_.schedule(); }
  const AccuracyTensor& tensor() const noexcept { return tensor_; }
  int evaluated_through() const noexcept { return tensor_.evaluated_through(); }

  // All stored entries, by evaluation then flat class order.
  std::vector<Observation> observations() const;

  bool operator==(const RunLog&) const = default;

 private:
  RunMetadata metadata_;
  AccuracyTensor tensor_;
};

/// Builds a run log from loose observations, in any order.
///
/// Rejects duplicates, unknown or not-yet-seen classes, values outside
/// [0,1], and gaps: every evaluation up to the highest one present must
/// carry every class seen so far. Errors carry `evaluation_index` and
/// `class_id` when they concern a single entry.
RunLog build_run_log(const TaskSchedule& schedule,
                     std::span<const Observation> observations,
                     RunMetadata metadata);

/// A per-step sequence; `std::nullopt` marks steps where the metric is
/// undefined (e.g. backward transfer after the first task).
struct MetricSeries {
  std::string name;
  std::vector<std::optional<double>> values;

  std::size_t size() const noexcept { return values.size(); }
  // 1-based step access.
  const std::optional<double>& step(int i) const { return values.at(i - 1); }

  bool operator==(const MetricSeries&) const = default;
};

}  // namespace cilgauge
