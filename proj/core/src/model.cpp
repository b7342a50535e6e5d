// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "cilgauge/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace cilgauge {

TaskSchedule::TaskSchedule(std::vector<TaskSpec> tasks)
    : tasks_(std::move(tasks)) {
  offsets_.reserve(tasks_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t j = 0; j < tasks_.size(); ++j) {
    const TaskSpec& spec = tasks_[j];
    const std::string where = "tasks[" + std::to_string(j) + "]";
    if (spec.task_index != static_cast<int>(j) + 1) {
      throw Error(ErrorKind::InvalidSchedule,
                  "task_index " + std::to_string(spec.task_index) +
                      " found where " + std::to_string(j + 1) + " expected",
                  where + ".task_index");
    }
    if (spec.class_ids.empty()) {
      throw Error(ErrorKind::InvalidSchedule, "task has no classes",
                  where + ".class_ids");
    }
    for (std::size_t c = 0; c < spec.class_ids.size(); ++c) {
      const ClassId& id = spec.class_ids[c];
      auto [it, inserted] = index_.emplace(id, flat_.size());
      if (!inserted) {
        const int owner = *task_of(id);
        throw Error(ErrorKind::OverlappingTaskClasses,
                    "class '" + id + "' already belongs to task " +
                        std::to_string(owner),
                    where + ".class_ids[" + std::to_string(c) + "]");
      }
      flat_.push_back(id);
    }
    offsets_.push_back(flat_.size());
  }
}

TaskSchedule TaskSchedule::from_class_sets(
    std::vector<std::vector<ClassId>> sets) {
  std::vector<TaskSpec> tasks;
  tasks.reserve(sets.size());
  int index = 1;
  for (auto& set : sets) tasks.push_back({index++, std::move(set)});
  return TaskSchedule(std::move(tasks));
}

const TaskSpec& TaskSchedule::task(int task_index) const {
  return tasks_.at(static_cast<std::size_t>(task_index - 1));
}

std::optional<std::size_t> TaskSchedule::flat_index(
    std::string_view class_id) const {
  auto it = index_.find(class_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> TaskSchedule::task_of(std::string_view class_id) const {
  auto flat = flat_index(class_id);
  if (!flat) return std::nullopt;
  // offsets_ is sorted; the owning task is the last offset <= flat.
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), *flat);
  return static_cast<int>(it - offsets_.begin());
}

std::size_t TaskSchedule::classes_through(int i) const {
  return offsets_.at(static_cast<std::size_t>(i));
}

std::size_t TaskSchedule::task_offset(int j) const {
  return offsets_.at(static_cast<std::size_t>(j - 1));
}

AccuracyTensor::AccuracyTensor(TaskSchedule schedule,
                               std::vector<std::vector<double>> rows)
    : schedule_(std::move(schedule)), rows_(std::move(rows)) {
  if (static_cast<int>(rows_.size()) > schedule_.task_count()) {
    throw Error(ErrorKind::NonContiguousEvaluations,
                "more evaluations than tasks");
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const int i = static_cast<int>(r) + 1;
    if (rows_[r].size() != schedule_.classes_through(i)) {
      Error err(ErrorKind::MissingObservation,
                "evaluation " + std::to_string(i) + " has " +
                    std::to_string(rows_[r].size()) + " entries, expected " +
                    std::to_string(schedule_.classes_through(i)));
      err.evaluation_index = i;
      throw err;
    }
    for (std::size_t k = 0; k < rows_[r].size(); ++k) {
      const double v = rows_[r][k];
      if (!(v >= 0.0 && v <= 1.0)) {
        Error err(ErrorKind::OutOfRangeAccuracy,
                  "accuracy " + std::to_string(v) + " outside [0,1]");
        err.evaluation_index = i;
        err.class_id = schedule_.flat_classes()[k];
        throw err;
      }
    }
  }
}

std::span<const double> AccuracyTensor::row(int i) const {
  return rows_.at(static_cast<std::size_t>(i - 1));
}

std::span<const double> AccuracyTensor::task_values(int i, int j) const {
  if (j < 1 || j > i) {
    throw std::out_of_range("task_values: task index outside 1..i");
  }
  const auto values = row(i);
  const std::size_t begin = schedule_.task_offset(j);
  const std::size_t end = schedule_.classes_through(j);
  return values.subspan(begin, end - begin);
}

double AccuracyTensor::at(int i, std::string_view class_id) const {
  auto flat = schedule_.flat_index(class_id);
  const auto values = row(i);
  if (!flat || *flat >= values.size()) {
    throw std::out_of_range("no accuracy stored for class '" +
                            std::string(class_id) + "' at evaluation " +
                            std::to_string(i));
  }
  return values[*flat];
}

RunLog::RunLog(RunMetadata metadata, AccuracyTensor tensor)
    : metadata_(std::move(metadata)), tensor_(std::move(tensor)) {
  if (tensor_.evaluated_through() < 1) {
    throw Error(ErrorKind::MissingObservation, "run has no evaluations",
                "evaluations");
  }
}

std::vector<Observation> RunLog::observations() const {
  std::vector<Observation> out;
  const auto& classes = schedule().flat_classes();
  for (int i = 1; i <= evaluated_through(); ++i) {
    const auto values = tensor_.row(i);
    for (std::size_t k = 0; k < values.size(); ++k) {
      out.push_back({i, classes[k], values[k]});
    }
  }
  return out;
}

namespace {

Error observation_error(ErrorKind kind, std::string message, int i,
                        const ClassId& id) {
  Error err(kind, std::move(message),
            "observation(evaluation=" + std::to_string(i) + ", class=" + id +
                ")");
  err.evaluation_index = i;
  err.class_id = id;
  return err;
}

}  // namespace

RunLog build_run_log(const TaskSchedule& schedule,
                     std::span<const Observation> observations,
                     RunMetadata metadata) {
  const int task_count = schedule.task_count();
  std::vector<std::vector<std::optional<double>>> slots;
  int evaluated_through = 0;

  for (const Observation& obs : observations) {
    const int i = obs.evaluation_index;
    const auto task = schedule.task_of(obs.class_id);
    if (!task) {
      throw observation_error(ErrorKind::UnknownClass,
                              "class '" + obs.class_id +
                                  "' is not part of any task",
                              i, obs.class_id);
    }
    if (i < 1 || i > task_count) {
      throw observation_error(
          ErrorKind::NonContiguousEvaluations,
          "evaluation index " + std::to_string(i) + " outside 1.." +
              std::to_string(task_count),
          i, obs.class_id);
    }
    if (*task > i) {
      throw observation_error(
          ErrorKind::UnseenClassObservation,
          "class '" + obs.class_id + "' belongs to task " +
              std::to_string(*task) + " and is not seen at evaluation " +
              std::to_string(i),
          i, obs.class_id);
    }
    if (!(obs.accuracy >= 0.0 && obs.accuracy <= 1.0)) {
      throw observation_error(ErrorKind::OutOfRangeAccuracy,
                              "accuracy " + std::to_string(obs.accuracy) +
                                  " outside [0,1]",
                              i, obs.class_id);
    }
    if (i > evaluated_through) {
      evaluated_through = i;
      slots.resize(static_cast<std::size_t>(i));
    }
    auto& row = slots[static_cast<std::size_t>(i - 1)];
    row.resize(schedule.classes_through(i));
    auto& slot = row[*schedule.flat_index(obs.class_id)];
    if (slot) {
      throw observation_error(ErrorKind::DuplicateObservation,
                              "class '" + obs.class_id +
                                  "' observed twice at evaluation " +
                                  std::to_string(i),
                              i, obs.class_id);
    }
    slot = obs.accuracy;
  }

  if (evaluated_through == 0) {
    throw Error(ErrorKind::MissingObservation, "run has no observations",
                "evaluations");
  }

  std::vector<std::vector<double>> rows;
  rows.reserve(slots.size());
  for (int i = 1; i <= evaluated_through; ++i) {
    auto& row = slots[static_cast<std::size_t>(i - 1)];
    row.resize(schedule.classes_through(i));
    std::vector<double> dense;
    dense.reserve(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!row[k]) {
        throw observation_error(ErrorKind::MissingObservation,
                                "no accuracy for seen class '" +
                                    schedule.flat_classes()[k] +
                                    "' at evaluation " + std::to_string(i),
                                i, schedule.flat_classes()[k]);
      }
      dense.push_back(*row[k]);
    }
    rows.push_back(std::move(dense));
  }
  return RunLog(std::move(metadata), AccuracyTensor(schedule, std::move(rows)));
}

}  // namespace cilgauge
