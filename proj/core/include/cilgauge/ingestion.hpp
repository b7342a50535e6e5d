// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cilgauge/model.hpp"

namespace cilgauge::ingestion {

inline constexpr std::string_view kSchemaVersion = "1";
inline constexpr std::string_view kRunLogExtension = ".run.json";

struct TaskRecord {
  int task_index = 0;
  std::vector<ClassId> class_ids;

  bool operator==(const TaskRecord&) const = default;
};

struct EvaluationRecord {
  int after_task = 0;
  // null marks a class the exporter listed but did not evaluate.
  std::map<ClassId, std::optional<double>> per_class;

  bool operator==(const EvaluationRecord&) const = default;
};

/// Structural image of a `.run.json` file. Parsing checks shape and types
/// only; `validate_and_build` checks the experiment semantics.
struct RunLogDocument {
  std::string schema_version{kSchemaVersion};
  std::string method;
  std::string dataset;
  std::int64_t seed = 0;
  std::int64_t buffer_per_class = 0;
  std::vector<TaskRecord> tasks;
  std::vector<EvaluationRecord> evaluations;

  bool operator==(const RunLogDocument&) const = default;
};

// Throws Error with kinds MalformedSyntax (bad JSON, duplicate keys, unknown
// fields, unsorted after_task), DuplicateObservation (repeated per_class key
// or after_task), UnknownSchemaVersion, MissingField or TypeMismatch. Syntax
// errors name line and column.
RunLogDocument parse_run_log(std::string_view bytes);

// Canonical form: fixed key order, 2-space indent, class ids as strings,
// per_class keys sorted, trailing newline.
std::string serialize_run_log(const RunLogDocument& doc);

RunLog validate_and_build(const RunLogDocument& doc);

// Inverse of validate_and_build; only seen classes are listed.
RunLogDocument to_document(const RunLog& run);

RunLog load_run_log_file(const std::filesystem::path& path);

struct RunGroupKey {
  std::string method;
  std::string dataset;
  std::int64_t buffer_per_class = 0;

  auto operator<=>(const RunGroupKey&) const = default;
};

struct RunGroup {
  RunGroupKey key;
  std::vector<RunLog> runs;          // ascending seed
  std::vector<std::string> sources;  // file each run came from
};

// Expands directories to their `*.run.json` entries (non-recursive, sorted).
std::vector<std::filesystem::path> expand_inputs(
    const std::vector<std::filesystem::path>& inputs);

/// Loads, validates and groups run logs by (method, dataset, buffer).
///
/// All files are processed before failing; a LoadError then lists every
/// per-file diagnostic. Members of a group must share one schedule
/// (ScheduleMismatchWithinGroup otherwise).
std::vector<RunGroup> load_run_set(
    const std::vector<std::filesystem::path>& inputs);

}  // namespace cilgauge::ingestion
