// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cilgauge {

enum class ErrorKind {
  // schedule / tensor construction
  InvalidSchedule,
  OverlappingTaskClasses,
  DuplicateObservation,
  MissingObservation,
  UnseenClassObservation,
  OutOfRangeAccuracy,
  UnknownClass,
  // document parsing
  MalformedSyntax,
  UnknownSchemaVersion,
  MissingField,
  TypeMismatch,
  NonContiguousEvaluations,
  // run sets
  ScheduleMismatchWithinGroup,
  // metrics
  EmptySeries,
  UndefinedMetricValue,
  // synthetic runs
  InvalidProfile,
  // command line / reporting
  UnknownMetricName,
  UnknownFigureName,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `path()` names the offending field
/// (e.g. `evaluations[1].per_class.3`) when one is known.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string path = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }
  const std::string& message() const noexcept { return message_; }

  // Set by observation-level checks so callers can map back to their own
  // field naming.
  std::optional<int> evaluation_index;
  std::optional<std::string> class_id;

  Error with_path(std::string path) const;

 private:
  ErrorKind kind_;
  std::string message_;
  std::string path_;
};

struct FileDiagnostic {
  std::string file;
  ErrorKind kind;
  std::string path;
  std::string message;

  /// `file: path: Kind: message`
  std::string format() const;
};

/// Aggregate of per-file failures; loading never stops at the first bad file.
class LoadError : public std::runtime_error {
 public:
  explicit LoadError(std::vector<FileDiagnostic> diagnostics);

  const std::vector<FileDiagnostic>& diagnostics() const noexcept {
    return diagnostics_;
  }

 private:
  std::vector<FileDiagnostic> diagnostics_;
};

}  // namespace cilgauge
