// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "cilgauge/error.hpp"

namespace cilgauge {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSchedule: return "InvalidSchedule";
    case ErrorKind::OverlappingTaskClasses: return "OverlappingTaskClasses";
    case ErrorKind::DuplicateObservation: return "DuplicateObservation";
    case ErrorKind::MissingObservation: return "MissingObservation";
    case ErrorKind::UnseenClassObservation: return "UnseenClassObservation";
    case ErrorKind::OutOfRangeAccuracy: return "OutOfRangeAccuracy";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::MalformedSyntax: return "MalformedSyntax";
    case ErrorKind::UnknownSchemaVersion: return "UnknownSchemaVersion";
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::NonContiguousEvaluations: return "NonContiguousEvaluations";
    case ErrorKind::ScheduleMismatchWithinGroup:
      return "ScheduleMismatchWithinGroup";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::UndefinedMetricValue: return "UndefinedMetricValue";
    case ErrorKind::InvalidProfile: return "InvalidProfile";
    case ErrorKind::UnknownMetricName: return "UnknownMetricName";
    case ErrorKind::UnknownFigureName: return "UnknownFigureName";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorKind kind, const std::string& message,
                    const std::string& path) {
  std::string out;
  if (!path.empty()) {
    out += path;
    out += ": ";
  }
  out += to_string(kind);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::string message, std::string path)
    : std::runtime_error(compose(kind, message, path)),
      kind_(kind),
      message_(std::move(message)),
      path_(std::move(path)) {}

Error Error::with_path(std::string path) const {
  Error copy(kind_, message_, std::move(path));
  copy.evaluation_index = evaluation_index;
  copy.class_id = class_id;
  return copy;
}

std::string FileDiagnostic::format() const {
  std::string out = file;
  out += ": ";
  if (!path.empty()) {
    out += path;
    out += ": ";
  }
  out += to_string(kind);
  out += ": ";
  out += message;
  return out;
}

namespace {

std::string summarize(const std::vector<FileDiagnostic>& diagnostics) {
  std::string out = std::to_string(diagnostics.size()) + " error(s)";
  if (!diagnostics.empty()) {
    out += "; first: ";
    out += diagnostics.front().format();
  }
  return out;
}

}  // namespace

LoadError::LoadError(std::vector<FileDiagnostic> diagnostics)
    : std::runtime_error(summarize(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

}  // namespace cilgauge
