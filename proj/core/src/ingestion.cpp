// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "cilgauge/ingestion.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

namespace cilgauge::ingestion {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text,
                                                std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte, text.size());
  for (std::size_t p = 0; p < end; ++p) {
    if (text[p] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// DOM builder that rejects duplicate object keys, which the stock parser
// silently collapses.
class StrictDomBuilder : public nlohmann::json_sax<json> {
 public:
  json root;
  std::optional<Error> failure;

  bool null() override { return put(json(nullptr)); }
  bool boolean(bool v) override { return put(json(v)); }
  bool number_integer(number_integer_t v) override { return put(json(v)); }
  bool number_unsigned(number_unsigned_t v) override { return put(json(v)); }
  bool number_float(number_float_t v, const string_t&) override {
    return put(json(v));
  }
  bool string(string_t& v) override { return put(json(v)); }
  bool binary(binary_t& v) override {
    return put(json::binary(std::move(v)));
  }

  bool start_object(std::size_t) override {
    json* slot = place(json(json::value_t::object));
    stack_.push_back(slot);
    keys_.emplace_back();
    return true;
  }

  bool key(string_t& k) override {
    json& object = *stack_.back();
    if (object.contains(k)) {
      failure = Error(in_per_class() ? ErrorKind::DuplicateObservation
                                     : ErrorKind::MalformedSyntax,
                      "duplicate key '" + k + "'", path_with(k));
      return false;
    }
    keys_.back() = k;
    return true;
  }

  bool end_object() override {
    stack_.pop_back();
    keys_.pop_back();
    return true;
  }

  bool start_array(std::size_t) override {
    json* slot = place(json(json::value_t::array));
    stack_.push_back(slot);
    keys_.emplace_back();
    return true;
  }

  bool end_array() override {
    stack_.pop_back();
    keys_.pop_back();
    return true;
  }

  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    failure = Error(ErrorKind::MalformedSyntax, ex.what());
    error_byte = position;
    return false;
  }

  std::optional<std::size_t> error_byte;

 private:
  std::vector<json*> stack_;
  std::vector<std::string> keys_;

  json* place(json value) {
    if (stack_.empty()) {
      root = std::move(value);
      return &root;
    }
    json& parent = *stack_.back();
    if (parent.is_array()) {
      parent.push_back(std::move(value));
      return &parent.back();
    }
    json& slot = parent[keys_.back()];
    slot = std::move(value);
    return &slot;
  }

  bool put(json value) {
    place(std::move(value));
    return true;
  }

  // Inside evaluations[e].per_class, where a repeated key is a second
  // observation of the same (evaluation, class) pair.
  bool in_per_class() const {
    return stack_.size() == 4 && keys_[0] == "evaluations" &&
           keys_[2] == "per_class";
  }

  std::string path_with(const std::string& last) const {
    std::string out;
    for (std::size_t d = 0; d < stack_.size(); ++d) {
      const json& c = *stack_[d];
      const bool top = d + 1 == stack_.size();
      if (c.is_array()) {
        out += "[" + std::to_string(c.size() - 1) + "]";
      } else {
        if (!out.empty()) out += ".";
        out += top ? last : keys_[d];
      }
    }
    return out;
  }
};

std::string type_name(const json& v) {
  if (v.is_number_integer()) return "integer";
  if (v.is_number_float()) return "number";
  return v.type_name();
}

Error type_mismatch(const std::string& path, std::string_view expected,
                    const json& got) {
  return Error(ErrorKind::TypeMismatch,
               "expected " + std::string(expected) + ", got " + type_name(got),
               path);
}

const json& require(const json& object, const std::string& field,
                    const std::string& prefix) {
  auto it = object.find(field);
  const std::string path = prefix.empty() ? field : prefix + "." + field;
  if (it == object.end()) {
    throw Error(ErrorKind::MissingField, "required field is absent", path);
  }
  return *it;
}

std::string join(const std::string& prefix, const std::string& field) {
  return prefix.empty() ? field : prefix + "." + field;
}

void reject_unknown_fields(const json& object,
                           std::initializer_list<std::string_view> known,
                           const std::string& prefix) {
  for (const auto& item : object.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw Error(ErrorKind::MalformedSyntax, "unknown field",
                  join(prefix, item.key()));
    }
  }
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw type_mismatch(path, "string", v);
  return v.get<std::string>();
}

std::int64_t as_int64(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(
                std::numeric_limits<std::int64_t>::max())) {
      throw Error(ErrorKind::TypeMismatch, "integer exceeds 64-bit range",
                  path);
    }
    return static_cast<std::int64_t>(u);
  }
  if (v.is_number_integer()) return v.get<std::int64_t>();
  throw type_mismatch(path, "integer", v);
}

int as_index(const json& v, const std::string& path) {
  const std::int64_t n = as_int64(v, path);
  if (n < std::numeric_limits<int>::min() ||
      n > std::numeric_limits<int>::max()) {
    throw Error(ErrorKind::TypeMismatch, "index out of range", path);
  }
  return static_cast<int>(n);
}

ClassId as_class_id(const json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(as_int64(v, path));
  throw type_mismatch(path, "string or integer class id", v);
}

std::string eval_path(std::size_t e) {
  return "evaluations[" + std::to_string(e) + "]";
}

}  // namespace

RunLogDocument parse_run_log(std::string_view bytes) {
  StrictDomBuilder builder;
  const bool ok = json::sax_parse(bytes.begin(), bytes.end(), &builder);
  if (!ok || builder.failure) {
    Error err = builder.failure.value_or(
        Error(ErrorKind::MalformedSyntax, "unparseable input"));
    if (err.path().empty()) {
      std::string where = "<root>";
      if (builder.error_byte) {
        const auto [line, column] =
            line_column(bytes, *builder.error_byte > 0 ? *builder.error_byte - 1
                                                       : 0);
        where = "line " + std::to_string(line) + ", column " +
                std::to_string(column);
      }
      throw Error(ErrorKind::MalformedSyntax, err.message(), where);
    }
    throw err;
  }
  const json& root = builder.root;
  if (!root.is_object()) throw type_mismatch("<root>", "object", root);

  RunLogDocument doc;
  doc.schema_version = as_string(require(root, "schema_version", ""),
                                 "schema_version");
  if (doc.schema_version != kSchemaVersion) {
    throw Error(ErrorKind::UnknownSchemaVersion,
                "unsupported schema_version '" + doc.schema_version +
                    "' (supported: " + std::string(kSchemaVersion) + ")",
                "schema_version");
  }
  reject_unknown_fields(root,
                        {"schema_version", "method", "dataset", "seed",
                         "buffer_per_class", "tasks", "evaluations"},
                        "");

  doc.method = as_string(require(root, "method", ""), "method");
  doc.dataset = as_string(require(root, "dataset", ""), "dataset");
  doc.seed = as_int64(require(root, "seed", ""), "seed");
  if (auto it = root.find("buffer_per_class"); it != root.end()) {
    doc.buffer_per_class = as_int64(*it, "buffer_per_class");
    if (doc.buffer_per_class < 0) {
      throw Error(ErrorKind::TypeMismatch, "expected non-negative integer",
                  "buffer_per_class");
    }
  }

  const json& tasks = require(root, "tasks", "");
  if (!tasks.is_array()) throw type_mismatch("tasks", "array", tasks);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const std::string prefix = "tasks[" + std::to_string(t) + "]";
    const json& task = tasks[t];
    if (!task.is_object()) throw type_mismatch(prefix, "object", task);
    reject_unknown_fields(task, {"task_index", "class_ids"}, prefix);
    TaskRecord record;
    record.task_index = as_index(require(task, "task_index", prefix),
                                 prefix + ".task_index");
    const json& ids = require(task, "class_ids", prefix);
    if (!ids.is_array()) {
      throw type_mismatch(prefix + ".class_ids", "array", ids);
    }
    for (std::size_t c = 0; c < ids.size(); ++c) {
      record.class_ids.push_back(as_class_id(
          ids[c], prefix + ".class_ids[" + std::to_string(c) + "]"));
    }
    doc.tasks.push_back(std::move(record));
  }

  const json& evaluations = require(root, "evaluations", "");
  if (!evaluations.is_array()) {
    throw type_mismatch("evaluations", "array", evaluations);
  }
  for (std::size_t e = 0; e < evaluations.size(); ++e) {
    const std::string prefix = eval_path(e);
    const json& evaluation = evaluations[e];
    if (!evaluation.is_object()) {
      throw type_mismatch(prefix, "object", evaluation);
    }
    reject_unknown_fields(evaluation, {"after_task", "per_class"}, prefix);
    EvaluationRecord record;
    record.after_task = as_index(require(evaluation, "after_task", prefix),
                                 prefix + ".after_task");
    if (!doc.evaluations.empty()) {
      const int previous = doc.evaluations.back().after_task;
      if (record.after_task == previous) {
        throw Error(ErrorKind::DuplicateObservation,
                    "after_task values must be unique",
                    prefix + ".after_task");
      }
      if (record.after_task < previous) {
        throw Error(ErrorKind::MalformedSyntax,
                    "evaluations must be sorted by after_task",
                    prefix + ".after_task");
      }
    }
    const json& per_class = require(evaluation, "per_class", prefix);
    if (!per_class.is_object()) {
      throw type_mismatch(prefix + ".per_class", "object", per_class);
    }
    for (const auto& item : per_class.items()) {
      const std::string path = prefix + ".per_class." + item.key();
      const json& value = item.value();
      if (value.is_null()) {
        record.per_class.emplace(item.key(), std::nullopt);
      } else if (value.is_number()) {
        record.per_class.emplace(item.key(), value.get<double>());
      } else {
        throw type_mismatch(path, "number or null", value);
      }
    }
    doc.evaluations.push_back(std::move(record));
  }
  return doc;
}

std::string serialize_run_log(const RunLogDocument& doc) {
  ordered_json root;
  root["schema_version"] = doc.schema_version;
  root["method"] = doc.method;
  root["dataset"] = doc.dataset;
  root["seed"] = doc.seed;
  root["buffer_per_class"] = doc.buffer_per_class;
  root["tasks"] = ordered_json::array();
  for (const auto& task : doc.tasks) {
    ordered_json t;
    t["task_index"] = task.task_index;
    t["class_ids"] = task.class_ids;
    root["tasks"].push_back(std::move(t));
  }
  root["evaluations"] = ordered_json::array();
  for (const auto& evaluation : doc.evaluations) {
    ordered_json e;
    e["after_task"] = evaluation.after_task;
    ordered_json per_class = ordered_json::object();
    for (const auto& [id, value] : evaluation.per_class) {
      if (value) {
        per_class[id] = *value;
      } else {
        per_class[id] = nullptr;
      }
    }
    e["per_class"] = std::move(per_class);
    root["evaluations"].push_back(std::move(e));
  }
  return root.dump(2) + "\n";
}

RunLog validate_and_build(const RunLogDocument& doc) {
  if (doc.tasks.empty()) {
    throw Error(ErrorKind::InvalidSchedule, "run declares no tasks", "tasks");
  }
  std::vector<TaskSpec> specs;
  specs.reserve(doc.tasks.size());
  for (const auto& task : doc.tasks) {
    specs.push_back({task.task_index, task.class_ids});
  }
  // Paths raised here already use the document's tasks[...] naming.
  TaskSchedule schedule(std::move(specs));

  if (doc.evaluations.empty()) {
    throw Error(ErrorKind::MissingObservation, "run has no evaluations",
                "evaluations");
  }
  std::vector<Observation> observations;
  for (std::size_t e = 0; e < doc.evaluations.size(); ++e) {
    const EvaluationRecord& evaluation = doc.evaluations[e];
    const int expected = static_cast<int>(e) + 1;
    if (evaluation.after_task != expected) {
      throw Error(ErrorKind::NonContiguousEvaluations,
                  "after_task " + std::to_string(evaluation.after_task) +
                      " found where " + std::to_string(expected) +
                      " expected (evaluations must run 1, 2, ... without gaps)",
                  eval_path(e) + ".after_task");
    }
    if (evaluation.after_task > schedule.task_count()) {
      throw Error(ErrorKind::NonContiguousEvaluations,
                  "after_task " + std::to_string(evaluation.after_task) +
                      " exceeds the " + std::to_string(schedule.task_count()) +
                      " declared tasks",
                  eval_path(e) + ".after_task");
    }
    for (const auto& [id, value] : evaluation.per_class) {
      const std::string path = eval_path(e) + ".per_class." + id;
      const auto task = schedule.task_of(id);
      if (!task) {
        throw Error(ErrorKind::UnknownClass,
                    "class '" + id + "' is not part of any task", path);
      }
      if (!value) {
        if (*task <= evaluation.after_task) {
          throw Error(ErrorKind::MissingObservation,
                      "seen class '" + id + "' has a null accuracy", path);
        }
        continue;  // explicit null for a not-yet-seen class
      }
      observations.push_back({evaluation.after_task, id, *value});
    }
  }

  try {
    return build_run_log(
        schedule, observations,
        RunMetadata{doc.method, doc.dataset, doc.seed, doc.buffer_per_class});
  } catch (const Error& err) {
    if (err.evaluation_index && err.class_id) {
      throw err.with_path(eval_path(static_cast<std::size_t>(
                              *err.evaluation_index - 1)) +
                          ".per_class." + *err.class_id);
    }
    if (err.evaluation_index) {
      throw err.with_path(eval_path(
          static_cast<std::size_t>(*err.evaluation_index - 1)));
    }
    throw;
  }
}

RunLogDocument to_document(const RunLog& run) {
  RunLogDocument doc;
  doc.method = run.metadata().method;
  doc.dataset = run.metadata().dataset;
  doc.seed = run.metadata().seed;
  doc.buffer_per_class = run.metadata().buffer_per_class;
  for (const auto& task : run.schedule().tasks()) {
    doc.tasks.push_back({task.task_index, task.class_ids});
  }
  const auto& classes = run.schedule().flat_classes();
  for (int i = 1; i <= run.evaluated_through(); ++i) {
    EvaluationRecord record;
    record.after_task = i;
    const auto values = run.tensor().row(i);
    for (std::size_t k = 0; k < values.size(); ++k) {
      record.per_class.emplace(classes[k], values[k]);
    }
    doc.evaluations.push_back(std::move(record));
  }
  return doc;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open file for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

RunLog load_run_log_file(const fs::path& path) {
  return validate_and_build(parse_run_log(read_file(path)));
}

std::vector<fs::path> expand_inputs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    std::error_code ec;
    if (fs::is_directory(input, ec)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(input)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > kRunLogExtension.size() &&
            name.ends_with(kRunLogExtension)) {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(input);
    }
  }
  return files;
}

std::vector<RunGroup> load_run_set(const std::vector<fs::path>& inputs) {
  std::vector<FileDiagnostic> diagnostics;
  std::map<RunGroupKey, RunGroup> groups;

  for (const auto& file : expand_inputs(inputs)) {
    const std::string name = file.string();
    try {
      RunLog run = load_run_log_file(file);
      RunGroupKey key{run.metadata().method, run.metadata().dataset,
                      run.metadata().buffer_per_class};
      auto [it, inserted] = groups.try_emplace(key);
      RunGroup& group = it->second;
      if (inserted) group.key = key;
      if (!group.runs.empty() && !(group.runs.front().schedule() ==
                                   run.schedule())) {
        diagnostics.push_back(
            {name, ErrorKind::ScheduleMismatchWithinGroup, "tasks",
             "schedule differs from " + group.sources.front() +
                 " in group method=" + key.method + " dataset=" +
                 key.dataset + " buffer_per_class=" +
                 std::to_string(key.buffer_per_class)});
        continue;
      }
      group.runs.push_back(std::move(run));
      group.sources.push_back(name);
    } catch (const Error& err) {
      diagnostics.push_back({name, err.kind(), err.path(), err.message()});
    }
  }
  if (!diagnostics.empty()) throw LoadError(std::move(diagnostics));

  std::vector<RunGroup> out;
  out.reserve(groups.size());
  for (auto& [key, group] : groups) {
    std::vector<std::size_t> order(group.runs.size());
    for (std::size_t n = 0; n < order.size(); ++n) order[n] = n;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return group.runs[a].metadata().seed <
                              group.runs[b].metadata().seed;
                     });
    RunGroup sorted;
    sorted.key = key;
    for (std::size_t n : order) {
      sorted.runs.push_back(std::move(group.runs[n]));
      sorted.sources.push_back(std::move(group.sources[n]));
    }
    out.push_back(std::move(sorted));
  }
  return out;
}

}  // namespace cilgauge::ingestion
