// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cilgauge/ingestion.hpp"
#include "cilgauge/report.hpp"
#include "cilgauge/synthetic.hpp"

namespace cilgauge::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::vector<std::string> paths;
  std::vector<std::string> metrics;
  std::string format = "table";
  std::optional<double> threshold;
  bool no_color = false;
  std::string figure;
  std::string out_dir;

  // simulate
  std::string config;
  int tasks = 5;
  int classes_per_task = 2;
  std::vector<std::int64_t> seeds{0};
  std::string method = "synthetic";
  std::string dataset = "synthetic";
  std::int64_t buffer_per_class = 0;
  double initial = 0.9;
  double retention = 0.9;
  double floor = 0.0;
  double noise = 0.0;
  double jitter = 0.0;
};

std::vector<fs::path> to_paths(const std::vector<std::string>& raw) {
  return {raw.begin(), raw.end()};
}

int report_load_error(const LoadError& e, std::ostream& err) {
  for (const auto& d : e.diagnostics()) err << d.format() << "\n";
  return kValidationFailure;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto files = ingestion::expand_inputs(to_paths(o.paths));
  if (files.empty()) {
    err << "validate: no .run.json files found\n";
    return kUsage;
  }
  try {
    ingestion::load_run_set(to_paths(o.paths));
  } catch (const LoadError& e) {
    std::set<std::string> failed;
    for (const auto& d : e.diagnostics()) failed.insert(d.file);
    report_load_error(e, err);
    out << failed.size() << " of " << files.size() << " files failed\n";
    return kValidationFailure;
  }
  out << files.size() << " files OK\n";
  return kOk;
}

std::vector<report::Metric> select_metrics(
    const std::vector<std::string>& names) {
  if (names.empty()) return report::all_metrics();
  std::vector<report::Metric> out;
  for (const auto& entry : names) {
    std::stringstream list(entry);
    std::string name;
    while (std::getline(list, name, ',')) {
      if (name.empty()) continue;
      auto metric = report::parse_metric(name);
      if (!metric) {
        throw Error(ErrorKind::UnknownMetricName,
                    "unknown metric '" + name +
                        "' (known: acc, bwt, bwt_gem, mica, mica_old, wamica, "
                        "distribution)",
                    "--metric");
      }
      if (std::find(out.begin(), out.end(), *metric) == out.end()) {
        out.push_back(*metric);
      }
    }
  }
  return out;
}

report::Format select_format(const std::string& name) {
  auto format = report::parse_format(name);
  if (!format) {
    throw CLI::ValidationError("--format",
                               "expected table, csv or json, got " + name);
  }
  return *format;
}

report::ComparisonReport load_report(const Options& o, std::ostream& err) {
  auto report = report::build_report(ingestion::load_run_set(to_paths(o.paths)));
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  return report;
}

int cmd_metrics(const Options& o, std::ostream& out, std::ostream& err) {
  const auto selection = select_metrics(o.metrics);
  const auto format = select_format(o.format);
  const auto report = load_report(o, err);
  out << report::render_metrics(report, selection, format, o.threshold);
  if (o.threshold && !report::threshold_flags(report, *o.threshold).empty()) {
    return kThresholdBreach;
  }
  return kOk;
}

bool use_color(const Options& o, bool out_is_terminal) {
  return out_is_terminal && !o.no_color &&
         std::getenv("CILGAUGE_NO_COLOR") == nullptr;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err,
                bool out_is_terminal) {
  const auto format = select_format(o.format);
  const auto report = load_report(o, err);
  out << report::render_compare(report, format,
                                {use_color(o, out_is_terminal)});
  return kOk;
}

int cmd_plot_data(const Options& o, std::ostream& out, std::ostream& err) {
  const auto figure = report::parse_figure(o.figure);
  if (!figure) {
    throw Error(ErrorKind::UnknownFigureName,
                "unknown figure '" + o.figure +
                    "' (known: acc, mica, boxplot, wamica-surface)",
                "--figure");
  }
  const auto report = load_report(o, err);
  const auto files = report::plot_data(report, *figure);
  report::write_plot_files(files, o.out_dir);
  for (const auto& f : files) {
    out << (fs::path(o.out_dir) / f.name).string() << "\n";
  }
  return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  synthetic::SimulationConfig config;
  if (!o.config.empty()) {
    std::ifstream in(o.config, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open config", o.config);
    std::ostringstream text;
    text << in.rdbuf();
    config = synthetic::parse_simulation_config(text.str());
  } else {
    config.tasks = o.tasks;
    config.classes_per_task = o.classes_per_task;
    config.seeds = o.seeds;
    config.dataset = o.dataset;
    config.buffer_per_class = o.buffer_per_class;
    synthetic::NamedProfile profile;
    profile.profile = {o.initial, o.retention, o.floor, o.noise, 0};
    profile.per_class_jitter = o.jitter;
    config.profiles.emplace(o.method, profile);
    if (config.tasks < 1 || config.classes_per_task < 1) {
      throw Error(ErrorKind::InvalidProfile,
                  "tasks and classes per task must be >= 1", "--tasks");
    }
  }
  const auto runs = synthetic::simulate(config);
  std::vector<report::PlotFile> files;
  for (const auto& run : runs) {
    const auto& m = run.metadata();
    report::PlotFile file;
    file.name = m.method + "_" + m.dataset + "_buf" +
                std::to_string(m.buffer_per_class) + "_seed" +
                std::to_string(m.seed) + std::string(ingestion::kRunLogExtension);
    for (char& c : file.name) {
      if (c == '/' || c == '\\' || c == ' ') c = '_';
    }
    file.contents =
        ingestion::serialize_run_log(ingestion::to_document(run));
    files.push_back(std::move(file));
  }
  report::write_plot_files(files, o.out_dir);
  for (const auto& f : files) {
    out << (fs::path(o.out_dir) / f.name).string() << "\n";
  }
  return kOk;
}

void add_paths(CLI::App* sub, Options& o) {
  sub->add_option("paths", o.paths, "Run-log files or directories of *.run.json");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err, bool out_is_terminal) {
  Options o;
  CLI::App app{"Worst-case evaluation of class-incremental learning runs",
               "cilgauge"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Check run-log files");
  add_paths(validate, o);

  auto* metrics = app.add_subcommand("metrics", "Per-run and per-group metric series");
  add_paths(metrics, o);
  metrics->add_option("--metric", o.metrics,
                      "acc, bwt, bwt_gem, mica, mica_old, wamica, distribution "
                      "(comma separated or repeated; default all)")
      ->allow_extra_args(false);
  metrics->add_option("--format", o.format, "table, csv or json");
  metrics->add_option("--threshold", o.threshold,
                      "Flag steps whose MICA is below this fraction; exit 3 if any")
      ->check(CLI::Range(0.0, 1.0));

  auto* compare = app.add_subcommand("compare", "Comparison table across method groups");
  add_paths(compare, o);
  compare->add_option("--format", o.format, "table, csv or json");
  compare->add_flag("--no-color", o.no_color, "Never emit ANSI colors");

  auto* plot = app.add_subcommand("plot-data", "Write CSV series for plotting");
  add_paths(plot, o);
  plot->add_option("--figure", o.figure, "acc, mica, boxplot or wamica-surface")
      ->required();
  plot->add_option("--out", o.out_dir, "Output directory")->required();

  auto* simulate = app.add_subcommand("simulate", "Generate synthetic run logs");
  simulate->add_option("--config", o.config, "Profile config file");
  simulate->add_option("--out", o.out_dir, "Output directory")->required();
  simulate->add_option("--tasks", o.tasks, "Number of tasks");
  simulate->add_option("--classes-per-task", o.classes_per_task,
                       "Classes introduced by each task");
  simulate->add_option("--seeds", o.seeds, "Seeds, comma separated")
      ->delimiter(',')
      ->allow_extra_args(false);
  simulate->add_option("--method", o.method, "Method name");
  simulate->add_option("--dataset", o.dataset, "Dataset name");
  simulate->add_option("--buffer-per-class", o.buffer_per_class,
                       "Recorded buffer size");
  simulate->add_option("--initial-accuracy", o.initial, "Accuracy right after learning");
  simulate->add_option("--retention", o.retention, "Decay factor per elapsed task");
  simulate->add_option("--floor", o.floor, "Lowest generated accuracy");
  simulate->add_option("--noise", o.noise, "Uniform noise amplitude");
  simulate->add_option("--jitter", o.jitter, "Per-class offset bound");

  std::vector<const char*> argv{"cilgauge"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate || *metrics || *compare || *plot) {
      if (o.paths.empty()) {
        CLI::App* active = app.get_subcommands().front();
        err << "error: no input files given\n" << active->help();
        return kUsage;
      }
    }
    if (*validate) return cmd_validate(o, out, err);
    if (*metrics) return cmd_metrics(o, out, err);
    if (*compare) return cmd_compare(o, out, err, out_is_terminal);
    if (*plot) return cmd_plot_data(o, out, err);
    if (*simulate) return cmd_simulate(o, out);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const LoadError& e) {
    return report_load_error(e, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::UnknownMetricName:
      case ErrorKind::UnknownFigureName:
        return kUsage;
      default:
        return kValidationFailure;
    }
  }
  return kUsage;
}

}  // namespace cilgauge::cli
