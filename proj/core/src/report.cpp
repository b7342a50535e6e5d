// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "cilgauge/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cilgauge::report {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

RunMetrics compute_run_metrics(const RunLog& run, std::string source) {
  RunMetrics out;
  out.metadata = run.metadata();
  out.source = std::move(source);
  out.evaluated_through = run.evaluated_through();
  out.matrix = metrics::task_matrix(run.tensor());
  out.acc = metrics::acc_series(out.matrix);
  out.bwt = metrics::bwt_series(out.matrix);
  out.bwt_gem = metrics::bwt_gem_series(out.matrix);
  out.mica = metrics::mica_series(run.tensor());
  out.mica_old = metrics::mica_old_series(run.tensor());
  out.wamica = metrics::wamica(out.mica.series);
  for (int i = 1; i <= out.evaluated_through; ++i) {
    out.distribution.push_back(metrics::class_distribution(run.tensor(), i));
  }
  out.acc_final = *out.acc.values.back();
  return out;
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate out;
  out.count = values.size();
  if (values.empty()) return out;
  out.mean = metrics::compensated_mean(values);
  std::vector<double> squares;
  squares.reserve(values.size());
  for (double v : values) squares.push_back((v - out.mean) * (v - out.mean));
  out.stddev = std::sqrt(metrics::compensated_mean(squares));
  return out;
}

namespace {

SeriesAggregate aggregate_series(
    std::string name, const std::vector<RunMetrics>& runs,
    const MetricSeries& (*pick)(const RunMetrics&)) {
  SeriesAggregate out{std::move(name), {}};
  std::size_t steps = 0;
  for (const auto& run : runs) steps = std::max(steps, pick(run).size());
  for (std::size_t s = 0; s < steps; ++s) {
    std::vector<double> defined;
    for (const auto& run : runs) {
      const auto& series = pick(run);
      if (s < series.size() && series.values[s]) {
        defined.push_back(*series.values[s]);
      }
    }
    if (defined.empty()) {
      out.steps.emplace_back(std::nullopt);
    } else {
      out.steps.emplace_back(aggregate(defined));
    }
  }
  return out;
}

template <typename F>
Aggregate aggregate_scalar(const std::vector<RunMetrics>& runs, F pick) {
  std::vector<double> values;
  values.reserve(runs.size());
  for (const auto& run : runs) values.push_back(pick(run));
  return aggregate(values);
}

}  // namespace

ComparisonReport build_report(const std::vector<ingestion::RunGroup>& groups) {
  ComparisonReport report;
  for (const auto& group : groups) {
    if (group.runs.empty()) continue;
    GroupReport g;
    g.key = group.key;
    g.schedule = group.runs.front().schedule();
    for (std::size_t n = 0; n < group.runs.size(); ++n) {
      g.runs.push_back(compute_run_metrics(
          group.runs[n], n < group.sources.size() ? group.sources[n] : ""));
    }
    g.acc_final = aggregate_scalar(
        g.runs, [](const RunMetrics& r) { return r.acc_final; });
    g.wamica = aggregate_scalar(
        g.runs, [](const RunMetrics& r) { return r.wamica.wamica; });
    g.mica_mean = aggregate_scalar(
        g.runs, [](const RunMetrics& r) { return r.wamica.mica_mean; });
    g.weight = aggregate_scalar(
        g.runs, [](const RunMetrics& r) { return r.wamica.weight; });
    g.acc = aggregate_series("acc", g.runs,
                             [](const RunMetrics& r) -> const MetricSeries& {
                               return r.acc;
                             });
    g.bwt = aggregate_series("bwt", g.runs,
                             [](const RunMetrics& r) -> const MetricSeries& {
                               return r.bwt;
                             });
    g.bwt_gem = aggregate_series(
        "bwt_gem", g.runs,
        [](const RunMetrics& r) -> const MetricSeries& { return r.bwt_gem; });
    g.mica = aggregate_series(
        "mica", g.runs,
        [](const RunMetrics& r) -> const MetricSeries& { return r.mica.series; });
    g.mica_old = aggregate_series(
        "mica_old", g.runs,
        [](const RunMetrics& r) -> const MetricSeries& { return r.mica_old; });
    report.groups.push_back(std::move(g));
  }
  std::sort(report.groups.begin(), report.groups.end(),
            [](const GroupReport& a, const GroupReport& b) {
              return a.key < b.key;
            });

  // Within one dataset every method should have seen the same task stream.
  std::map<std::string, const GroupReport*> reference;
  for (const auto& g : report.groups) {
    auto [it, inserted] = reference.emplace(g.key.dataset, &g);
    if (!inserted && !(it->second->schedule == g.schedule)) {
      report.warnings.push_back(
          "schedule of method=" + g.key.method + " buffer_per_class=" +
          std::to_string(g.key.buffer_per_class) +
          " differs from method=" + it->second->key.method +
          " buffer_per_class=" +
          std::to_string(it->second->key.buffer_per_class) +
          " on dataset=" + g.key.dataset + "; compared anyway");
    }
  }
  return report;
}

std::optional<Format> parse_format(std::string_view name) {
  if (name == "table") return Format::Table;
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  return std::nullopt;
}

std::string format_fixed(double value, int decimals) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                       std::chars_format::fixed, decimals);
  if (ec != std::errc()) return "nan";
  std::string out(buffer, ptr);
  // A tiny negative value can still round to "-0.00".
  if (out.front() == '-' &&
      out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

std::string format_percent(double fraction) {
  // Hundredths of a percent, ties to even under the default rounding mode.
  const double scaled = std::nearbyint(fraction * 10000.0);
  long long n = static_cast<long long>(scaled);
  std::string sign;
  if (n < 0) {
    sign = "-";
    n = -n;
  }
  const long long whole = n / 100;
  const long long cents = n % 100;
  return sign + std::to_string(whole) + "." + (cents < 10 ? "0" : "") +
         std::to_string(cents);
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string opt_fixed(const std::optional<double>& v, int decimals) {
  return v ? format_fixed(*v, decimals) : std::string();
}

ordered_json opt_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json aggregate_json(const Aggregate& a) {
  return ordered_json{{"mean", a.mean}, {"stddev", a.stddev},
                      {"count", a.count}};
}

ordered_json series_aggregate_json(const SeriesAggregate& s) {
  ordered_json steps = ordered_json::array();
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    ordered_json step{{"step", i + 1}};
    if (s.steps[i]) {
      step["mean"] = s.steps[i]->mean;
      step["stddev"] = s.steps[i]->stddev;
      step["count"] = s.steps[i]->count;
    } else {
      step["mean"] = nullptr;
      step["stddev"] = nullptr;
      step["count"] = 0;
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

ordered_json series_json(const MetricSeries& s) {
  ordered_json out = ordered_json::array();
  for (const auto& v : s.values) out.push_back(opt_json(v));
  return out;
}

std::string pad(const std::string& text, std::size_t width, bool left) {
  if (text.size() >= width) return text;
  const std::string fill(width - text.size(), ' ');
  return left ? text + fill : fill + text;
}

std::string buffer_label(std::int64_t buffer) {
  return "buf=" + std::to_string(buffer);
}

struct Best {
  bool acc = false;
  bool wamica = false;
};

// Best flags per group index, columns scoped to (dataset, buffer).
std::vector<Best> best_cells(const ComparisonReport& report) {
  std::map<std::pair<std::string, std::int64_t>, std::pair<double, double>> top;
  for (const auto& g : report.groups) {
    const auto key = std::make_pair(g.key.dataset, g.key.buffer_per_class);
    auto [it, inserted] =
        top.emplace(key, std::make_pair(g.acc_final.mean, g.wamica.mean));
    if (!inserted) {
      it->second.first = std::max(it->second.first, g.acc_final.mean);
      it->second.second = std::max(it->second.second, g.wamica.mean);
    }
  }
  std::vector<Best> out;
  for (const auto& g : report.groups) {
    const auto& t = top.at({g.key.dataset, g.key.buffer_per_class});
    out.push_back({g.acc_final.mean == t.first, g.wamica.mean == t.second});
  }
  return out;
}

std::string render_compare_table(const ComparisonReport& report,
                                 RenderOptions options) {
  const auto best = best_cells(report);
  std::map<std::string, std::vector<std::size_t>> by_dataset;
  for (std::size_t n = 0; n < report.groups.size(); ++n) {
    by_dataset[report.groups[n].key.dataset].push_back(n);
  }

  std::ostringstream out;
  bool first_block = true;
  for (const auto& [dataset, members] : by_dataset) {
    std::set<std::int64_t> buffers;
    std::vector<std::string> methods;
    for (std::size_t n : members) {
      buffers.insert(report.groups[n].key.buffer_per_class);
      const auto& m = report.groups[n].key.method;
      if (methods.empty() || methods.back() != m) methods.push_back(m);
    }

    struct Cell {
      std::string text;
      bool best = false;
    };
    std::vector<std::string> header{"method"};
    for (auto b : buffers) {
      header.push_back(buffer_label(b) + " ACC %");
      header.push_back(buffer_label(b) + " WAMICA %");
    }
    std::vector<std::vector<Cell>> rows;
    for (const auto& method : methods) {
      std::vector<Cell> row{{method, false}};
      for (auto b : buffers) {
        const auto it = std::find_if(
            members.begin(), members.end(), [&](std::size_t n) {
              return report.groups[n].key.method == method &&
                     report.groups[n].key.buffer_per_class == b;
            });
        if (it == members.end()) {
          row.push_back({"-", false});
          row.push_back({"-", false});
          continue;
        }
        const auto& g = report.groups[*it];
        row.push_back({format_percent(g.acc_final.mean), best[*it].acc});
        row.push_back({format_percent(g.wamica.mean), best[*it].wamica});
      }
      rows.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
      widths[c] = header[c].size();
      for (const auto& row : rows) {
        // +1 leaves room for the best marker.
        widths[c] = std::max(widths[c], row[c].text.size() + (c > 0 ? 1 : 0));
      }
    }

    if (!first_block) out << "\n";
    first_block = false;
    out << "dataset: " << dataset << "\n";
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c > 0) out << " | ";
      out << pad(header[c], widths[c], c == 0);
    }
    out << "\n";
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c > 0) out << "-+-";
      out << std::string(widths[c], '-');
    }
    out << "\n";
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c > 0) out << " | ";
        if (c == 0) {
          out << pad(row[c].text, widths[c], true);
          continue;
        }
        const std::string text =
            pad(row[c].text + (row[c].best ? "*" : " "), widths[c], false);
        if (row[c].best && options.color) {
          out << "\x1b[1;32m" << text << "\x1b[0m";
        } else {
          out << text;
        }
      }
      out << "\n";
    }
  }
  out << "\n* best mean per column; values are final-step percentages "
         "averaged over seeds\n";
  return out.str();
}

std::string render_compare_csv(const ComparisonReport& report) {
  const auto best = best_cells(report);
  std::ostringstream out;
  out << "dataset,method,buffer_per_class,seeds,acc_pct,acc_pct_std,"
         "wamica_pct,wamica_pct_std,mica_mean_pct,weight,best_acc,"
         "best_wamica\n";
  for (std::size_t n = 0; n < report.groups.size(); ++n) {
    const auto& g = report.groups[n];
    out << csv_escape(g.key.dataset) << ',' << csv_escape(g.key.method) << ','
        << g.key.buffer_per_class << ',' << g.runs.size() << ','
        << format_percent(g.acc_final.mean) << ','
        << format_percent(g.acc_final.stddev) << ','
        << format_percent(g.wamica.mean) << ','
        << format_percent(g.wamica.stddev) << ','
        << format_percent(g.mica_mean.mean) << ','
        << format_fixed(g.weight.mean, 6) << ',' << (best[n].acc ? 1 : 0)
        << ',' << (best[n].wamica ? 1 : 0) << "\n";
  }
  return out.str();
}

ordered_json group_header_json(const GroupReport& g) {
  ordered_json seeds = ordered_json::array();
  ordered_json sources = ordered_json::array();
  for (const auto& r : g.runs) {
    seeds.push_back(r.metadata.seed);
    sources.push_back(r.source);
  }
  return ordered_json{{"method", g.key.method},
                      {"dataset", g.key.dataset},
                      {"buffer_per_class", g.key.buffer_per_class},
                      {"seeds", std::move(seeds)},
                      {"sources", std::move(sources)},
                      {"tasks", g.schedule.task_count()}};
}

std::string render_compare_json(const ComparisonReport& report) {
  const auto best = best_cells(report);
  ordered_json root;
  root["format"] = "cilgauge.compare/1";
  root["warnings"] = report.warnings;
  root["groups"] = ordered_json::array();
  for (std::size_t n = 0; n < report.groups.size(); ++n) {
    const auto& g = report.groups[n];
    ordered_json j = group_header_json(g);
    auto per_seed = [&](auto pick) {
      ordered_json values = ordered_json::array();
      for (const auto& r : g.runs) values.push_back(pick(r));
      return values;
    };
    j["acc_final"] = aggregate_json(g.acc_final);
    j["acc_final"]["per_seed"] =
        per_seed([](const RunMetrics& r) { return r.acc_final; });
    j["wamica"] = aggregate_json(g.wamica);
    j["wamica"]["per_seed"] =
        per_seed([](const RunMetrics& r) { return r.wamica.wamica; });
    j["mica_mean"] = aggregate_json(g.mica_mean);
    j["weight"] = aggregate_json(g.weight);
    j["best"] = {{"acc", best[n].acc}, {"wamica", best[n].wamica}};
    j["series"] = {{"acc", series_aggregate_json(g.acc)},
                   {"bwt", series_aggregate_json(g.bwt)},
                   {"mica", series_aggregate_json(g.mica)},
                   {"mica_old", series_aggregate_json(g.mica_old)}};
    root["groups"].push_back(std::move(j));
  }
  return root.dump(2) + "\n";
}

}  // namespace

std::string render_compare(const ComparisonReport& report, Format format,
                           RenderOptions options) {
  switch (format) {
    case Format::Table: return render_compare_table(report, options);
    case Format::Csv: return render_compare_csv(report);
    case Format::Json: return render_compare_json(report);
  }
  return {};
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : all_metrics()) {
    if (metric_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::Acc: return "acc";
    case Metric::Bwt: return "bwt";
    case Metric::BwtGem: return "bwt_gem";
    case Metric::Mica: return "mica";
    case Metric::MicaOld: return "mica_old";
    case Metric::Wamica: return "wamica";
    case Metric::Distribution: return "distribution";
  }
  return "";
}

std::vector<Metric> all_metrics() {
  return {Metric::Acc,     Metric::Bwt,    Metric::BwtGem,
          Metric::Mica,    Metric::MicaOld, Metric::Wamica,
          Metric::Distribution};
}

std::vector<ThresholdFlag> threshold_flags(const ComparisonReport& report,
                                           double threshold) {
  std::vector<ThresholdFlag> out;
  for (const auto& g : report.groups) {
    for (const auto& r : g.runs) {
      const auto& values = r.mica.series.values;
      for (std::size_t s = 0; s < values.size(); ++s) {
        if (values[s] && *values[s] < threshold) {
          out.push_back({r.metadata, r.source, static_cast<int>(s) + 1,
                         *values[s]});
        }
      }
    }
  }
  return out;
}

namespace {

std::string series_line(const MetricSeries& s) {
  std::string out;
  for (std::size_t n = 0; n < s.values.size(); ++n) {
    if (n > 0) out += ", ";
    out += s.values[n] ? format_fixed(*s.values[n], 4) : "-";
  }
  return out;
}

std::string aggregate_line(const SeriesAggregate& s) {
  std::string out;
  for (std::size_t n = 0; n < s.steps.size(); ++n) {
    if (n > 0) out += ", ";
    out += s.steps[n] ? format_fixed(s.steps[n]->mean, 4) : "-";
  }
  return out;
}

std::string run_label(const RunMetadata& m) {
  return "method=" + m.method + " dataset=" + m.dataset +
         " buffer_per_class=" + std::to_string(m.buffer_per_class) +
         " seed=" + std::to_string(m.seed);
}

bool selected(std::span<const Metric> selection, Metric m) {
  return std::find(selection.begin(), selection.end(), m) != selection.end();
}

std::string render_metrics_table(const ComparisonReport& report,
                                 std::span<const Metric> selection,
                                 std::optional<double> threshold) {
  std::ostringstream out;
  auto line = [&](std::string_view name, const std::string& body) {
    out << "  " << pad(std::string(name), 14, true) << body << "\n";
  };
  for (const auto& g : report.groups) {
    for (const auto& r : g.runs) {
      out << "run " << run_label(r.metadata)
          << " steps=" << r.evaluated_through;
      if (!r.source.empty()) out << " source=" << r.source;
      out << "\n";
      if (selected(selection, Metric::Acc)) line("acc", series_line(r.acc));
      if (selected(selection, Metric::Bwt)) line("bwt", series_line(r.bwt));
      if (selected(selection, Metric::BwtGem)) {
        line("bwt_gem", series_line(r.bwt_gem));
      }
      if (selected(selection, Metric::Mica)) {
        line("mica", series_line(r.mica.series));
        std::string argmin;
        for (std::size_t s = 0; s < r.mica.argmin.size(); ++s) {
          if (s > 0) argmin += "; ";
          for (std::size_t c = 0; c < r.mica.argmin[s].size(); ++c) {
            if (c > 0) argmin += " ";
            argmin += r.mica.argmin[s][c];
          }
        }
        line("mica_argmin", argmin);
      }
      if (selected(selection, Metric::MicaOld)) {
        line("mica_old", series_line(r.mica_old));
      }
      if (selected(selection, Metric::Wamica)) {
        const auto& w = r.wamica;
        line("wamica", format_fixed(w.wamica, 4) +
                           " (w=" + format_fixed(w.weight, 4) +
                           " min=" + format_fixed(w.mica_min, 4) +
                           " max=" + format_fixed(w.mica_max, 4) +
                           " mean=" + format_fixed(w.mica_mean, 4) + ")");
      }
      if (selected(selection, Metric::Distribution)) {
        for (std::size_t s = 0; s < r.distribution.size(); ++s) {
          const auto& d = r.distribution[s];
          line(s == 0 ? "distribution" : "",
               "step " + std::to_string(s + 1) +
                   ": min=" + format_fixed(d.min, 4) +
                   " q1=" + format_fixed(d.q1, 4) +
                   " median=" + format_fixed(d.median, 4) +
                   " q3=" + format_fixed(d.q3, 4) +
                   " max=" + format_fixed(d.max, 4) +
                   " mean=" + format_fixed(d.mean, 4) +
                   " n=" + std::to_string(d.count));
        }
      }
      if (threshold) {
        const auto& values = r.mica.series.values;
        for (std::size_t s = 0; s < values.size(); ++s) {
          if (values[s] && *values[s] < *threshold) {
            out << "  ! step " << s + 1 << " flagged: mica "
                << format_fixed(*values[s], 4) << " < threshold "
                << format_fixed(*threshold, 4) << "\n";
          }
        }
      }
    }
    out << "group method=" << g.key.method << " dataset=" << g.key.dataset
        << " buffer_per_class=" << g.key.buffer_per_class
        << " seeds=" << g.runs.size() << "\n";
    if (selected(selection, Metric::Acc)) line("acc", aggregate_line(g.acc));
    if (selected(selection, Metric::Bwt)) line("bwt", aggregate_line(g.bwt));
    if (selected(selection, Metric::BwtGem)) {
      line("bwt_gem", aggregate_line(g.bwt_gem));
    }
    if (selected(selection, Metric::Mica)) line("mica", aggregate_line(g.mica));
    if (selected(selection, Metric::MicaOld)) {
      line("mica_old", aggregate_line(g.mica_old));
    }
    if (selected(selection, Metric::Wamica)) {
      line("wamica", format_fixed(g.wamica.mean, 4));
    }
  }
  if (threshold) {
    const auto flags = threshold_flags(report, *threshold);
    out << "threshold " << format_fixed(*threshold, 4) << ": " << flags.size()
        << " step(s) flagged\n";
  }
  return out.str();
}

std::string render_metrics_csv(const ComparisonReport& report,
                               std::span<const Metric> selection,
                               std::optional<double> threshold) {
  std::ostringstream out;
  out << "scope,method,dataset,buffer_per_class,seed,metric,step,value,"
         "stddev,count,flagged\n";
  auto prefix = [&](std::string_view scope, const std::string& method,
                    const std::string& dataset, std::int64_t buffer,
                    const std::string& seed) {
    out << scope << ',' << csv_escape(method) << ',' << csv_escape(dataset)
        << ',' << buffer << ',' << seed << ',';
  };
  for (const auto& g : report.groups) {
    for (const auto& r : g.runs) {
      const auto& m = r.metadata;
      const std::string seed = std::to_string(m.seed);
      auto emit_series = [&](const MetricSeries& s, bool flaggable) {
        for (std::size_t n = 0; n < s.values.size(); ++n) {
          prefix("run", m.method, m.dataset, m.buffer_per_class, seed);
          out << s.name << ',' << n + 1 << ',' << opt_fixed(s.values[n], 6)
              << ",,,";
          if (flaggable && threshold) {
            out << (s.values[n] && *s.values[n] < *threshold ? 1 : 0);
          }
          out << "\n";
        }
      };
      if (selected(selection, Metric::Acc)) emit_series(r.acc, false);
      if (selected(selection, Metric::Bwt)) emit_series(r.bwt, false);
      if (selected(selection, Metric::BwtGem)) emit_series(r.bwt_gem, false);
      if (selected(selection, Metric::Mica)) emit_series(r.mica.series, true);
      if (selected(selection, Metric::MicaOld)) emit_series(r.mica_old, false);
      if (selected(selection, Metric::Wamica)) {
        const auto& w = r.wamica;
        const std::pair<const char*, double> scalars[] = {
            {"wamica", w.wamica},     {"wamica_weight", w.weight},
            {"wamica_mica_min", w.mica_min}, {"wamica_mica_max", w.mica_max},
            {"wamica_mica_mean", w.mica_mean}};
        for (const auto& [name, value] : scalars) {
          prefix("run", m.method, m.dataset, m.buffer_per_class, seed);
          out << name << ",," << format_fixed(value, 6) << ",,,\n";
        }
      }
      if (selected(selection, Metric::Distribution)) {
        for (std::size_t n = 0; n < r.distribution.size(); ++n) {
          const auto& d = r.distribution[n];
          const std::pair<const char*, double> points[] = {
              {"distribution_min", d.min},   {"distribution_q1", d.q1},
              {"distribution_median", d.median}, {"distribution_q3", d.q3},
              {"distribution_max", d.max},   {"distribution_mean", d.mean}};
          for (const auto& [name, value] : points) {
            prefix("run", m.method, m.dataset, m.buffer_per_class, seed);
            out << name << ',' << n + 1 << ',' << format_fixed(value, 6)
                << ",," << d.count << ",\n";
          }
        }
      }
    }
    auto emit_aggregate = [&](const SeriesAggregate& s) {
      for (std::size_t n = 0; n < s.steps.size(); ++n) {
        prefix("group", g.key.method, g.key.dataset, g.key.buffer_per_class,
               "");
        out << s.name << ',' << n + 1 << ',';
        if (s.steps[n]) {
          out << format_fixed(s.steps[n]->mean, 6) << ','
              << format_fixed(s.steps[n]->stddev, 6) << ','
              << s.steps[n]->count;
        } else {
          out << ",,0";
        }
        out << ",\n";
      }
    };
    if (selected(selection, Metric::Acc)) emit_aggregate(g.acc);
    if (selected(selection, Metric::Bwt)) emit_aggregate(g.bwt);
    if (selected(selection, Metric::BwtGem)) emit_aggregate(g.bwt_gem);
    if (selected(selection, Metric::Mica)) emit_aggregate(g.mica);
    if (selected(selection, Metric::MicaOld)) emit_aggregate(g.mica_old);
    if (selected(selection, Metric::Wamica)) {
      prefix("group", g.key.method, g.key.dataset, g.key.buffer_per_class, "");
      out << "wamica,," << format_fixed(g.wamica.mean, 6) << ','
          << format_fixed(g.wamica.stddev, 6) << ',' << g.wamica.count
          << ",\n";
    }
  }
  return out.str();
}

ordered_json distribution_json(const metrics::DistributionSummary& d) {
  return ordered_json{{"min", d.min},       {"q1", d.q1},
                      {"median", d.median}, {"q3", d.q3},
                      {"max", d.max},       {"mean", d.mean},
                      {"count", d.count}};
}

std::string render_metrics_json(const ComparisonReport& report,
                                std::span<const Metric> selection,
                                std::optional<double> threshold) {
  ordered_json root;
  root["format"] = "cilgauge.metrics/1";
  root["threshold"] = opt_json(threshold);
  root["groups"] = ordered_json::array();
  for (const auto& g : report.groups) {
    ordered_json j = group_header_json(g);
    j["runs"] = ordered_json::array();
    for (const auto& r : g.runs) {
      ordered_json run{{"seed", r.metadata.seed},
                       {"source", r.source},
                       {"steps", r.evaluated_through}};
      if (selected(selection, Metric::Acc)) run["acc"] = series_json(r.acc);
      if (selected(selection, Metric::Bwt)) run["bwt"] = series_json(r.bwt);
      if (selected(selection, Metric::BwtGem)) {
        run["bwt_gem"] = series_json(r.bwt_gem);
      }
      if (selected(selection, Metric::Mica)) {
        run["mica"] = series_json(r.mica.series);
        run["mica_argmin"] = r.mica.argmin;
      }
      if (selected(selection, Metric::MicaOld)) {
        run["mica_old"] = series_json(r.mica_old);
      }
      if (selected(selection, Metric::Wamica)) {
        run["wamica"] = {{"value", r.wamica.wamica},
                         {"weight", r.wamica.weight},
                         {"mica_min", r.wamica.mica_min},
                         {"mica_max", r.wamica.mica_max},
                         {"mica_mean", r.wamica.mica_mean}};
      }
      if (selected(selection, Metric::Distribution)) {
        ordered_json steps = ordered_json::array();
        for (const auto& d : r.distribution) {
          steps.push_back(distribution_json(d));
        }
        run["distribution"] = std::move(steps);
      }
      if (threshold) {
        ordered_json flagged = ordered_json::array();
        const auto& values = r.mica.series.values;
        for (std::size_t s = 0; s < values.size(); ++s) {
          if (values[s] && *values[s] < *threshold) flagged.push_back(s + 1);
        }
        run["flagged_steps"] = std::move(flagged);
      }
      j["runs"].push_back(std::move(run));
    }
    ordered_json aggregates;
    if (selected(selection, Metric::Acc)) {
      aggregates["acc"] = series_aggregate_json(g.acc);
    }
    if (selected(selection, Metric::Bwt)) {
      aggregates["bwt"] = series_aggregate_json(g.bwt);
    }
    if (selected(selection, Metric::BwtGem)) {
      aggregates["bwt_gem"] = series_aggregate_json(g.bwt_gem);
    }
    if (selected(selection, Metric::Mica)) {
      aggregates["mica"] = series_aggregate_json(g.mica);
    }
    if (selected(selection, Metric::MicaOld)) {
      aggregates["mica_old"] = series_aggregate_json(g.mica_old);
    }
    if (selected(selection, Metric::Wamica)) {
      aggregates["wamica"] = aggregate_json(g.wamica);
    }
    j["aggregate"] =
        aggregates.is_null() ? ordered_json::object() : std::move(aggregates);
    root["groups"].push_back(std::move(j));
  }
  return root.dump(2) + "\n";
}

}  // namespace

std::string render_metrics(const ComparisonReport& report,
                           std::span<const Metric> selection, Format format,
                           std::optional<double> threshold) {
  switch (format) {
    case Format::Table:
      return render_metrics_table(report, selection, threshold);
    case Format::Csv: return render_metrics_csv(report, selection, threshold);
    case Format::Json: return render_metrics_json(report, selection, threshold);
  }
  return {};
}

std::optional<Figure> parse_figure(std::string_view name) {
  if (name == "acc") return Figure::Acc;
  if (name == "mica") return Figure::Mica;
  if (name == "boxplot") return Figure::Boxplot;
  if (name == "wamica-surface") return Figure::WamicaSurface;
  return std::nullopt;
}

namespace {

std::string slug(const ingestion::RunGroupKey& key) {
  std::string raw = key.method + "_" + key.dataset + "_buf" +
                    std::to_string(key.buffer_per_class);
  for (char& c : raw) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '.' ||
                      c == '_';
    if (!keep) c = '_';
  }
  return raw;
}

// Per-seed value of a series at step s, or "" when undefined.
std::string seed_cell(const MetricSeries& series, std::size_t s) {
  return s < series.values.size() ? opt_fixed(series.values[s], 6) : "";
}

std::string acc_figure(const GroupReport& g) {
  std::ostringstream out;
  out << "step,mean,stddev";
  for (const auto& r : g.runs) out << ",seed_" << r.metadata.seed;
  out << "\n";
  for (std::size_t s = 0; s < g.acc.steps.size(); ++s) {
    const auto& a = g.acc.steps[s];
    out << s + 1 << ',' << (a ? format_fixed(a->mean, 6) : "") << ','
        << (a ? format_fixed(a->stddev, 6) : "");
    for (const auto& r : g.runs) out << ',' << seed_cell(r.acc, s);
    out << "\n";
  }
  return out.str();
}

std::string mica_figure(const GroupReport& g) {
  std::ostringstream out;
  out << "step,mica_mean,mica_stddev";
  for (const auto& r : g.runs) out << ",mica_seed_" << r.metadata.seed;
  out << ",acc_mean,acc_stddev";
  for (const auto& r : g.runs) out << ",acc_seed_" << r.metadata.seed;
  out << "\n";
  for (std::size_t s = 0; s < g.mica.steps.size(); ++s) {
    const auto& m = g.mica.steps[s];
    const auto& a = g.acc.steps[s];
    out << s + 1 << ',' << (m ? format_fixed(m->mean, 6) : "") << ','
        << (m ? format_fixed(m->stddev, 6) : "");
    for (const auto& r : g.runs) out << ',' << seed_cell(r.mica.series, s);
    out << ',' << (a ? format_fixed(a->mean, 6) : "") << ','
        << (a ? format_fixed(a->stddev, 6) : "");
    for (const auto& r : g.runs) out << ',' << seed_cell(r.acc, s);
    out << "\n";
  }
  return out.str();
}

std::string boxplot_figure(const GroupReport& g) {
  std::ostringstream out;
  out << "step,seed,min,q1,median,q3,max,mean,count\n";
  std::size_t steps = 0;
  for (const auto& r : g.runs) steps = std::max(steps, r.distribution.size());
  for (std::size_t s = 0; s < steps; ++s) {
    for (const auto& r : g.runs) {
      if (s >= r.distribution.size()) continue;
      const auto& d = r.distribution[s];
      out << s + 1 << ',' << r.metadata.seed << ',' << format_fixed(d.min, 6)
          << ',' << format_fixed(d.q1, 6) << ',' << format_fixed(d.median, 6)
          << ',' << format_fixed(d.q3, 6) << ',' << format_fixed(d.max, 6)
          << ',' << format_fixed(d.mean, 6) << ',' << d.count << "\n";
    }
  }
  return out.str();
}

constexpr int kSurfaceSteps = 20;  // grid spacing 0.05 on both axes

std::string surface_grid() {
  std::ostringstream out;
  out << "mica_mean,weight,wamica\n";
  for (int a = 0; a <= kSurfaceSteps; ++a) {
    for (int b = 0; b <= kSurfaceSteps; ++b) {
      const double mean = static_cast<double>(a) / kSurfaceSteps;
      const double weight = static_cast<double>(b) / kSurfaceSteps;
      out << format_fixed(mean, 6) << ',' << format_fixed(weight, 6) << ','
          << format_fixed(mean * weight, 6) << "\n";
    }
  }
  return out.str();
}

std::string surface_points(const ComparisonReport& report) {
  std::ostringstream out;
  out << "method,dataset,buffer_per_class,seeds,mica_mean,weight,wamica\n";
  for (const auto& g : report.groups) {
    out << csv_escape(g.key.method) << ',' << csv_escape(g.key.dataset) << ','
        << g.key.buffer_per_class << ',' << g.runs.size() << ','
        << format_fixed(g.mica_mean.mean, 6) << ','
        << format_fixed(g.weight.mean, 6) << ','
        << format_fixed(g.wamica.mean, 6) << "\n";
  }
  return out.str();
}

}  // namespace

std::vector<PlotFile> plot_data(const ComparisonReport& report, Figure figure) {
  std::vector<PlotFile> files;
  switch (figure) {
    case Figure::Acc:
      for (const auto& g : report.groups) {
        files.push_back({"acc_" + slug(g.key) + ".csv", acc_figure(g)});
      }
      break;
    case Figure::Mica:
      for (const auto& g : report.groups) {
        files.push_back({"mica_" + slug(g.key) + ".csv", mica_figure(g)});
      }
      break;
    case Figure::Boxplot:
      for (const auto& g : report.groups) {
        files.push_back({"boxplot_" + slug(g.key) + ".csv", boxplot_figure(g)});
      }
      break;
    case Figure::WamicaSurface:
      files.push_back({"wamica_surface_grid.csv", surface_grid()});
      files.push_back({"wamica_surface_points.csv", surface_points(report)});
      break;
  }
  return files;
}

void write_plot_files(std::span<const PlotFile> files,
                      const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec || !fs::is_directory(directory)) {
    throw Error(ErrorKind::Io, "cannot create output directory",
                directory.string());
  }
  for (const auto& file : files) {
    const fs::path target = directory / file.name;
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    out << file.contents;
    out.flush();
    if (!out) {
      throw Error(ErrorKind::Io, "cannot write file", target.string());
    }
  }
}

}  // namespace cilgauge::report
