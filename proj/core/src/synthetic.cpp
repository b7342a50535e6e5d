// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "cilgauge/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

namespace cilgauge::synthetic {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

bool is_fraction(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

Xoshiro256StarStar::Xoshiro256StarStar(std::uint64_t seed) noexcept {
  for (auto& word : state_) word = splitmix64(seed);
}

std::uint64_t Xoshiro256StarStar::next() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Xoshiro256StarStar::next_unit() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Xoshiro256StarStar::next_symmetric(double amplitude) noexcept {
  return amplitude * (2.0 * next_unit() - 1.0);
}

void validate_profile(const ForgettingProfile& profile,
                      double per_class_jitter) {
  const std::pair<const char*, double> fractions[] = {
      {"initial_accuracy", profile.initial_accuracy},
      {"retention", profile.retention},
      {"floor", profile.floor},
      {"noise_amplitude", profile.noise_amplitude},
      {"per_class_jitter", per_class_jitter},
  };
  for (const auto& [name, value] : fractions) {
    if (!is_fraction(value)) {
      throw Error(ErrorKind::InvalidProfile,
                  std::string(name) + " must lie in [0,1]", name);
    }
  }
  if (profile.floor > profile.initial_accuracy) {
    throw Error(ErrorKind::InvalidProfile,
                "floor must not exceed initial_accuracy", "floor");
  }
}

RunLog generate_run(const TaskSchedule& schedule,
                    const ForgettingProfile& profile, double per_class_jitter,
                    RunMetadata metadata) {
  validate_profile(profile, per_class_jitter);
  if (schedule.task_count() == 0) {
    throw Error(ErrorKind::InvalidProfile, "schedule has no tasks", "tasks");
  }
  Xoshiro256StarStar rng(static_cast<std::uint64_t>(profile.seed));

  const auto& classes = schedule.flat_classes();
  std::vector<double> offsets;
  offsets.reserve(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    offsets.push_back(rng.next_symmetric(per_class_jitter));
  }

  // decay[n] = retention^n
  std::vector<double> decay{1.0};
  for (int n = 1; n < schedule.task_count(); ++n) {
    decay.push_back(decay.back() * profile.retention);
  }

  std::vector<std::vector<double>> rows;
  for (int i = 1; i <= schedule.task_count(); ++i) {
    std::vector<double> row;
    row.reserve(schedule.classes_through(i));
    for (int j = 1; j <= i; ++j) {
      const double base =
          profile.initial_accuracy * decay[static_cast<std::size_t>(i - j)];
      const std::size_t begin = schedule.task_offset(j);
      const std::size_t end = schedule.classes_through(j);
      for (std::size_t k = begin; k < end; ++k) {
        const double noise = rng.next_symmetric(profile.noise_amplitude);
        row.push_back(std::clamp(base + offsets[k] + noise, profile.floor, 1.0));
      }
    }
    rows.push_back(std::move(row));
  }
  metadata.seed = profile.seed;
  return RunLog(std::move(metadata), AccuracyTensor(schedule, std::move(rows)));
}

std::vector<RunLog> generate_method_family(
    const TaskSchedule& schedule,
    const std::map<std::string, NamedProfile>& profiles,
    const std::vector<std::int64_t>& seeds, std::string dataset,
    std::int64_t buffer_per_class) {
  if (profiles.empty()) {
    throw Error(ErrorKind::InvalidProfile, "no profiles given", "profiles");
  }
  if (seeds.empty()) {
    throw Error(ErrorKind::InvalidProfile, "no seeds given", "seeds");
  }
  std::vector<RunLog> runs;
  runs.reserve(profiles.size() * seeds.size());
  for (const auto& [name, named] : profiles) {
    for (std::int64_t seed : seeds) {
      ForgettingProfile profile = named.profile;
      profile.seed = seed;
      try {
        runs.push_back(generate_run(schedule, profile, named.per_class_jitter,
                                    {name, dataset, seed, buffer_per_class}));
      } catch (const Error& err) {
        throw Error(err.kind(), err.message(),
                    "profile " + name + "." + err.path());
      }
    }
  }
  return runs;
}

TaskSchedule SimulationConfig::schedule() const {
  std::vector<std::vector<ClassId>> sets;
  int next = 0;
  for (int t = 0; t < tasks; ++t) {
    std::vector<ClassId> set;
    for (int c = 0; c < classes_per_task; ++c) {
      set.push_back(std::to_string(next++));
    }
    sets.push_back(std::move(set));
  }
  return TaskSchedule::from_class_sets(std::move(sets));
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

Error config_error(int line, const std::string& message) {
  return Error(ErrorKind::InvalidProfile, message,
               "line " + std::to_string(line));
}

double parse_double(const std::string& text, int line) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw config_error(line, "expected a number, got '" + text + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& text, int line) {
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw config_error(line, "expected an integer, got '" + text + "'");
  }
  return value;
}

}  // namespace

SimulationConfig parse_simulation_config(std::string_view text) {
  SimulationConfig config;
  config.seeds.clear();
  double default_jitter = 0.0;
  std::map<std::string, std::optional<double>> jitter_overrides;
  std::string section;  // empty = global

  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string content = trim(raw);
    if (content.empty()) continue;

    if (content.front() == '[') {
      if (content.back() != ']') throw config_error(line, "unclosed section");
      const std::string header = trim(content.substr(1, content.size() - 2));
      if (!header.starts_with("profile ")) {
        throw config_error(line, "expected [profile <name>]");
      }
      section = trim(header.substr(8));
      if (section.empty()) throw config_error(line, "profile needs a name");
      if (config.profiles.contains(section)) {
        throw config_error(line, "profile '" + section + "' defined twice");
      }
      config.profiles[section] = NamedProfile{};
      jitter_overrides[section] = std::nullopt;
      continue;
    }

    const auto eq = content.find('=');
    if (eq == std::string::npos) throw config_error(line, "expected key = value");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));

    if (section.empty()) {
      if (key == "tasks") {
        config.tasks = static_cast<int>(parse_int(value, line));
      } else if (key == "classes_per_task") {
        config.classes_per_task = static_cast<int>(parse_int(value, line));
      } else if (key == "seeds") {
        std::istringstream list(value);
        std::string item;
        while (std::getline(list, item, ',')) {
          config.seeds.push_back(parse_int(trim(item), line));
        }
      } else if (key == "dataset") {
        config.dataset = value;
      } else if (key == "buffer_per_class") {
        config.buffer_per_class = parse_int(value, line);
      } else if (key == "per_class_jitter") {
        default_jitter = parse_double(value, line);
      } else {
        throw config_error(line, "unknown key '" + key + "'");
      }
      continue;
    }

    ForgettingProfile& profile = config.profiles[section].profile;
    if (key == "initial_accuracy") {
      profile.initial_accuracy = parse_double(value, line);
    } else if (key == "retention") {
      profile.retention = parse_double(value, line);
    } else if (key == "floor") {
      profile.floor = parse_double(value, line);
    } else if (key == "noise_amplitude") {
      profile.noise_amplitude = parse_double(value, line);
    } else if (key == "per_class_jitter") {
      jitter_overrides[section] = parse_double(value, line);
    } else {
      throw config_error(line, "unknown profile key '" + key + "'");
    }
  }

  if (config.tasks < 1) {
    throw Error(ErrorKind::InvalidProfile, "tasks must be >= 1", "tasks");
  }
  if (config.classes_per_task < 1) {
    throw Error(ErrorKind::InvalidProfile, "classes_per_task must be >= 1",
                "classes_per_task");
  }
  if (config.buffer_per_class < 0) {
    throw Error(ErrorKind::InvalidProfile, "buffer_per_class must be >= 0",
                "buffer_per_class");
  }
  for (auto& [name, named] : config.profiles) {
    named.per_class_jitter = jitter_overrides[name].value_or(default_jitter);
    try {
      validate_profile(named.profile, named.per_class_jitter);
    } catch (const Error& err) {
      throw Error(err.kind(), err.message(), "profile " + name + "." + err.path());
    }
  }
  return config;
}

std::vector<RunLog> simulate(const SimulationConfig& config) {
  return generate_method_family(config.schedule(), config.profiles,
                                config.seeds, config.dataset,
                                config.buffer_per_class);
}

}  // namespace cilgauge::synthetic
