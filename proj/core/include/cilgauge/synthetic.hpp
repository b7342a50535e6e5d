// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cilgauge/model.hpp"

namespace cilgauge::synthetic {

/// xoshiro256** 1.0 (Blackman & Vigna), state seeded from a 64-bit seed by
/// four successive splitmix64 outputs. Pinned so fixtures reproduce in any
/// language that implements the same two algorithms.
class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;
  // Top 53 bits scaled to [0, 1).
  double next_unit() noexcept;
  // Uniform on [-amplitude, +amplitude).
  double next_symmetric(double amplitude) noexcept;

 private:
  std::array<std::uint64_t, 4> state_{};
};

struct ForgettingProfile {
  double initial_accuracy = 1.0;
  double retention = 1.0;  // geometric decay per elapsed task
  double floor = 0.0;
  double noise_amplitude = 0.0;
  std::int64_t seed = 0;
};

// Throws Error(InvalidProfile).
void validate_profile(const ForgettingProfile& profile, double per_class_jitter);

/// r_ijk = clamp(initial * retention^(i-j) + offset_k + noise_ijk, floor, 1)
///
/// offset_k is a fixed per-class draw from [-jitter, jitter); noise_ijk is a
/// fresh draw from [-noise_amplitude, noise_amplitude). The stream draws all
/// offsets in flat schedule order first, then noise by evaluation and flat
/// class order. retention^n is a left-to-right product, not std::pow.
/// `metadata.seed` is replaced by `profile.seed`.
RunLog generate_run(const TaskSchedule& schedule,
                    const ForgettingProfile& profile, double per_class_jitter,
                    RunMetadata metadata = {"synthetic", "synthetic", 0, 0});

struct NamedProfile {
  ForgettingProfile profile;  // seed ignored; family seeds apply
  double per_class_jitter = 0.0;
};

// Cross product profiles x seeds, method name = profile key. Runs come out
// ordered by profile name then by position in `seeds`.
std::vector<RunLog> generate_method_family(
    const TaskSchedule& schedule,
    const std::map<std::string, NamedProfile>& profiles,
    const std::vector<std::int64_t>& seeds, std::string dataset = "synthetic",
    std::int64_t buffer_per_class = 0);

/// Declarative description read by `cilgauge simulate`. See
/// docs/simulate-config.md for the file format.
struct SimulationConfig {
  int tasks = 0;
  int classes_per_task = 0;
  std::vector<std::int64_t> seeds;
  std::string dataset = "synthetic";
  std::int64_t buffer_per_class = 0;
  std::map<std::string, NamedProfile> profiles;

  // Classes "0".."tasks*classes_per_task-1", consecutive per task.
  TaskSchedule schedule() const;
};

// Throws Error(InvalidProfile) naming the offending line.
SimulationConfig parse_simulation_config(std::string_view text);

std::vector<RunLog> simulate(const SimulationConfig& config);

}  // namespace cilgauge::synthetic
