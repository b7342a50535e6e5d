// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "cilgauge/ingestion.hpp"
#include "cilgauge/metrics.hpp"
#include "cilgauge/synthetic.hpp"

namespace cilgauge::synthetic {
namespace {

TaskSchedule grid_schedule(int tasks, int per_task) {
  std::vector<std::vector<ClassId>> sets;
  int next = 0;
  for (int j = 0; j < tasks; ++j) {
    std::vector<ClassId> ids;
    for (int c = 0; c < per_task; ++c) ids.push_back(std::to_string(next++));
    sets.push_back(std::move(ids));
  }
  return TaskSchedule::from_class_sets(sets);
}

TEST(XoshiroTest, MatchesReferenceOutputs) {
  Xoshiro256StarStar zero(0);
  EXPECT_EQ(zero.next(), 0x99ec5f36cb75f2b4ULL);
  EXPECT_EQ(zero.next(), 0xbf6e1f784956452aULL);
  EXPECT_EQ(zero.next(), 0x1a5f849d4933e6e0ULL);

  Xoshiro256StarStar answer(42);
  EXPECT_EQ(answer.next(), 0x15780b2e0c2ec716ULL);
  EXPECT_EQ(answer.next(), 0x6104d9866d113a7eULL);
  EXPECT_EQ(answer.next(), 0xae17533239e499a1ULL);
}

TEST(XoshiroTest, UnitAndSymmetricRanges) {
  Xoshiro256StarStar rng(42);
  EXPECT_EQ(rng.next_unit(), 0.08386297105988216);
  for (int n = 0; n < 10000; ++n) {
    const double u = rng.next_unit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double s = rng.next_symmetric(0.25);
    EXPECT_GE(s, -0.25);
    EXPECT_LT(s, 0.25);
  }
}

TEST(GenerateRunTest, ConstantProfile) {
  const RunLog run =
      generate_run(grid_schedule(3, 2), {0.8, 1.0, 0.0, 0.0, 5}, 0.0);
  EXPECT_EQ(run.evaluated_through(), 3);
  EXPECT_EQ(run.metadata().seed, 5);
  for (const auto& obs : run.observations()) EXPECT_EQ(obs.accuracy, 0.8);
}

TEST(GenerateRunTest, GeometricDecay) {
  const RunLog run =
      generate_run(grid_schedule(2, 2), {0.8, 0.5, 0.0, 0.0, 0}, 0.0);
  EXPECT_EQ(run.tensor().at(1, "0"), 0.8);
  EXPECT_EQ(run.tensor().at(2, "0"), 0.4);
  EXPECT_EQ(run.tensor().at(2, "3"), 0.8);
  const auto mica = metrics::mica_series(run.tensor());
  EXPECT_EQ(mica.series.step(2), 0.4);
}

TEST(GenerateRunTest, FloorClampsDecay) {
  const RunLog run =
      generate_run(grid_schedule(4, 1), {0.8, 0.5, 0.3, 0.0, 0}, 0.0);
  EXPECT_EQ(run.tensor().at(4, "0"), 0.3);
  EXPECT_EQ(run.tensor().at(3, "0"), 0.3);
  EXPECT_EQ(run.tensor().at(2, "0"), 0.4);
}

TEST(GenerateRunTest, SameSeedIsBitIdentical) {
  const ForgettingProfile profile{0.9, 0.8, 0.1, 0.05, 17};
  const auto schedule = grid_schedule(5, 4);
  const RunLog a = generate_run(schedule, profile, 0.03);
  const RunLog b = generate_run(schedule, profile, 0.03);
  EXPECT_EQ(a, b);
  EXPECT_EQ(ingestion::serialize_run_log(ingestion::to_document(a)),
            ingestion::serialize_run_log(ingestion::to_document(b)));

  ForgettingProfile other = profile;
  other.seed = 18;
  EXPECT_NE(generate_run(schedule, other, 0.03), a);
}

TEST(GenerateRunTest, RejectsInvalidProfiles) {
  const auto schedule = grid_schedule(2, 2);
  EXPECT_THROW(generate_run(schedule, {1.2, 1.0, 0.0, 0.0, 0}, 0.0), Error);
  EXPECT_THROW(generate_run(schedule, {0.8, -0.1, 0.0, 0.0, 0}, 0.0), Error);
  EXPECT_THROW(generate_run(schedule, {0.5, 1.0, 0.6, 0.0, 0}, 0.0), Error);
  EXPECT_THROW(generate_run(schedule, {0.5, 1.0, 0.0, 0.0, 0}, 1.5), Error);
  try {
    generate_run(schedule, {0.8, 1.0, 0.0, 2.0, 0}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidProfile);
    EXPECT_EQ(e.path(), "noise_amplitude");
  }
}

TEST(GenerateMethodFamilyTest, CrossProduct) {
  const std::map<std::string, NamedProfile> profiles{
      {"keep", {{0.9, 1.0, 0.0, 0.0, 0}, 0.0}},
      {"forget", {{0.9, 0.5, 0.0, 0.02, 0}, 0.01}}};
  const auto runs =
      generate_method_family(grid_schedule(3, 2), profiles, {1, 2, 3}, "toy", 20);
  ASSERT_EQ(runs.size(), 6u);
  EXPECT_EQ(runs[0].metadata().method, "forget");
  EXPECT_EQ(runs[3].metadata().method, "keep");
  EXPECT_EQ(runs[4].metadata().seed, 2);
  EXPECT_EQ(runs[4].metadata().buffer_per_class, 20);
  EXPECT_EQ(runs[4].metadata().dataset, "toy");

  // Full retention should score higher under WAMICA than halving per task.
  const auto score = [](const RunLog& run) {
    return metrics::wamica(metrics::mica_series(run.tensor()).series).wamica;
  };
  EXPECT_GT(score(runs[3]), score(runs[0]));
}

TEST(GenerateMethodFamilyTest, EmptyInputsFail) {
  const std::map<std::string, NamedProfile> profiles{
      {"keep", {{0.9, 1.0, 0.0, 0.0, 0}, 0.0}}};
  EXPECT_THROW(generate_method_family(grid_schedule(2, 1), profiles, {}), Error);
  EXPECT_THROW(generate_method_family(grid_schedule(2, 1), {}, {1}), Error);
}

TEST(GenerateRunPropertyTest, MicaFollowsClosedFormWithoutNoise) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 6);
  for (int n = 0; n < 300; ++n) {
    ForgettingProfile profile;
    profile.initial_accuracy = unit(rng);
    profile.retention = unit(rng);
    profile.floor = profile.initial_accuracy * unit(rng);
    profile.seed = static_cast<std::int64_t>(rng());
    const int tasks = size(rng);
    const RunLog run =
        generate_run(grid_schedule(tasks, size(rng)), profile, 0.0);
    const auto mica = metrics::mica_series(run.tensor()).series;
    double power = 1.0;
    for (int i = 1; i <= tasks; ++i) {
      const double expected = std::clamp(profile.initial_accuracy * power,
                                         profile.floor, 1.0);
      EXPECT_EQ(mica.step(i), expected) << "run " << n << " step " << i;
      power *= profile.retention;
    }
  }
}

TEST(GenerateRunPropertyTest, OutputAlwaysPassesIngestion) {
  Xoshiro256StarStar rng(7);
  for (int n = 0; n < 200; ++n) {
    ForgettingProfile profile{rng.next_unit(), rng.next_unit(), 0.0,
                              rng.next_unit() * 0.3,
                              static_cast<std::int64_t>(rng.next())};
    profile.floor = profile.initial_accuracy * rng.next_unit();
    const RunLog run = generate_run(grid_schedule(1 + n % 7, 1 + n % 4),
                                    profile, rng.next_unit() * 0.2);
    for (const auto& obs : run.observations()) {
      EXPECT_GE(obs.accuracy, profile.floor);
      EXPECT_LE(obs.accuracy, 1.0);
    }
    const auto text = ingestion::serialize_run_log(ingestion::to_document(run));
    EXPECT_EQ(ingestion::validate_and_build(ingestion::parse_run_log(text)), run);
  }
}

TEST(SimulationConfigTest, ParsesProfilesAndGlobals) {
  const auto config = parse_simulation_config(R"(
# two methods on a toy stream
tasks = 4
classes_per_task = 3
seeds = 1, 2,3
dataset = toy
buffer_per_class = 20
per_class_jitter = 0.02

[profile steady]
initial_accuracy = 0.9
retention = 0.95
floor = 0.2   # never below chance-ish

[profile volatile]
initial_accuracy = 0.95
retention = 0.6
noise_amplitude = 0.05
per_class_jitter = 0
)");
  EXPECT_EQ(config.tasks, 4);
  EXPECT_EQ(config.classes_per_task, 3);
  EXPECT_EQ(config.seeds, (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(config.dataset, "toy");
  EXPECT_EQ(config.buffer_per_class, 20);
  ASSERT_EQ(config.profiles.size(), 2u);
  EXPECT_EQ(config.profiles.at("steady").profile.floor, 0.2);
  EXPECT_EQ(config.profiles.at("steady").per_class_jitter, 0.02);
  EXPECT_EQ(config.profiles.at("volatile").per_class_jitter, 0.0);
  EXPECT_EQ(config.schedule().task(4).class_ids,
            (std::vector<ClassId>{"9", "10", "11"}));

  const auto runs = simulate(config);
  EXPECT_EQ(runs.size(), 6u);
  EXPECT_EQ(simulate(config), runs);
}

TEST(SimulationConfigTest, ErrorsNameTheLine) {
  const auto error_path = [](const std::string& text) {
    try {
      parse_simulation_config(text);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidProfile);
      return e.path();
    }
    ADD_FAILURE() << "accepted: " << text;
    return std::string();
  };
  EXPECT_EQ(error_path("tasks = 2\nclasses_per_task = x\n"), "line 2");
  EXPECT_EQ(error_path("tasks = 2\n[profile a\n"), "line 2");
  EXPECT_EQ(error_path("colour = red\n"), "line 1");
  EXPECT_EQ(error_path("tasks = 2\n[section]\n"), "line 2");
  EXPECT_EQ(error_path("[profile a]\n[profile a]\n"), "line 2");
  EXPECT_EQ(error_path("[profile a]\nspeed = 3\n"), "line 2");
  EXPECT_EQ(error_path("classes_per_task = 2\n"), "tasks");
  EXPECT_EQ(error_path("tasks = 2\nclasses_per_task = 2\n[profile a]\nretention = 3\n"),
            "profile a.retention");
}

}  // namespace
}  // namespace cilgauge::synthetic
