// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include <gtest/gtest.h>

#include "cilgauge/metrics.hpp"
#include "running_example.hpp"

namespace cilgauge::metrics {
namespace {

constexpr double kTol = 1e-12;

using testing::running_example;

RunLog constant_run(double c, int tasks, int classes_per_task) {
  std::vector<std::vector<ClassId>> sets;
  std::vector<Observation> obs;
  int next = 0;
  for (int t = 0; t < tasks; ++t) {
    std::vector<ClassId> set;
    for (int k = 0; k < classes_per_task; ++k) set.push_back(std::to_string(next++));
    sets.push_back(set);
  }
  for (int i = 1; i <= tasks; ++i) {
    for (int j = 1; j <= i; ++j) {
      for (const auto& k : sets[static_cast<std::size_t>(j - 1)]) {
        obs.push_back({i, k, c});
      }
    }
  }
  return build_run_log(TaskSchedule::from_class_sets(sets), obs, {});
}

TEST(CompensatedSumTest, RecoversLowOrderBits) {
  const std::vector<double> v{1e16, 1.0, -1e16};
  EXPECT_EQ(compensated_sum(v), 1.0);
  const std::vector<double> tenths(10, 0.1);
  EXPECT_EQ(compensated_sum(tenths), 1.0);
  EXPECT_EQ(compensated_mean(std::vector<double>{}), 0.0);
}

TEST(TaskMatrixTest, MeanOverTaskClasses) {
  const auto s = TaskSchedule::from_class_sets({{"0", "1"}});
  const std::vector<Observation> obs{{1, "0", 0.9}, {1, "1", 0.7}};
  const auto m = task_matrix(build_run_log(s, obs, {}).tensor());
  EXPECT_NEAR(m.at(1, 1), 0.8, kTol);
}

TEST(TaskMatrixTest, SingletonTasksCopyClassAccuracy) {
  const auto s = TaskSchedule::from_class_sets({{"a"}, {"b"}, {"c"}});
  const std::vector<Observation> obs{{1, "a", 0.31}, {2, "a", 0.27},
                                     {2, "b", 0.93}, {3, "a", 0.11},
                                     {3, "b", 0.52}, {3, "c", 0.77}};
  const auto run = build_run_log(s, obs, {});
  const auto m = task_matrix(run.tensor());
  for (const auto& o : obs) {
    EXPECT_EQ(m.at(o.evaluation_index, *s.task_of(o.class_id)), o.accuracy);
  }
  EXPECT_THROW(m.at(1, 2), std::out_of_range);
}

TEST(TaskMatrixTest, RunningExample) {
  const auto m = task_matrix(running_example().tensor());
  EXPECT_NEAR(m.at(1, 1), 0.8, kTol);
  EXPECT_NEAR(m.at(2, 1), 0.5, kTol);
  EXPECT_NEAR(m.at(2, 2), 0.85, kTol);
}

TEST(AccSeriesTest, RunningExample) {
  const auto acc = acc_series(task_matrix(running_example().tensor()));
  ASSERT_EQ(acc.size(), 2u);
  EXPECT_NEAR(*acc.step(1), 0.8, kTol);
  EXPECT_NEAR(*acc.step(2), 0.675, kTol);
}

TEST(AccSeriesTest, TasksCountEquallyRegardlessOfSize) {
  // Task 1 has three classes at 1.0, task 2 one class at 0.0.
  const auto s = TaskSchedule::from_class_sets({{"a", "b", "c"}, {"d"}});
  const std::vector<Observation> obs{{1, "a", 1}, {1, "b", 1}, {1, "c", 1},
                                     {2, "a", 1}, {2, "b", 1}, {2, "c", 1},
                                     {2, "d", 0}};
  const auto acc = acc_series(task_matrix(build_run_log(s, obs, {}).tensor()));
  EXPECT_NEAR(*acc.step(2), 0.5, kTol);  // not 0.75
}

TEST(AccSeriesTest, ConstantFieldAndSingleTask) {
  const auto acc = acc_series(task_matrix(constant_run(0.63, 4, 3).tensor()));
  for (const auto& v : acc.values) EXPECT_NEAR(*v, 0.63, kTol);
  const auto single = acc_series(task_matrix(constant_run(0.2, 1, 1).tensor()));
  EXPECT_EQ(*single.step(1), 0.2);
}

TEST(BwtSeriesTest, RunningExample) {
  const auto m = task_matrix(running_example().tensor());
  const auto bwt = bwt_series(m);
  EXPECT_FALSE(bwt.step(1).has_value());
  EXPECT_NEAR(*bwt.step(2), 0.35, kTol);
  const auto gem = bwt_gem_series(m);
  EXPECT_FALSE(gem.step(1).has_value());
  EXPECT_NEAR(*gem.step(2), -0.3, kTol);  // R21 - R11
}

TEST(BwtSeriesTest, ConstantFieldIsZero) {
  const auto m = task_matrix(constant_run(0.4, 5, 2).tensor());
  const auto bwt = bwt_series(m);
  for (int i = 2; i <= 5; ++i) EXPECT_NEAR(*bwt.step(i), 0.0, kTol);
  const auto gem = bwt_gem_series(m);
  for (int i = 2; i <= 5; ++i) EXPECT_NEAR(*gem.step(i), 0.0, kTol);
}

TEST(MicaSeriesTest, RunningExample) {
  const auto mica = mica_series(running_example().tensor());
  EXPECT_NEAR(*mica.series.step(1), 0.7, kTol);
  EXPECT_NEAR(*mica.series.step(2), 0.4, kTol);
  EXPECT_EQ(mica.argmin[1], std::vector<ClassId>{"1"});
}

TEST(MicaSeriesTest, TiesReportAllClassesSorted) {
  const auto s = TaskSchedule::from_class_sets({{"zeta", "alpha", "mid"}});
  const std::vector<Observation> obs{
      {1, "zeta", 0.3}, {1, "alpha", 0.3}, {1, "mid", 0.9}};
  const auto mica = mica_series(build_run_log(s, obs, {}).tensor());
  EXPECT_EQ(mica.argmin[0], (std::vector<ClassId>{"alpha", "zeta"}));
}

TEST(MicaSeriesTest, ConstantField) {
  const auto mica = mica_series(constant_run(0.55, 3, 2).tensor());
  for (const auto& v : mica.series.values) EXPECT_EQ(*v, 0.55);
}

TEST(MicaOldSeriesTest, RunningExample) {
  const auto old = mica_old_series(running_example().tensor());
  EXPECT_FALSE(old.step(1).has_value());
  EXPECT_NEAR(*old.step(2), 0.4, kTol);
}

TEST(MicaOldSeriesTest, ExcludesCurrentTask) {
  const auto s = TaskSchedule::from_class_sets({{"a", "b"}, {"c", "d"}});
  const std::vector<Observation> obs{{1, "a", 1}, {1, "b", 1}, {2, "a", 1},
                                     {2, "b", 1}, {2, "c", 0}, {2, "d", 0}};
  const auto run = build_run_log(s, obs, {});
  EXPECT_EQ(*mica_old_series(run.tensor()).step(2), 1.0);
  EXPECT_EQ(*mica_series(run.tensor()).series.step(2), 0.0);
}

TEST(WamicaTest, RunningExample) {
  const auto w = wamica(mica_series(running_example().tensor()).series);
  EXPECT_NEAR(w.mica_min, 0.4, kTol);
  EXPECT_NEAR(w.mica_max, 0.7, kTol);
  EXPECT_NEAR(w.weight, 0.7, kTol);
  EXPECT_NEAR(w.mica_mean, 0.55, kTol);
  EXPECT_NEAR(w.wamica, 0.385, kTol);
}

TEST(WamicaTest, ConstantSeriesHasUnitWeight) {
  const MetricSeries s{"mica", {0.42, 0.42, 0.42, 0.42}};
  const auto w = wamica(s);
  EXPECT_EQ(w.weight, 1.0);
  EXPECT_NEAR(w.wamica, 0.42, kTol);
}

TEST(WamicaTest, TwoPointSeries) {
  const auto w = wamica(MetricSeries{"mica", {0.9, 0.1}});
  EXPECT_NEAR(w.weight, 0.2, kTol);
  EXPECT_NEAR(w.mica_mean, 0.5, kTol);
  EXPECT_NEAR(w.wamica, 0.1, kTol);
}

TEST(WamicaTest, RejectsEmptyAndUndefined) {
  try {
    wamica(MetricSeries{"mica", {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySeries);
  }
  try {
    wamica(MetricSeries{"mica_old", {std::nullopt, 0.4}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UndefinedMetricValue);
  }
}

TEST(QuantileTest, Type7Interpolation) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(quantile_type7(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_type7(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile_type7(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_type7(v, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(quantile_type7(v, 1.0), 4.0);
  EXPECT_THROW(quantile_type7({}, 0.5), std::invalid_argument);
}

TEST(ClassDistributionTest, RunningExampleStepTwo) {
  const auto d = class_distribution(running_example().tensor(), 2);
  EXPECT_EQ(d.count, 4u);
  EXPECT_NEAR(d.min, 0.4, kTol);
  EXPECT_NEAR(d.q1, 0.55, kTol);
  EXPECT_NEAR(d.median, 0.7, kTol);
  EXPECT_NEAR(d.q3, 0.825, kTol);
  EXPECT_NEAR(d.max, 0.9, kTol);
  EXPECT_NEAR(d.mean, 0.675, kTol);
}

TEST(ClassDistributionTest, SingleClassCollapses) {
  const auto s = TaskSchedule::from_class_sets({{"only"}});
  const std::vector<Observation> obs{{1, "only", 0.37}};
  const auto d = class_distribution(build_run_log(s, obs, {}).tensor(), 1);
  for (double v : {d.min, d.q1, d.median, d.q3, d.max, d.mean}) {
    EXPECT_EQ(v, 0.37);
  }
}

TEST(ClassDistributionTest, RejectsAbsentStep) {
  EXPECT_THROW(class_distribution(running_example().tensor(), 3),
               std::out_of_range);
}

}  // namespace
}  // namespace cilgauge::metrics
