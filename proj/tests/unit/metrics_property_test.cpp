// SPDX-FileCopyrightText: © 2026 The cilgauge Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "cilgauge/metrics.hpp"
#include "oracle.hpp"
#include "random_runs.hpp"

namespace cilgauge::metrics {
namespace {

constexpr double kTol = 1e-12;

void expect_opt_near(const std::optional<double>& got,
                     const std::optional<double>& want) {
  ASSERT_EQ(got.has_value(), want.has_value());
  if (want) EXPECT_NEAR(*got, *want, kTol);
}

TEST(MetricsPropertyTest, MatchesBruteForceOracle) {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 500; ++n) {
    const auto raw = testing::random_raw_run(rng);
    const RunLog run = testing::to_run_log(raw);
    const auto& tensor = run.tensor();
    const auto matrix = task_matrix(tensor);
    const auto acc = acc_series(matrix);
    const auto bwt = bwt_series(matrix);
    const auto gem = bwt_gem_series(matrix);
    const auto mica = mica_series(tensor);
    const auto old = mica_old_series(tensor);
    const auto w = wamica(mica.series);

    ASSERT_EQ(run.evaluated_through(), raw.steps());
    for (int i = 1; i <= raw.steps(); ++i) {
      for (int j = 1; j <= i; ++j) {
        EXPECT_NEAR(matrix.at(i, j), raw.R(i, j), kTol);
      }
      EXPECT_NEAR(*acc.step(i), oracle::acc(raw, i), kTol);
      expect_opt_near(bwt.step(i), oracle::bwt(raw, i));
      expect_opt_near(gem.step(i), oracle::bwt_gem(raw, i));
      EXPECT_NEAR(*mica.series.step(i), oracle::mica(raw, i), kTol);
      expect_opt_near(old.step(i), oracle::mica_old(raw, i));

      const auto d = class_distribution(tensor, i);
      const auto od = oracle::distribution(raw, i);
      EXPECT_NEAR(d.min, od.min, kTol);
      EXPECT_NEAR(d.q1, od.q1, kTol);
      EXPECT_NEAR(d.median, od.median, kTol);
      EXPECT_NEAR(d.q3, od.q3, kTol);
      EXPECT_NEAR(d.max, od.max, kTol);
      EXPECT_NEAR(d.mean, od.mean, kTol);
      EXPECT_EQ(d.count, od.count);
    }
    const auto ow = oracle::wamica(raw);
    EXPECT_NEAR(w.mica_min, ow.min, kTol);
    EXPECT_NEAR(w.mica_max, ow.max, kTol);
    EXPECT_NEAR(w.weight, ow.weight, kTol);
    EXPECT_NEAR(w.wamica, ow.wamica, kTol);
  }
}

TEST(MetricsPropertyTest, OrderingIdentities) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 500; ++n) {
    const RunLog run = testing::to_run_log(testing::random_raw_run(rng));
    const auto matrix = task_matrix(run.tensor());
    const auto acc = acc_series(matrix);
    const auto mica = mica_series(run.tensor());
    const auto old = mica_old_series(run.tensor());
    for (int i = 1; i <= run.evaluated_through(); ++i) {
      const auto row = matrix.row(i);
      const double lo = *std::min_element(row.begin(), row.end());
      const double hi = *std::max_element(row.begin(), row.end());
      EXPECT_LE(*mica.series.step(i), lo);
      EXPECT_LE(lo, *acc.step(i) + kTol);
      EXPECT_LE(*acc.step(i), hi + kTol);
      if (i >= 2) EXPECT_LE(*mica.series.step(i), *old.step(i));
      EXPECT_EQ(class_distribution(run.tensor(), i).min, *mica.series.step(i));
    }
    const auto w = wamica(mica.series);
    EXPECT_GE(w.weight, 0.0);
    EXPECT_LE(w.weight, 1.0);
    EXPECT_LE(w.wamica, w.mica_mean + kTol);
    EXPECT_LE(w.mica_mean, w.mica_max + kTol);
    if (w.mica_min == w.mica_max) {
      EXPECT_NEAR(w.wamica, w.mica_mean, kTol);
    } else {
      EXPECT_LT(w.wamica, w.mica_mean);
    }
  }
}

TEST(MetricsPropertyTest, InvariantUnderRelabelingAndInputOrder) {
  std::mt19937_64 rng(13);
  for (int n = 0; n < 200; ++n) {
    auto raw = testing::random_raw_run(rng);
    const RunLog base = testing::to_run_log(raw);

    // Reverse class order within each task and rename every class.
    oracle::RawRun relabeled = raw;
    std::map<std::string, std::string> rename;
    for (auto& task : relabeled.tasks) {
      std::reverse(task.begin(), task.end());
      for (auto& k : task) {
        rename[k] = "renamed-" + k;
        k = rename[k];
      }
    }
    for (auto& o : relabeled.observations) o.class_id = rename[o.class_id];
    std::shuffle(relabeled.observations.begin(), relabeled.observations.end(),
                 rng);
    const RunLog other = testing::to_run_log(relabeled);

    const auto ma = task_matrix(base.tensor());
    const auto mb = task_matrix(other.tensor());
    const auto acc_a = acc_series(ma);
    const auto acc_b = acc_series(mb);
    const auto bwt_a = bwt_series(ma);
    const auto bwt_b = bwt_series(mb);
    for (std::size_t s = 0; s < acc_a.size(); ++s) {
      EXPECT_NEAR(*acc_a.values[s], *acc_b.values[s], kTol);
      if (bwt_a.values[s]) EXPECT_NEAR(*bwt_a.values[s], *bwt_b.values[s], kTol);
    }
    EXPECT_EQ(mica_series(base.tensor()).series,
              mica_series(other.tensor()).series);
    EXPECT_EQ(mica_old_series(base.tensor()), mica_old_series(other.tensor()));
    EXPECT_NEAR(wamica(mica_series(base.tensor()).series).wamica,
                wamica(mica_series(other.tensor()).series).wamica, kTol);
  }
}

TEST(MetricsPropertyTest, MonotoneResponseToSingleDecrease) {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 300; ++n) {
    auto raw = testing::random_raw_run(rng);
    const RunLog before = testing::to_run_log(raw);
    std::uniform_int_distribution<std::size_t> pick(
        0, raw.observations.size() - 1);
    auto& target = raw.observations[pick(rng)];
    target.accuracy = std::max(0.0, target.accuracy - 0.13);
    const RunLog after = testing::to_run_log(raw);

    const auto acc_before = acc_series(task_matrix(before.tensor()));
    const auto acc_after = acc_series(task_matrix(after.tensor()));
    const auto mica_before = mica_series(before.tensor()).series;
    const auto mica_after = mica_series(after.tensor()).series;
    for (std::size_t s = 0; s < acc_before.size(); ++s) {
      EXPECT_LE(*acc_after.values[s], *acc_before.values[s] + kTol);
      EXPECT_LE(*mica_after.values[s], *mica_before.values[s]);
    }
    EXPECT_LE(wamica(mica_after).mica_mean, wamica(mica_before).mica_mean + kTol);
  }
}

}  // namespace
}  // namespace cilgauge::metrics
