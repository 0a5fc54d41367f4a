// Copyright 2026 the xdial authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "xdial/goal_calibration.hpp"

namespace xdial::goal {
namespace {

const db::Database& calibration_db() {
  static const db::Database db = db::generate_database(kCalibrationDbSeed);
  return db;
}

TEST(Loss, ZeroAtTheTarget) {
  const CalibrationTarget t;
  GoalSample s;
  s.mean_subgoals = t.mean_subgoals;
  s.type_share = t.type_share;
  EXPECT_DOUBLE_EQ(structure_loss(s, t), 0.0);
}

TEST(Loss, ScaledSquaredErrors) {
  CalibrationTarget t;
  t.mean_subgoals = 3.0;
  t.type_share = {0.2, 0.2, 0.2, 0.2, 0.2};
  GoalSample s;
  s.mean_subgoals = 3.1;
  s.type_share = {0.24, 0.16, 0.2, 0.2, 0.2};
  // (0.1 / 0.05)^2 + (0.04 / 0.02)^2 + (0.04 / 0.02)^2 = 4 + 4 + 4
  EXPECT_NEAR(structure_loss(s, t), 12.0, 1e-9);
}

TEST(TargetShares, SumToOne) {
  const CalibrationTarget t;
  EXPECT_NEAR(std::accumulate(t.type_share.begin(), t.type_share.end(), 0.0), 1.0, 1e-12);
}

TEST(SharedProbabilities, KeepHotelToHotelClosed) {
  GoalGenConfig c;
  set_shared_probabilities(c, 0.6, 0.3);
  for (double p : c.p_domain) EXPECT_DOUBLE_EQ(p, 0.6);
  EXPECT_DOUBLE_EQ(c.cross(Domain::Hotel, Domain::Hotel), 0.0);
  EXPECT_DOUBLE_EQ(c.cross(Domain::Attraction, Domain::Hotel), 0.3);
  c.validate();
}

TEST(Sample, DeterministicAndValid) {
  const GoalSample a = sample_goals({}, calibration_db(), 300, 5);
  const GoalSample b = sample_goals({}, calibration_db(), 300, 5);
  EXPECT_EQ(a.mean_subgoals, b.mean_subgoals);
  EXPECT_EQ(a.mean_tuples, b.mean_tuples);
  EXPECT_EQ(a.invalid, 0);
  EXPECT_NEAR(std::accumulate(a.type_share.begin(), a.type_share.end(), 0.0), 1.0, 1e-12);
}

TEST(Sample, MoreDomainsMeanMoreSubgoals) {
  GoalGenConfig lo, hi;
  set_shared_probabilities(lo, 0.3, 0.1);
  set_shared_probabilities(hi, 0.9, 0.9);
  EXPECT_LT(sample_goals(lo, calibration_db(), 300, 1).mean_subgoals,
            sample_goals(hi, calibration_db(), 300, 1).mean_subgoals);
}

TEST(Calibrate, PicksTheBestGridPoints) {
  CalibrationOptions opt;
  opt.coarse_goals = 4;
  opt.fine_goals = 8;
  opt.tuple_goals = 8;
  const CalibrationResult r = calibrate({}, calibration_db(), {}, opt);
  EXPECT_EQ(r.coarse.size(), 7u * 10u * 10u);
  EXPECT_FALSE(r.fine.empty());
  const auto by_loss = [](const GridPoint& a, const GridPoint& b) { return a.loss < b.loss; };
  const GridPoint fine_best = *std::min_element(r.fine.begin(), r.fine.end(), by_loss);
  EXPECT_EQ(r.best_point.p_domain, fine_best.p_domain);
  EXPECT_EQ(r.best_point.p_cross, fine_best.p_cross);
  EXPECT_EQ(r.best_point.p_taxi, fine_best.p_taxi);
  for (const auto& p : r.tuples) {
    EXPECT_GE(std::abs(p.sample.mean_tuples - 14.8), std::abs(r.best_point.sample.mean_tuples - 14.8));
  }
  EXPECT_DOUBLE_EQ(r.best.p_request, r.best_point.p_request);
  EXPECT_TRUE(r.to_json().contains("best"));
}

}  // namespace
}  // namespace xdial::goal
