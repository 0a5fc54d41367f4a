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

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "xdial/goal.hpp"
#include "xdial/venue_db.hpp"

namespace xdial::goal {

/// Seed of the synthetic database the goal defaults were calibrated on.
inline constexpr std::uint64_t kCalibrationDbSeed = 1;

struct GoalSample {
  int n = 0;
  double mean_subgoals = 0;
  double mean_tuples = 0;
  /// Share of each goal type, in kAllGoalTypes order.
  std::array<double, 5> type_share{};
  /// Goals whose structure check failed.
  int invalid = 0;
};

/// Statistics of n goals drawn with seeds derived from `seed`.
GoalSample sample_goals(const GoalGenConfig& cfg, const db::Database& db, int n, std::uint64_t seed);

struct CalibrationTarget {
  double mean_subgoals = 3.24;
  double mean_tuples = 14.8;
  /// Released training split: 417, 1573, 691, 1759 and 572 of 5,012.
  std::array<double, 5> type_share = {417.0 / 5012, 1573.0 / 5012, 691.0 / 5012, 1759.0 / 5012,
                                      572.0 / 5012};
  /// Scales of the sub-goal and type-share terms of the loss.
  double subgoal_scale = 0.05;
  double share_scale = 0.02;
};

struct CalibrationOptions {
  int coarse_goals = 500;
  int fine_goals = 5000;
  int tuple_goals = 5000;
  std::uint64_t seed = 17;
};

struct GridPoint {
  double p_domain = 0;
  double p_cross = 0;
  double p_taxi = 0;
  double p_request = 0;
  GoalSample sample;
  double loss = 0;
};

struct CalibrationResult {
  GoalGenConfig best;
  GridPoint best_point;
  std::vector<GridPoint> coarse;
  std::vector<GridPoint> fine;
  std::vector<GridPoint> tuples;

  nlohmann::json to_json() const;
};

/// Loss of a sample: squared scaled errors of the mean sub-goal count and of
/// each type share.
double structure_loss(const GoalSample& s, const CalibrationTarget& t);

/// Three searches. A coarse grid over (P, p_cross, p_taxi) with P and
/// p_cross shared by every domain pair, then a finer grid around the best
/// coarse point, both scored by structure_loss. Last, a line search over
/// p_request for the mean tuple count at the chosen structure.
CalibrationResult calibrate(const GoalGenConfig& base, const db::Database& db,
                            const CalibrationTarget& target = {}, const CalibrationOptions& opt = {});

/// Sets P on every venue domain and p_cross on every pair but hotel->hotel.
void set_shared_probabilities(GoalGenConfig& cfg, double p_domain, double p_cross);

}  // namespace xdial::goal
