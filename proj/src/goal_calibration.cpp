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

#include "xdial/goal_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xdial/rng.hpp"

namespace xdial::goal {

using nlohmann::json;

GoalSample sample_goals(const GoalGenConfig& cfg, const db::Database& db, int n, std::uint64_t seed) {
  GoalSample s;
  GoalGenConfig c = cfg;
  long subgoals = 0, tuples = 0;
  std::array<long, 5> types{};
  for (int i = 0; i < n; ++i) {
    c.seed = Rng::derive(seed, static_cast<std::uint64_t>(i));
    const UserGoal g = generate_goal(c, db);
    subgoals += static_cast<long>(subgoal_ids(g.tuples).size());
    tuples += static_cast<long>(g.tuples.size());
    ++types[static_cast<std::size_t>(g.type)];
    if (!validate_goal(g.tuples, cfg.max_subgoals).empty()) ++s.invalid;
  }
  s.n = n;
  if (n > 0) {
    s.mean_subgoals = static_cast<double>(subgoals) / n;
    s.mean_tuples = static_cast<double>(tuples) / n;
    for (std::size_t t = 0; t < types.size(); ++t) s.type_share[t] = static_cast<double>(types[t]) / n;
  }
  return s;
}

double structure_loss(const GoalSample& s, const CalibrationTarget& t) {
  const double z = (s.mean_subgoals - t.mean_subgoals) / t.subgoal_scale;
  double loss = z * z;
  for (std::size_t i = 0; i < s.type_share.size(); ++i) {
    const double e = (s.type_share[i] - t.type_share[i]) / t.share_scale;
    loss += e * e;
  }
  return loss;
}

void set_shared_probabilities(GoalGenConfig& cfg, double p_domain, double p_cross) {
  cfg.p_domain.fill(p_domain);
  for (auto& row : cfg.p_cross) row.fill(p_cross);
  cfg.p_cross[2][2] = 0.0;
}

namespace {

std::vector<double> steps(double lo, double hi, double step) {
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(std::round((lo + i * step) * 1e6) / 1e6);
  return out;
}

std::vector<double> around(double center, double half, double step, double lo, double hi) {
  std::vector<double> out;
  for (double v : steps(center - half, center + half, step)) {
    if (v >= lo - 1e-12 && v <= hi + 1e-12) out.push_back(v);
  }
  return out;
}

json point_json(const GridPoint& p) {
  return {{"p_domain", p.p_domain},
          {"p_cross", p.p_cross},
          {"p_taxi", p.p_taxi},
          {"p_request", p.p_request},
          {"mean_subgoals", p.sample.mean_subgoals},
          {"mean_tuples", p.sample.mean_tuples},
          {"type_share", p.sample.type_share},
          {"loss", p.loss}};
}

}  // namespace

json CalibrationResult::to_json() const {
  auto list = [](const std::vector<GridPoint>& v) {
    json a = json::array();
    for (const auto& p : v) a.push_back(point_json(p));
    return a;
  };
  return {{"best", point_json(best_point)}, {"coarse", list(coarse)}, {"fine", list(fine)},
          {"tuples", list(tuples)}};
}

CalibrationResult calibrate(const GoalGenConfig& base, const db::Database& db,
                            const CalibrationTarget& target, const CalibrationOptions& opt) {
  CalibrationResult out;
  auto evaluate = [&](double pd, double pc, double pt, double pr, int n) {
    GridPoint p{pd, pc, pt, pr, {}, 0};
    GoalGenConfig c = base;
    set_shared_probabilities(c, pd, pc);
    c.p_taxi = pt;
    c.p_metro.reset();
    c.p_request = pr;
    p.sample = sample_goals(c, db, n, opt.seed);
    p.loss = structure_loss(p.sample, target);
    return p;
  };
  auto best_of = [](const std::vector<GridPoint>& v) {
    return *std::min_element(v.begin(), v.end(),
                             [](const GridPoint& a, const GridPoint& b) { return a.loss < b.loss; });
  };

  for (double pd : steps(0.3, 0.9, 0.1)) {
    for (double pc : steps(0.1, 1.0, 0.1)) {
      for (double pt : steps(0.05, 0.5, 0.05)) {
        out.coarse.push_back(evaluate(pd, pc, pt, base.p_request, opt.coarse_goals));
      }
    }
  }
  const GridPoint c = best_of(out.coarse);
  for (double pd : around(c.p_domain, 0.05, 0.025, 0.0, 1.0)) {
    for (double pc : around(c.p_cross, 0.05, 0.025, 0.0, 1.0)) {
      for (double pt : around(c.p_taxi, 0.05, 0.025, 0.0, 1.0)) {
        out.fine.push_back(evaluate(pd, pc, pt, base.p_request, opt.fine_goals));
      }
    }
  }
  const GridPoint f = best_of(out.fine);
  double best_err = std::numeric_limits<double>::infinity();
  for (double pr : steps(0.05, 0.6, 0.01)) {
    GridPoint p = evaluate(f.p_domain, f.p_cross, f.p_taxi, pr, opt.tuple_goals);
    const double err = std::abs(p.sample.mean_tuples - target.mean_tuples);
    if (err < best_err) {
      best_err = err;
      out.best_point = p;
    }
    out.tuples.push_back(std::move(p));
  }
  out.best = base;
  set_shared_probabilities(out.best, out.best_point.p_domain, out.best_point.p_cross);
  out.best.p_taxi = out.best_point.p_taxi;
  out.best.p_metro.reset();
  out.best.p_request = out.best_point.p_request;
  return out;
}

}  // namespace xdial::goal
