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
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "xdial/schema.hpp"
#include "xdial/venue_db.hpp"

namespace xdial::goal {

enum class Relation { Nearby, AtEntity };

/// Value of a requestable slot before it is filled.
struct Blank {
  bool operator==(const Blank&) const = default;
};

/// Value that refers to the entity found for another sub-goal.
struct CrossRef {
  int target = 0;
  Relation relation = Relation::Nearby;

  bool operator==(const CrossRef&) const = default;
};

using TupleValue = std::variant<std::string, Blank, CrossRef>;

struct SemanticTuple {
  int subgoal = 0;
  Domain domain = Domain::Attraction;
  std::string slot;
  TupleValue value;
  bool expressed = false;

  bool is_blank() const { return std::holds_alternative<Blank>(value); }
  bool is_cross_ref() const { return std::holds_alternative<CrossRef>(value); }
  bool is_concrete() const { return std::holds_alternative<std::string>(value); }
  /// Concrete or cross-ref.
  bool is_informable() const { return !is_blank(); }

  bool operator==(const SemanticTuple&) const = default;
};

using TupleList = std::vector<SemanticTuple>;

enum class GoalType { S, M, MT, CM, CMT };

inline constexpr std::array<GoalType, 5> kAllGoalTypes = {
    GoalType::S, GoalType::M, GoalType::MT, GoalType::CM, GoalType::CMT};

/// "S", "M", "M+T", "CM", "CM+T"
std::string_view to_string(GoalType t);
GoalType goal_type_from_string(std::string_view s);

struct UserGoal {
  TupleList tuples;
  std::string description;
  GoalType type = GoalType::S;

  bool operator==(const UserGoal&) const = default;
};

struct GoalGenConfig {
  // Defaults found by calibrate() on the seed-1 database; see
  // goal_calibration.hpp.
  /// Probability of an independent sub-goal, per venue domain.
  std::array<double, 3> p_domain = {0.775, 0.775, 0.775};
  /// p_cross[source][target]; hotel->hotel must stay 0.
  std::array<std::array<double, 3>, 3> p_cross = {{{0.2, 0.2, 0.2},
                                                   {0.2, 0.2, 0.2},
                                                   {0.2, 0.2, 0.0}}};
  double p_taxi = 0.175;
  /// Defaults to p_taxi.
  std::optional<double> p_metro;
  int max_subgoals = 5;
  std::uint64_t seed = 0;

  // Calibration constants for tuple sampling.
  /// Weights for 0..3 common informables of an independent sub-goal.
  std::array<double, 4> n_informable = {0.1, 0.45, 0.35, 0.1};
  /// Weights for 0..2 common informables of a nearby sub-goal.
  std::array<double, 3> n_cross_informable = {0.35, 0.5, 0.15};
  /// Chance that an independent sub-goal is pinned by name.
  double p_name_informable = 0.1;
  /// Inclusion chance of each ordinary requestable slot.
  double p_request = 0.27;
  /// Inclusion chance of each "nearby X" requestable slot.
  double p_nearby_request = 0.45;
  int retry_budget = 100;

  double metro() const { return p_metro.value_or(p_taxi); }
  double cross(Domain source, Domain target) const;
  /// Throws std::invalid_argument.
  void validate() const;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic in (cfg, db). Throws GenerationError when a sub-goal stays
/// unsatisfiable after the retry budget.
UserGoal generate_goal(const GoalGenConfig& cfg, const db::Database& db);

/// Topological order with each referrer pulled as close after its referent
/// as possible; independent sub-goals keep their relative order. Sub-goal
/// ids are renumbered 1..n in the new order.
TupleList reorder_subgoals(TupleList tuples);

GoalType classify_goal_type(std::span<const SemanticTuple> tuples);

/// Sub-goal ids in first-appearance order.
std::vector<int> subgoal_ids(std::span<const SemanticTuple> tuples);
std::optional<Domain> subgoal_domain(std::span<const SemanticTuple> tuples, int id);

/// Structural problems of a goal; empty when valid.
std::vector<std::string> validate_goal(std::span<const SemanticTuple> tuples,
                                       int max_subgoals = 5);

// ---------------------------------------------------------------------------
// Descriptions

/// Description phrases keyed "intro.<Domain>", "inform.<Domain>.<slot>",
/// "inform.<Domain>.@<kind>", "inform.*.<slot>", "inform.*.@<kind>",
/// "near", "from", "to", "request", "request.<Domain>", "step".
class DescriptionTemplates {
 public:
  DescriptionTemplates() = default;
  explicit DescriptionTemplates(std::map<std::string, std::string, std::less<>> phrases)
      : phrases_(std::move(phrases)) {}

  static DescriptionTemplates from_json(const nlohmann::json& j);
  /// The bundled English set.
  static const DescriptionTemplates& english();

  /// First present key; throws MissingTemplate naming the first key.
  const std::string& get(std::initializer_list<std::string> keys) const;

 private:
  std::map<std::string, std::string, std::less<>> phrases_;
};

class MissingTemplate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string render_description(std::span<const SemanticTuple> tuples,
                               const DescriptionTemplates& templates);

// ---------------------------------------------------------------------------
// Serialization

/// [subgoal_id, domain, slot, value, expressed]; value is a string, null
/// for blank, {"near": k} or {"at": k}.
nlohmann::json to_json(const SemanticTuple& t);
SemanticTuple tuple_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TupleList& tuples);
TupleList tuples_from_json(const nlohmann::json& j);
nlohmann::json to_json(const UserGoal& g);
UserGoal goal_from_json(const nlohmann::json& j);

// Helpers shared with the agents.

/// Constraint a concrete informable tuple imposes on the database.
db::Constraint tuple_constraint(const SemanticTuple& t);

}  // namespace xdial::goal
