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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xdial/goal.hpp"

namespace xdial::user {

/// One row of the user state: the goal tuple plus what the conversation
/// has revealed about it.
struct TupleState {
  goal::SemanticTuple tuple;
  /// Value learned from the system. For a blank, the requested value; for a
  /// cross-ref, the entity that finally fills the slot.
  std::optional<std::string> fill;
  /// Name of the referent entity once its sub-goal has one (cross-refs only).
  std::optional<std::string> anchor;

  bool operator==(const TupleState&) const = default;
};

struct GoalChange {
  int turn = 0;
  goal::SemanticTuple before;
  /// nullopt when the constraint was dropped.
  std::optional<goal::SemanticTuple> after;

  bool operator==(const GoalChange&) const = default;
};

struct UserState {
  std::vector<TupleState> tuples;
  bool goal_changed = false;
  std::vector<GoalChange> change_log;
  int turn = 0;
  /// System acts ignored because their domain is absent from the goal.
  int ignored_acts = 0;

  bool operator==(const UserState&) const = default;
};

/// {"tuples": [[id, domain, slot, value, expressed, fill, anchor], ...],
///  "goal_changed", "change_log": [{"turn", "before", "after"}], "turn", "ignored_acts"}
nlohmann::json to_json(const UserState& s);
UserState user_state_from_json(const nlohmann::json& j);

}  // namespace xdial::user
