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
#include <optional>
#include <string>
#include <vector>

#include "xdial/dialogue_act.hpp"
#include "xdial/goal.hpp"
#include "xdial/rng.hpp"
#include "xdial/user_state.hpp"
#include "xdial/venue_db.hpp"

namespace xdial::user {

struct UserPolicy {
  /// Weights for expressing 1, 2 or 3 tuples in one turn.
  std::array<double, 3> n_tuples = {0.3, 0.45, 0.25};
};

struct UserTurnOutput {
  ActList acts;
  bool terminated = false;
  /// Indices into the state tuples that produced `acts`.
  std::vector<std::size_t> selected;
};

UserState init_state(const goal::UserGoal& goal);

/// Every blank holds a value and every cross-ref is filled by a real entity.
bool is_terminated(const UserState& state);

/// A blank without its value, or an informable that is unexpressed or (for a
/// cross-ref) not yet filled.
bool is_pending(const TupleState& t);

/// First sub-goal, in order, with a pending tuple.
std::optional<int> active_subgoal(const UserState& state);

/// Entity name the sub-goal has settled on: a pinned name or a learned one.
std::optional<std::string> subgoal_name(const UserState& state, int subgoal);

/// Applies system acts: fills blanks, binds names and cross-refs, and
/// compromises on NoOffer or on an offered value that breaks a constraint.
void receive(UserState& state, const ActList& system_acts, const db::Database& db);

/// Picks the tuples to express next and marks them expressed. Returns the
/// closing acts with terminated=true once is_terminated holds.
UserTurnOutput respond(UserState& state, Rng& rng, const UserPolicy& policy = {});

/// Relaxes one constraint of `subgoal` in the fixed compromise order.
/// Returns false when nothing can be relaxed.
bool compromise(UserState& state, int subgoal, const db::Database& db);

}  // namespace xdial::user
