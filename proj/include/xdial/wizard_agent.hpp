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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xdial/dialogue_act.hpp"
#include "xdial/rng.hpp"
#include "xdial/user_state.hpp"
#include "xdial/venue_db.hpp"

namespace xdial::wizard {

using Query = std::vector<db::Constraint>;

struct Booking {
  std::string car_type;
  std::string plate;

  bool operator==(const Booking&) const = default;
};

struct SystemState {
  /// Per domain: [0] holds every constraint the user has given so far; later
  /// entries are this turn's relaxation attempts.
  std::map<Domain, std::vector<Query>> queries;
  std::map<Domain, db::EntityId> selected;
  /// Entity whose name was last told to the user, per domain.
  std::map<Domain, db::EntityId> announced;
  /// Slots requested in the current turn, in order.
  std::vector<std::pair<Domain, std::string>> requested;
  /// Select acts of the current turn whose source domain had no selection.
  std::vector<std::pair<Domain, Domain>> unresolved;
  /// Domains mentioned in the current turn, in order of first mention.
  std::vector<Domain> touched;
  /// Taxi bookings keyed by "from|to".
  std::map<std::string, Booking> bookings;
  int turn = 0;

  /// queries[d][0], or an empty query.
  const Query& first(Domain d) const;

  bool operator==(const SystemState&) const = default;
};

/// Applies one turn of user acts. Informs are applied before Selects so the
/// order of acts within a turn does not matter.
void rule_dst_update(SystemState& state, const ActList& user_acts);

struct SearchResult {
  std::vector<const db::Entity*> results;
  /// Slots of the first query that the final query changed or dropped.
  std::vector<std::string> relaxed;
};

/// Runs queries[d][0], then relaxes one constraint at a time until something
/// matches. Services go first, then numeric thresholds one grid step at a
/// time, then list containment, then other values. Names and nearby-of are
/// never relaxed. Each attempt is appended to queries[d].
SearchResult search_with_relaxation(SystemState& state, const db::Database& db, Domain d);

enum class Mode { Rule, Oracle };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);

struct SystemTurnOutput {
  ActList acts;
  /// Where each act's value comes from: an entity id, "booking", "station" or "none".
  std::vector<std::string> sources;
  std::vector<db::EntityId> retrieved;
  bool relaxed = false;
};

class Wizard {
 public:
  Wizard(const db::Database& db, Mode mode, std::uint64_t seed);

  /// Updates the state from the user acts and answers them. The oracle mode
  /// also reads the user's state to search with the whole sub-goal.
  SystemTurnOutput respond(const ActList& user_acts, const user::UserState* user_view = nullptr);

  const SystemState& state() const { return state_; }
  Mode mode() const { return mode_; }

 private:
  void answer_venue(Domain d, bool changed, SystemTurnOutput& out, const user::UserState* view);
  void answer_traffic(Domain d, SystemTurnOutput& out);
  std::vector<db::EntityId> oracle_pick(Domain d, const user::UserState& view);
  const Booking& booking(const std::string& from, const std::string& to);

  const db::Database& db_;
  Mode mode_;
  Rng rng_;
  SystemState state_;
  /// Oracle only: entity chosen for each user sub-goal.
  std::map<int, db::EntityId> chosen_;
};

/// Value of an act given its recorded source; used to re-lexicalize logged acts.
std::string source_value(const db::Database& db, const SystemState& state, const DialogueAct& act,
                         const std::string& source);

nlohmann::json to_json(const db::Constraint& c);
db::Constraint constraint_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SystemState& s);
SystemState system_state_from_json(const nlohmann::json& j);

}  // namespace xdial::wizard
