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

// Live sessions where a human plays one side and the rule agent the other.
//
// Every request and response body is a JSON object carrying
// "api_version": 1.
//
//   open   {"role": "user"|"wizard", "goal"?: UserGoal, "goal_type"?: "CM",
//           "seed"?: 7, "max_turns"?: 40}
//   turn   human-as-user:   {"role": "user", "selected"?: [indices],
//                            "tuples"?: [[subgoal, domain, slot, value?]]}
//          human-as-wizard: {"role": "wizard", "queries"?: {"Hotel": [[c...]]},
//                            "selected"?: {"Hotel": "hotel#3"}, "acts": [...]}
//          either may carry "turn": the index the client expects to write.
//   state  see SessionManager::state.
//   export a corpus document holding the session's DialogueRecord.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "xdial/corpus_store.hpp"
#include "xdial/goal.hpp"
#include "xdial/user_simulator.hpp"
#include "xdial/venue_db.hpp"
#include "xdial/wizard_agent.hpp"

namespace xdial::api {

inline constexpr int kApiVersion = 1;

enum class Role { User, Wizard };

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);

/// An error with its HTTP status: 400 malformed, 404 unknown session,
/// 409 out of turn or finished.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

/// {"api_version": 1, "error": {"status": 404, "message": "..."}}
nlohmann::json error_body(const ApiError& e);

class Session;

class SessionManager {
 public:
  explicit SessionManager(const db::Database& db, goal::GoalGenConfig goals = {});
  ~SessionManager();

  /// Returns the state of the new session, including its "id".
  nlohmann::json open_session(const nlohmann::json& request);
  /// Applies the human's turn and the agent's reply. Returns
  /// {"api_version", "reply": turn or null, "state"}.
  nlohmann::json post_turn(const std::string& id, const nlohmann::json& request);
  /// What the human's role may see:
  ///   common: id, role, seed, finished, failure, turn (turns so far),
  ///           expecting ("user", "wizard" or null), transcript
  ///   user:   goal, user_state, selectable (tuple indices)
  ///   wizard: sys_state, results (per domain, per query: entity ids and names)
  nlohmann::json state(const std::string& id) const;
  /// export_corpus of the single record, finished or not.
  nlohmann::json export_session(const std::string& id) const;

  std::size_t size() const;

 private:
  Session& find(const std::string& id) const;

  const db::Database& db_;
  goal::GoalGenConfig goals_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::uint64_t next_ = 1;
};

}  // namespace xdial::api
