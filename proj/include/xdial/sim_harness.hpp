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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xdial/annotation.hpp"
#include "xdial/corpus_store.hpp"
#include "xdial/goal.hpp"
#include "xdial/template_nlg.hpp"
#include "xdial/user_simulator.hpp"
#include "xdial/venue_db.hpp"
#include "xdial/wizard_agent.hpp"

namespace xdial::sim {

enum class Level { DialogueAct, NaturalLanguage };

std::string_view to_string(Level l);
Level level_from_string(std::string_view s);

enum class Failure { None, MaxTurns, PolicyError, NlgMiss };

std::string_view to_string(Failure f);

struct SimConfig {
  Level level = Level::DialogueAct;
  /// Cap on utterances, user and system together.
  int max_turns = 40;
  /// Sessions per goal type.
  int n_runs = 1000;
  goal::GoalGenConfig goals;
  user::UserPolicy policy;
  wizard::Mode mode = wizard::Mode::Rule;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument: max_turns < 2, or oracle wizard at the
  /// natural-language level.
  void validate() const;
  nlohmann::json to_json() const;
  /// FNV-1a of the canonical JSON, as 16 hex digits.
  std::string hash() const;
};

/// One closed-loop session. The record's metadata carries finished/failure;
/// NL-level turns keep what the other side understood under
/// metadata["understood"].
corpus::DialogueRecord run_session(const SimConfig& cfg, const db::Database& db,
                                   const goal::UserGoal& goal, std::uint64_t seed,
                                   std::string id = "session");

/// Draws default-config goals until one has the wanted type. Throws
/// goal::GenerationError after `max_attempts` draws.
goal::UserGoal sample_goal_of_type(const goal::GoalGenConfig& cfg, const db::Database& db,
                                   goal::GoalType type, std::uint64_t seed, int max_attempts = 100000);

struct TypeResult {
  int runs = 0;
  int finished = 0;
  std::map<std::string, int> failures;

  double rate() const { return runs == 0 ? 0.0 : static_cast<double>(finished) / runs; }
  bool operator==(const TypeResult&) const = default;
};

struct SimResult {
  SimConfig config;
  std::map<goal::GoalType, TypeResult> by_type;
  std::vector<corpus::DialogueRecord> records;

  /// Summary without the dialogues.
  nlohmann::json summary() const;
  /// Summary plus the corpus export.
  nlohmann::json to_json() const;
};

/// Runs cfg.n_runs sessions for each goal type in `types` with fresh goals.
/// Throws std::invalid_argument when n_runs < 1.
SimResult finish_rate(const SimConfig& cfg, const db::Database& db,
                      std::span<const goal::GoalType> types = goal::kAllGoalTypes);

// ---------------------------------------------------------------------------
// Re-annotation

struct Consistency {
  annotation::ActCounts user;
  annotation::ActCounts system;
  std::vector<std::string> mismatches;

  double user_f1() const { return user.f1(); }
  double system_f1() const { return system.f1(); }
  bool ok() const { return mismatches.empty(); }
};

/// A turn's acts derived again from what was logged with it. User turns come
/// from the user state and the selected tuples. System turns with sources
/// have each value looked up again in the database and the system state;
/// system turns without them are read from their text with keyword matching.
/// Throws std::invalid_argument when the turn carries neither.
ActList annotate_turn(const corpus::Turn& t, const db::Database& db);

/// Replaces every turn's acts with annotate_turn, leaving turns it cannot
/// read unchanged. Returns the number of turns whose acts changed.
int annotate(corpus::DialogueRecord& r, const db::Database& db);

/// Re-derives every turn's acts from its logged state: user turns from the
/// user state and the selected tuples, system turns by looking each value up
/// again in the database and the system state.
Consistency reannotate(const corpus::DialogueRecord& r, const db::Database& db);

/// The first query of every system turn rebuilt from the cumulative user
/// Inform/Select acts, independently of the wizard's tracker. Entry i belongs
/// to the i-th system turn.
std::vector<std::map<Domain, wizard::Query>> reconstruct_first_queries(
    const corpus::DialogueRecord& r, const db::Database& db);

}  // namespace xdial::sim
