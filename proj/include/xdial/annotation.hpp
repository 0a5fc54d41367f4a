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

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xdial/dialogue_act.hpp"
#include "xdial/user_state.hpp"
#include "xdial/venue_db.hpp"

namespace xdial::annotation {

// ---------------------------------------------------------------------------
// User side

/// Concrete tuple -> Inform, blank -> Request, nearby cross-ref -> Select,
/// resolved endpoint cross-ref -> Inform with the referent name.
/// Endpoint refs without an anchor yield no act. `selected` indexes `state`,
/// which also supplies the referent domains.
ActList derive_user_das(std::span<const user::TupleState> state,
                        std::span<const std::size_t> selected);

/// Indices of `state` tuples whose acts, in order, reproduce `acts`;
/// candidates are limited to `subgoal`. nullopt when no selection fits.
std::optional<std::vector<std::size_t>> recover_selection(const ActList& acts,
                                                          std::span<const user::TupleState> state,
                                                          int subgoal);

// ---------------------------------------------------------------------------
// Keyword matching

struct Lexicon {
  std::map<std::string, std::vector<std::string>> general;
  std::vector<std::string> no_offer;
  std::map<Domain, std::vector<std::string>> domains;
  std::vector<std::string> select;
  std::map<std::string, std::vector<std::string>> slots;
  std::map<std::string, std::vector<std::string>> endpoints;

  static Lexicon from_json(const nlohmann::json& j);
  /// The bundled English lexicon.
  static const Lexicon& english();
};

struct Mention {
  Domain domain = Domain::Attraction;
  std::string slot;
  std::string value;
};

struct MentionContext {
  /// Entities whose values the utterance may contain.
  std::vector<const db::Entity*> entities;
  /// Values with no stored entity (taxi bookings, metro stations).
  std::vector<Mention> extra;
  /// Domain used when no domain keyword occurs.
  std::optional<Domain> domain;
};

/// System utterance -> acts, by longest-first value matching against the
/// context entities; each span is consumed once.
ActList derive_system_das(std::string_view utterance, const db::Database& db,
                          const MentionContext& ctx, const Lexicon& lexicon);

/// User utterance -> acts. Clauses ending in a request cue carry Requests;
/// values are recognised from the database vocabulary.
ActList derive_user_das_from_text(std::string_view utterance, const db::Database& db,
                                  std::optional<Domain> current, const Lexicon& lexicon);

// ---------------------------------------------------------------------------
// Agreement metrics

struct ActCounts {
  std::size_t matched = 0;
  std::size_t gold = 0;
  std::size_t predicted = 0;

  ActCounts& operator+=(const ActCounts& o);
  double precision() const;
  double recall() const;
  /// 1.0 when both sides are empty.
  double f1() const;
};

/// Multiset overlap of one turn; restricted to `intent` when given.
ActCounts count_acts(const ActList& gold, const ActList& pred,
                     std::optional<Intent> intent = std::nullopt);

double da_f1(const ActList& gold, const ActList& pred);
/// Micro F1 over aligned turns. Throws std::invalid_argument on a length mismatch.
double da_f1(std::span<const ActList> gold, std::span<const ActList> pred);

/// Fraction of turns whose states compare equal. Throws on a length mismatch.
template <class State>
double joint_state_accuracy(std::span<const State> gold, std::span<const State> pred) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument("joint_state_accuracy: " + std::to_string(gold.size()) +
                                " gold turns vs " + std::to_string(pred.size()));
  }
  if (gold.empty()) return 1.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hit += gold[i] == pred[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(gold.size());
}

struct AgreementReport {
  double da_f1 = 1.0;
  double state_accuracy = 1.0;
  std::map<Intent, double> per_intent_f1;
  std::size_t turns = 0;

  nlohmann::json to_json() const;
};

AgreementReport agreement(std::span<const ActList> gold_acts, std::span<const ActList> pred_acts,
                          std::span<const nlohmann::json> gold_states,
                          std::span<const nlohmann::json> pred_states);

}  // namespace xdial::annotation
