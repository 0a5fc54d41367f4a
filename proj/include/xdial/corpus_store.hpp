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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xdial/dialogue_act.hpp"
#include "xdial/goal.hpp"
#include "xdial/user_state.hpp"
#include "xdial/wizard_agent.hpp"

namespace xdial::corpus {

inline constexpr int kSchemaVersion = 1;

enum class Speaker { User, System };

std::string_view to_string(Speaker s);
Speaker speaker_from_string(std::string_view s);

struct Turn {
  Speaker role = Speaker::User;
  /// Empty for dialogue-act level simulation.
  std::string utterance;
  ActList acts;
  /// User turns: the state after the user spoke.
  std::optional<user::UserState> user_state;
  /// System turns: the state after the system spoke, with every query.
  std::optional<wizard::SystemState> sys_state;
  /// System turns: source of each act's value (see wizard::source_value).
  std::vector<std::string> sources;
  /// User turns: indices of the tuples the user chose to express.
  std::vector<std::size_t> selected;
  /// System turns: number of queries recorded this turn.
  int n_queries = 0;
  /// Fields with no canonical home, kept verbatim.
  nlohmann::json metadata = nlohmann::json::object();

  bool operator==(const Turn&) const = default;
};

enum class Source { Simulated, Human, Imported };

std::string_view to_string(Source s);
Source source_from_string(std::string_view s);

struct RecordMeta {
  Source source = Source::Simulated;
  std::optional<std::uint64_t> seed;
  std::string config_hash;
  std::string split;
  /// Session outcome for simulated and human dialogues.
  std::optional<bool> finished;
  std::string failure;
  /// Set by importers when the dialogue's goal changed; simulated records
  /// carry it in their user states instead.
  bool goal_changed = false;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const RecordMeta&) const = default;
};

struct DialogueRecord {
  std::string id;
  goal::UserGoal goal;
  std::vector<Turn> turns;
  RecordMeta meta;

  goal::GoalType goal_type() const { return goal.type; }
  bool operator==(const DialogueRecord&) const = default;
};

/// Malformed input; the message names the location.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Turns alternate user/system starting with the user and carry the state of
/// their role. Returns one message per violation.
std::vector<std::string> validate_record(const DialogueRecord& r);

nlohmann::json to_json(const Turn& t);
Turn turn_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DialogueRecord& r);
DialogueRecord record_from_json(const nlohmann::json& j);

/// {"schema_version": 1, "dialogues": [...]}.
nlohmann::json export_corpus(const std::vector<DialogueRecord>& records);
std::vector<DialogueRecord> import_corpus(const nlohmann::json& j);
/// Canonical text form: two-space indented JSON with a trailing newline.
std::string dump(const nlohmann::json& j);
/// Parses text; parse failures become FormatError with the byte position.
nlohmann::json parse(std::string_view text);
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// ---------------------------------------------------------------------------
// Released corpus adapter

/// Vocabulary mapping for the released corpus: its domain, slot and goal-type
/// labels onto ours.
struct ReleaseMapping {
  std::map<std::string, Domain> domains;
  std::map<std::string, std::string> slots;
  std::map<std::string, goal::GoalType> goal_types;
  /// Prefix of hotel service slots, e.g. "<facility>-".
  std::string service_prefix;

  static const ReleaseMapping& bundled();
};

/// Imports the released training/validation/test JSON: an object keyed by
/// dialogue id. Unknown fields go to metadata; nothing is dropped.
std::vector<DialogueRecord> import_release(const nlohmann::json& j, const std::string& split = "",
                                           const ReleaseMapping& mapping = ReleaseMapping::bundled());

// ---------------------------------------------------------------------------
// Statistics

/// Whether the user's goal changed during the dialogue.
bool goal_changed(const DialogueRecord& r);
/// Whether any turn carries a NoOffer act.
bool has_no_offer(const DialogueRecord& r);

struct TypeStats {
  int n_dialogues = 0;
  double no_offer_rate = 0;
  double multi_query_rate = 0;
  double goal_change_rate = 0;
  double avg_acts_per_turn = 0;
  double avg_turns = 0;
  double avg_subgoals = 0;
  double avg_tuples = 0;
  double avg_tokens_per_turn = 0;

  bool operator==(const TypeStats&) const = default;
};

struct CorpusStats {
  std::string tokenizer;
  int n_dialogues = 0;
  long n_turns = 0;
  long n_tokens = 0;
  long vocab_size = 0;
  /// Counts and rates over the whole corpus.
  TypeStats all;
  std::map<goal::GoalType, TypeStats> by_type;
  /// turns per dialogue -> number of dialogues.
  std::map<int, int> turn_histogram;
  std::map<goal::GoalType, std::map<int, int>> turn_histogram_by_type;

  bool operator==(const CorpusStats&) const = default;
};

/// Throws std::invalid_argument on an empty corpus.
CorpusStats compute_stats(const std::vector<DialogueRecord>& records);
nlohmann::json to_json(const CorpusStats& s);
/// "turns,all,S,M,M+T,CM,CM+T" rows for every observed length.
std::string histogram_csv(const CorpusStats& s);

/// Partitions by goal type; every type is present, possibly empty.
std::map<goal::GoalType, std::vector<const DialogueRecord*>> bucket_by_goal_type(
    const std::vector<DialogueRecord>& records);

}  // namespace xdial::corpus
