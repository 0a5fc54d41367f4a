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

#include "xdial/corpus_store.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "xdial/text.hpp"

namespace xdial::corpus {

using nlohmann::json;

namespace {

constexpr const char* kReleaseMapping =
#include "release_mapping.inc"
    ;

constexpr const char* kTokenizer = "whitespace for Latin text, one token per CJK character";

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw FormatError(where + ": " + what);
}

}  // namespace

std::string_view to_string(Speaker s) { return s == Speaker::User ? "usr" : "sys"; }

Speaker speaker_from_string(std::string_view s) {
  if (s == "usr" || s == "user") return Speaker::User;
  if (s == "sys" || s == "system") return Speaker::System;
  throw FormatError("unknown role '" + std::string(s) + "'");
}

std::string_view to_string(Source s) {
  switch (s) {
    case Source::Simulated: return "simulated";
    case Source::Human: return "human";
    case Source::Imported: return "imported";
  }
  return "?";
}

Source source_from_string(std::string_view s) {
  for (Source x : {Source::Simulated, Source::Human, Source::Imported}) {
    if (to_string(x) == s) return x;
  }
  throw FormatError("unknown record source '" + std::string(s) + "'");
}

std::vector<std::string> validate_record(const DialogueRecord& r) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < r.turns.size(); ++i) {
    const Turn& t = r.turns[i];
    const Speaker want = i % 2 == 0 ? Speaker::User : Speaker::System;
    const std::string where = r.id + " turn " + std::to_string(i);
    if (t.role != want) out.push_back(where + ": expected " + std::string(to_string(want)));
    if (t.role == Speaker::User && !t.user_state) out.push_back(where + ": user turn without user state");
    if (t.role == Speaker::System && !t.sys_state && r.meta.source != Source::Imported) {
      out.push_back(where + ": system turn without system state");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

json to_json(const Turn& t) {
  json j = {{"role", std::string(to_string(t.role))},
            {"utterance", t.utterance},
            {"acts", to_json(t.acts)},
            {"metadata", t.metadata}};
  if (t.user_state) j["user_state"] = user::to_json(*t.user_state);
  if (t.sys_state) j["sys_state"] = wizard::to_json(*t.sys_state);
  if (t.role == Speaker::System) {
    j["sources"] = t.sources;
    j["n_queries"] = t.n_queries;
  } else {
    j["selected"] = t.selected;
  }
  return j;
}

Turn turn_from_json(const json& j) {
  Turn t;
  t.role = speaker_from_string(j.at("role").get<std::string>());
  t.utterance = j.value("utterance", "");
  t.acts = acts_from_json(j.at("acts"));
  if (j.contains("user_state")) t.user_state = user::user_state_from_json(j["user_state"]);
  if (j.contains("sys_state")) t.sys_state = wizard::system_state_from_json(j["sys_state"]);
  if (j.contains("sources")) t.sources = j["sources"].get<std::vector<std::string>>();
  if (j.contains("selected")) t.selected = j["selected"].get<std::vector<std::size_t>>();
  t.n_queries = j.value("n_queries", 0);
  t.metadata = j.value("metadata", json::object());
  return t;
}

json to_json(const DialogueRecord& r) {
  json meta = {{"source", std::string(to_string(r.meta.source))},
               {"config_hash", r.meta.config_hash},
               {"split", r.meta.split},
               {"failure", r.meta.failure},
               {"goal_changed", r.meta.goal_changed},
               {"extra", r.meta.extra}};
  meta["seed"] = r.meta.seed ? json(*r.meta.seed) : json(nullptr);
  meta["finished"] = r.meta.finished ? json(*r.meta.finished) : json(nullptr);
  json turns = json::array();
  for (const auto& t : r.turns) turns.push_back(to_json(t));
  return {{"id", r.id}, {"goal", goal::to_json(r.goal)}, {"turns", std::move(turns)}, {"metadata", meta}};
}

DialogueRecord record_from_json(const json& j) {
  DialogueRecord r;
  r.id = j.at("id").get<std::string>();
  r.goal = goal::goal_from_json(j.at("goal"));
  for (const auto& t : j.at("turns")) r.turns.push_back(turn_from_json(t));
  const json meta = j.value("metadata", json::object());
  r.meta.source = source_from_string(meta.value("source", "simulated"));
  if (meta.contains("seed") && !meta["seed"].is_null()) r.meta.seed = meta["seed"].get<std::uint64_t>();
  r.meta.config_hash = meta.value("config_hash", "");
  r.meta.split = meta.value("split", "");
  if (meta.contains("finished") && !meta["finished"].is_null()) r.meta.finished = meta["finished"].get<bool>();
  r.meta.failure = meta.value("failure", "");
  r.meta.goal_changed = meta.value("goal_changed", false);
  r.meta.extra = meta.value("extra", json::object());
  return r;
}

json export_corpus(const std::vector<DialogueRecord>& records) {
  json list = json::array();
  for (const auto& r : records) list.push_back(to_json(r));
  return {{"schema_version", kSchemaVersion}, {"dialogues", std::move(list)}};
}

std::vector<DialogueRecord> import_corpus(const json& j) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw FormatError("corpus: missing schema_version");
  }
  const int version = j["schema_version"].get<int>();
  if (version != kSchemaVersion) {
    throw FormatError("corpus: unknown schema version " + std::to_string(version));
  }
  std::vector<DialogueRecord> out;
  const json& list = j.at("dialogues");
  for (std::size_t i = 0; i < list.size(); ++i) {
    try {
      out.push_back(record_from_json(list[i]));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      fail("dialogue " + std::to_string(i), e.what());
    }
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Released corpus adapter

const ReleaseMapping& ReleaseMapping::bundled() {
  static const ReleaseMapping m = [] {
    const json j = json::parse(kReleaseMapping);
    ReleaseMapping out;
    const json domains = j.at("domains");
    for (const auto& [k, v] : domains.items()) out.domains[k] = domain_from_string(v.get<std::string>());
    const json slots = j.at("slots");
    for (const auto& [k, v] : slots.items()) out.slots[k] = v.get<std::string>();
    const json types = j.at("goal_types");
    for (const auto& [k, v] : types.items()) out.goal_types[k] = goal::goal_type_from_string(v.get<std::string>());
    out.service_prefix = j.at("service_prefix").get<std::string>();
    return out;
  }();
  return m;
}

namespace {

class ReleaseReader {
 public:
  explicit ReleaseReader(const ReleaseMapping& m) : m_(m) {}

  Domain domain(const json& v, const std::string& where) const {
    const std::string s = v.get<std::string>();
    if (auto it = m_.domains.find(s); it != m_.domains.end()) return it->second;
    if (auto d = parse_domain(s)) return *d;
    fail(where, "unknown domain '" + s + "'");
  }

  std::string slot(const std::string& s) const {
    if (auto it = m_.slots.find(s); it != m_.slots.end()) return it->second;
    return s;
  }

  /// Act domains are free text in our schema; only venue and traffic names map.
  std::string act_domain(const std::string& s) const {
    if (auto it = m_.domains.find(s); it != m_.domains.end()) return std::string(to_string(it->second));
    return s;
  }

  static std::optional<int> reference(const std::string& value) {
    static const std::regex id_re(R"(id\s*=?\s*(\d+))");
    std::smatch m;
    if (std::regex_search(value, m, id_re)) return std::stoi(m[1].str());
    return std::nullopt;
  }

  goal::SemanticTuple tuple(const json& row, const std::string& where) const {
    if (!row.is_array() || row.size() < 4) fail(where, "goal row must be [id, domain, slot, value, ...]");
    goal::SemanticTuple t;
    t.subgoal = row[0].get<int>();
    t.domain = domain(row[1], where);
    t.slot = slot(row[2].get<std::string>());
    const std::string value = row[3].is_string() ? row[3].get<std::string>() : row[3].dump();
    if (value.empty()) {
      t.value = goal::Blank{};
    } else if (auto ref = reference(value)) {
      t.value = goal::CrossRef{*ref, is_traffic_domain(t.domain) ? goal::Relation::AtEntity
                                                                 : goal::Relation::Nearby};
    } else {
      t.value = value;
    }
    t.expressed = row.size() > 4 && row[4].is_boolean() && row[4].get<bool>();
    return t;
  }

  ActList acts(const json& list, const std::string& where) const {
    ActList out;
    for (const auto& a : list) {
      if (!a.is_array() || a.size() != 4) fail(where, "dialogue act must have four fields");
      DialogueAct act;
      act.intent = intent_from_string(a[0].get<std::string>());
      act.domain = act_domain(a[1].get<std::string>());
      act.slot = slot(a[2].get<std::string>());
      act.value = a[3].is_string() ? a[3].get<std::string>() : a[3].dump();
      out.push_back(std::move(act));
    }
    return out;
  }

  user::UserState user_state(const json& rows, const goal::TupleList& goal, const std::string& where) const {
    user::UserState s;
    for (const auto& row : rows) {
      goal::SemanticTuple t = tuple(row, where);
      const auto it = std::find_if(goal.begin(), goal.end(), [&](const goal::SemanticTuple& g) {
        return g.subgoal == t.subgoal && g.domain == t.domain && g.slot == t.slot;
      });
      user::TupleState ts;
      if (it != goal.end() && !it->is_concrete() && t.is_concrete()) {
        ts.fill = std::get<std::string>(t.value);
        const bool expressed = t.expressed;
        t = *it;
        t.expressed = expressed;
      }
      ts.tuple = std::move(t);
      s.tuples.push_back(std::move(ts));
    }
    return s;
  }

 private:
  const ReleaseMapping& m_;
};

json strip_selected(json state) {
  if (!state.is_object()) return state;
  for (auto& [k, v] : state.items()) {
    if (v.is_object()) v.erase("selectedResults");
  }
  return state;
}

/// Rows missing from the later goal, or concrete values it changed.
bool goals_differ(const goal::TupleList& a, const goal::TupleList& b) {
  auto key = [](const goal::SemanticTuple& t) { return std::tuple(t.subgoal, t.domain, t.slot); };
  std::map<std::tuple<int, Domain, std::string>, const goal::SemanticTuple*> later;
  for (const auto& t : b) later[key(t)] = &t;
  for (const auto& t : a) {
    auto it = later.find(key(t));
    if (it == later.end()) return true;
    if (t.is_concrete() && it->second->value != t.value) return true;
  }
  return false;
}

}  // namespace

std::vector<DialogueRecord> import_release(const json& j, const std::string& split,
                                           const ReleaseMapping& mapping) {
  if (!j.is_object()) throw FormatError("release corpus must be an object keyed by dialogue id");
  const ReleaseReader reader(mapping);
  static const std::set<std::string> known = {"goal", "final_goal", "messages", "type", "task description"};
  static const std::set<std::string> known_msg = {"content", "dialog_act", "role", "user_state",
                                                  "sys_state", "sys_state_init"};
  std::vector<DialogueRecord> out;
  for (const auto& [id, d] : j.items()) {
    DialogueRecord r;
    r.id = id;
    r.meta.source = Source::Imported;
    r.meta.split = split;
    const std::string where = "dialogue " + id;
    const json goal_rows = d.at("goal");
    for (std::size_t i = 0; i < goal_rows.size(); ++i) {
      r.goal.tuples.push_back(reader.tuple(goal_rows[i], where + " goal row " + std::to_string(i)));
    }
    if (d.contains("task description")) {
      const json& desc = d["task description"];
      if (desc.is_array()) {
        std::vector<std::string> lines;
        for (const auto& l : desc) lines.push_back(l.get<std::string>());
        r.goal.description = text::join(lines, "\n");
      } else {
        r.goal.description = desc.get<std::string>();
      }
    }
    r.goal.type = goal::classify_goal_type(r.goal.tuples);
    if (d.contains("type")) {
      const std::string label = d["type"].get<std::string>();
      if (auto it = mapping.goal_types.find(label); it != mapping.goal_types.end()) {
        r.goal.type = it->second;
      } else {
        r.meta.extra["type"] = label;
      }
      if (r.goal.type != goal::classify_goal_type(r.goal.tuples)) r.meta.extra["type_disagrees"] = true;
    }
    if (d.contains("final_goal")) {
      goal::TupleList final_goal;
      const json rows = d["final_goal"];
      for (std::size_t i = 0; i < rows.size(); ++i) {
        final_goal.push_back(reader.tuple(rows[i], where + " final_goal row " + std::to_string(i)));
      }
      r.meta.goal_changed = goals_differ(r.goal.tuples, final_goal);
      r.meta.extra["final_goal"] = goal::to_json(final_goal);
    }
    for (const auto& [k, v] : d.items()) {
      if (!known.count(k)) r.meta.extra[k] = v;
    }
    const json messages = d.value("messages", json::array());
    for (std::size_t i = 0; i < messages.size(); ++i) {
      const json& m = messages[i];
      const std::string mwhere = where + " message " + std::to_string(i);
      Turn t;
      t.role = speaker_from_string(m.at("role").get<std::string>());
      t.utterance = m.value("content", "");
      t.acts = reader.acts(m.value("dialog_act", json::array()), mwhere);
      if (m.contains("user_state") && m["user_state"].is_array()) {
        t.user_state = reader.user_state(m["user_state"], r.goal.tuples, mwhere);
      }
      if (t.role == Speaker::System) {
        const json state = m.value("sys_state", json());
        const json init = m.value("sys_state_init", json());
        t.metadata["sys_state"] = state;
        t.metadata["sys_state_init"] = init;
        t.n_queries = !init.is_null() && strip_selected(init) != strip_selected(state) ? 2 : 1;
      }
      for (const auto& [k, v] : m.items()) {
        if (!known_msg.count(k)) t.metadata[k] = v;
      }
      r.turns.push_back(std::move(t));
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

bool goal_changed(const DialogueRecord& r) {
  if (r.meta.goal_changed) return true;
  return std::any_of(r.turns.begin(), r.turns.end(),
                     [](const Turn& t) { return t.user_state && t.user_state->goal_changed; });
}

bool has_no_offer(const DialogueRecord& r) {
  return std::any_of(r.turns.begin(), r.turns.end(), [](const Turn& t) {
    return std::any_of(t.acts.begin(), t.acts.end(),
                       [](const DialogueAct& a) { return a.intent == Intent::NoOffer; });
  });
}

namespace {

struct Tally {
  long dialogues = 0, no_offer = 0, changed = 0, sys_turns = 0, multi_query = 0;
  long turns = 0, acts = 0, subgoals = 0, tuples = 0, tokens = 0;

  void add(const DialogueRecord& r, long tokens_in_dialogue) {
    ++dialogues;
    no_offer += has_no_offer(r);
    changed += goal_changed(r);
    turns += static_cast<long>(r.turns.size());
    for (const auto& t : r.turns) {
      acts += static_cast<long>(t.acts.size());
      if (t.role == Speaker::System) {
        ++sys_turns;
        multi_query += t.n_queries > 1;
      }
    }
    subgoals += static_cast<long>(goal::subgoal_ids(r.goal.tuples).size());
    tuples += static_cast<long>(r.goal.tuples.size());
    tokens += tokens_in_dialogue;
  }

  TypeStats stats() const {
    auto ratio = [](long a, long b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
    TypeStats s;
    s.n_dialogues = static_cast<int>(dialogues);
    s.no_offer_rate = ratio(no_offer, dialogues);
    s.goal_change_rate = ratio(changed, dialogues);
    s.multi_query_rate = ratio(multi_query, sys_turns);
    s.avg_acts_per_turn = ratio(acts, turns);
    s.avg_turns = ratio(turns, dialogues);
    s.avg_subgoals = ratio(subgoals, dialogues);
    s.avg_tuples = ratio(tuples, dialogues);
    s.avg_tokens_per_turn = ratio(tokens, turns);
    return s;
  }
};

json to_json(const TypeStats& s) {
  return {{"dialogues", s.n_dialogues},
          {"no_offer_rate", s.no_offer_rate},
          {"multi_query_rate", s.multi_query_rate},
          {"goal_change_rate", s.goal_change_rate},
          {"avg_acts_per_turn", s.avg_acts_per_turn},
          {"avg_turns", s.avg_turns},
          {"avg_subgoals", s.avg_subgoals},
          {"avg_tuples", s.avg_tuples},
          {"avg_tokens_per_turn", s.avg_tokens_per_turn}};
}

}  // namespace

CorpusStats compute_stats(const std::vector<DialogueRecord>& records) {
  if (records.empty()) throw std::invalid_argument("compute_stats: empty corpus");
  CorpusStats s;
  s.tokenizer = kTokenizer;
  Tally all;
  std::map<goal::GoalType, Tally> by_type;
  std::set<std::string> vocab;
  for (const auto& r : records) {
    long tokens = 0;
    for (const auto& t : r.turns) {
      const auto toks = text::tokenize(t.utterance);
      tokens += static_cast<long>(toks.size());
      vocab.insert(toks.begin(), toks.end());
    }
    all.add(r, tokens);
    by_type[r.goal.type].add(r, tokens);
    const int len = static_cast<int>(r.turns.size());
    ++s.turn_histogram[len];
    ++s.turn_histogram_by_type[r.goal.type][len];
  }
  s.n_dialogues = static_cast<int>(all.dialogues);
  s.n_turns = all.turns;
  s.n_tokens = all.tokens;
  s.vocab_size = static_cast<long>(vocab.size());
  s.all = all.stats();
  for (goal::GoalType t : goal::kAllGoalTypes) s.by_type[t] = by_type[t].stats();
  return s;
}

json to_json(const CorpusStats& s) {
  json types = json::object();
  for (const auto& [t, ts] : s.by_type) types[std::string(goal::to_string(t))] = to_json(ts);
  json hist = json::object();
  for (const auto& [len, n] : s.turn_histogram) hist[std::to_string(len)] = n;
  return {{"tokenizer", s.tokenizer},
          {"dialogues", s.n_dialogues},
          {"turns", s.n_turns},
          {"tokens", s.n_tokens},
          {"vocab", s.vocab_size},
          {"all", to_json(s.all)},
          {"by_type", std::move(types)},
          {"turn_histogram", std::move(hist)}};
}

std::string histogram_csv(const CorpusStats& s) {
  std::string out = "turns,all";
  for (goal::GoalType t : goal::kAllGoalTypes) out += "," + std::string(goal::to_string(t));
  out += "\n";
  for (const auto& [len, n] : s.turn_histogram) {
    out += std::to_string(len) + "," + std::to_string(n);
    for (goal::GoalType t : goal::kAllGoalTypes) {
      int c = 0;
      if (auto it = s.turn_histogram_by_type.find(t); it != s.turn_histogram_by_type.end()) {
        if (auto jt = it->second.find(len); jt != it->second.end()) c = jt->second;
      }
      out += "," + std::to_string(c);
    }
    out += "\n";
  }
  return out;
}

std::map<goal::GoalType, std::vector<const DialogueRecord*>> bucket_by_goal_type(
    const std::vector<DialogueRecord>& records) {
  std::map<goal::GoalType, std::vector<const DialogueRecord*>> out;
  for (goal::GoalType t : goal::kAllGoalTypes) out[t];
  for (const auto& r : records) out[r.goal.type].push_back(&r);
  return out;
}

}  // namespace xdial::corpus
