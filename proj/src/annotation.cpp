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

#include "xdial/annotation.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "xdial/text.hpp"

namespace xdial::annotation {

namespace {

constexpr const char* kEnglishLexicon =
#include "lexicon_en.inc"
    ;

constexpr char kUsed = '\x01';

bool word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && (std::isalnum(u) != 0);
}

/// Finds `needle` in `hay` at word boundaries, skipping consumed bytes.
std::size_t find_word(const std::string& hay, std::string_view needle, std::size_t from = 0) {
  if (needle.empty()) return std::string::npos;
  for (std::size_t p = hay.find(needle, from); p != std::string::npos; p = hay.find(needle, p + 1)) {
    const bool left_ok = !word_char(needle.front()) || p == 0 || !word_char(hay[p - 1]);
    const std::size_t end = p + needle.size();
    const bool right_ok = !word_char(needle.back()) || end == hay.size() || !word_char(hay[end]);
    if (left_ok && right_ok) return p;
  }
  return std::string::npos;
}

void consume(std::string& hay, std::size_t p, std::size_t n) {
  std::fill(hay.begin() + static_cast<std::ptrdiff_t>(p),
            hay.begin() + static_cast<std::ptrdiff_t>(p + n), kUsed);
}

struct Candidate {
  std::string key;
  DialogueAct act;
  Domain domain = Domain::Attraction;
  int entity = -1;
  bool is_name = false;
};

struct Hit {
  std::size_t pos;
  std::size_t order;
  const Candidate* cand;
};

/// Longest key first; each occurrence consumes its span.
std::vector<Hit> match_longest(std::string& hay, std::vector<Candidate>& cands) {
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return a.key.size() > b.key.size();
  });
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const Candidate& c = cands[i];
    for (std::size_t p = find_word(hay, c.key); p != std::string::npos; p = find_word(hay, c.key, p)) {
      hits.push_back({p, i, &c});
      consume(hay, p, c.key.size());
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return a.pos != b.pos ? a.pos < b.pos : a.order < b.order;
  });
  return hits;
}

void push_unique(ActList& out, DialogueAct a) {
  if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
}

std::optional<Domain> first_domain(const std::string& hay, const Lexicon& lex) {
  std::size_t best = std::string::npos;
  std::optional<Domain> out;
  for (const auto& [d, words] : lex.domains) {
    for (const auto& w : words) {
      const std::size_t p = find_word(hay, w);
      if (p < best) best = p, out = d;
    }
  }
  return out;
}

std::string_view money_slot(Domain d) {
  switch (d) {
    case Domain::Attraction: return slots::kFee;
    case Domain::Restaurant: return slots::kCost;
    case Domain::Hotel: return slots::kPrice;
    default: return {};
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// User side

ActList derive_user_das(std::span<const user::TupleState> state,
                        std::span<const std::size_t> selected) {
  ActList out;
  for (std::size_t i : selected) {
    const user::TupleState& ts = state[i];
    const goal::SemanticTuple& t = ts.tuple;
    if (const auto* v = std::get_if<std::string>(&t.value)) {
      out.push_back(acts::inform(t.domain, t.slot, *v));
    } else if (t.is_blank()) {
      out.push_back(acts::request(t.domain, t.slot));
    } else {
      const auto& r = std::get<goal::CrossRef>(t.value);
      if (r.relation == goal::Relation::Nearby) {
        std::optional<Domain> src;
        for (const auto& other : state) {
          if (other.tuple.subgoal == r.target) {
            src = other.tuple.domain;
            break;
          }
        }
        if (src) out.push_back(acts::select(t.domain, *src));
      } else if (ts.anchor) {
        out.push_back(acts::inform(t.domain, t.slot, *ts.anchor));
      }
    }
  }
  return out;
}

std::optional<std::vector<std::size_t>> recover_selection(const ActList& acts,
                                                          std::span<const user::TupleState> state,
                                                          int subgoal) {
  std::vector<std::size_t> out;
  std::set<std::size_t> used;
  for (const DialogueAct& a : acts) {
    bool found = false;
    for (std::size_t i = 0; i < state.size() && !found; ++i) {
      if (state[i].tuple.subgoal != subgoal || used.count(i)) continue;
      const std::size_t idx[] = {i};
      const ActList one = derive_user_das(state, idx);
      if (one.size() == 1 && one[0] == a) {
        out.push_back(i);
        used.insert(i);
        found = true;
      }
    }
    if (!found) return std::nullopt;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexicon

Lexicon Lexicon::from_json(const nlohmann::json& j) {
  auto lower = [](std::vector<std::string> v) {
    for (auto& s : v) s = text::normalize(s);
    return v;
  };
  Lexicon lex;
  const nlohmann::json general_json = j.value("general", nlohmann::json::object());
  for (const auto& [k, v] : general_json.items()) {
    lex.general[k] = lower(v.get<std::vector<std::string>>());
  }
  lex.no_offer = lower(j.value("no_offer", std::vector<std::string>{}));
  const nlohmann::json domains_json = j.value("domains", nlohmann::json::object());
  for (const auto& [k, v] : domains_json.items()) {
    lex.domains[domain_from_string(k)] = lower(v.get<std::vector<std::string>>());
  }
  lex.select = lower(j.value("select", std::vector<std::string>{}));
  const nlohmann::json slots_json = j.value("slots", nlohmann::json::object());
  for (const auto& [k, v] : slots_json.items()) {
    lex.slots[k] = lower(v.get<std::vector<std::string>>());
  }
  const nlohmann::json endpoints_json = j.value("endpoints", nlohmann::json::object());
  for (const auto& [k, v] : endpoints_json.items()) {
    lex.endpoints[k] = lower(v.get<std::vector<std::string>>());
  }
  return lex;
}

const Lexicon& Lexicon::english() {
  static const Lexicon lex = from_json(nlohmann::json::parse(kEnglishLexicon));
  return lex;
}

// ---------------------------------------------------------------------------
// System side

ActList derive_system_das(std::string_view utterance, const db::Database& db,
                          const MentionContext& ctx, const Lexicon& lexicon) {
  std::string hay = text::normalize(utterance);
  std::optional<Domain> domain = first_domain(hay, lexicon);
  if (!domain) domain = ctx.domain;
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < ctx.entities.size(); ++i) {
    const db::Entity& e = *ctx.entities[i];
    const Domain d = e.id.domain;
    for (const SlotSpec& spec : domain_slots(d)) {
      const std::string value = db::render_value(db, e, spec.name);
      if (value == "unknown") continue;
      Candidate c;
      c.key = text::normalize(spec.kind == SlotKind::Service ? spec.name : value);
      c.act = acts::inform(d, spec.name, value);
      c.domain = d;
      c.entity = static_cast<int>(i);
      c.is_name = spec.name == slots::kName;
      cands.push_back(std::move(c));
    }
  }
  // One value shared by several slots of an entity goes to the slots the
  // utterance names, when it names any of them.
  std::set<std::string> cued;
  for (const auto& [slot, words] : lexicon.slots) {
    for (const auto& w : words) {
      if (find_word(hay, w) != std::string::npos) cued.insert(slot);
    }
  }
  std::map<std::pair<int, std::string>, bool> group_cued;
  for (const Candidate& c : cands) group_cued[{c.entity, c.key}] |= cued.count(c.act.slot) > 0;
  std::erase_if(cands, [&](const Candidate& c) {
    return group_cued[{c.entity, c.key}] && !cued.count(c.act.slot);
  });
  for (const Mention& m : ctx.extra) {
    Candidate c;
    c.key = text::normalize(m.value);
    c.act = acts::inform(m.domain, m.slot, m.value);
    c.domain = m.domain;
    cands.push_back(std::move(c));
  }
  for (const auto& [kind, words] : lexicon.general) {
    for (const auto& w : words) {
      Candidate c;
      c.key = w;
      c.act = acts::general(kind);
      cands.push_back(std::move(c));
    }
  }
  if (domain) {
    for (const auto& w : lexicon.no_offer) {
      Candidate c;
      c.key = w;
      c.act = acts::no_offer(*domain);
      cands.push_back(std::move(c));
    }
  }
  const std::vector<Hit> hits = match_longest(hay, cands);

  std::map<Domain, std::set<int>> named;
  for (const Hit& h : hits) {
    if (h.cand->is_name) named[h.cand->domain].insert(h.cand->entity);
  }
  ActList out;
  for (const Hit& h : hits) {
    DialogueAct a = h.cand->act;
    if (h.cand->is_name && named[h.cand->domain].size() > 1) a.intent = Intent::Recommend;
    push_unique(out, std::move(a));
  }
  return out;
}

// ---------------------------------------------------------------------------
// User utterances

namespace {

std::vector<std::pair<std::string, bool>> split_clauses(const std::string& s) {
  std::vector<std::pair<std::string, bool>> out;
  std::string cur;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const bool end = i + 1 == s.size() || s[i + 1] == ' ';
    if ((c == '?' || c == '!' || (c == '.' && end))) {
      out.emplace_back(std::string(text::trim(cur)), c == '?');
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!text::trim(cur).empty()) out.emplace_back(std::string(text::trim(cur)), false);
  return out;
}

}  // namespace

ActList derive_user_das_from_text(std::string_view utterance, const db::Database& db,
                                  std::optional<Domain> current, const Lexicon& lexicon) {
  static const std::regex kAtMost(R"((\d+(?:\.\d+)?) yuan or (less|lower|below))");
  static const std::regex kAtLeast(R"((\d+(?:\.\d+)?) or (higher|more|above))");
  static const std::regex kHours(R"((\d+(?:\.\d+)?) hours?)");
  static const std::regex kFree(R"(\bfree\b)");

  ActList out;
  for (auto [clause, is_request] : split_clauses(text::normalize(utterance))) {
    const std::string original = clause;
    std::string& hay = clause;
    ActList local;

    // Nearby selections name their source domain.
    std::vector<Domain> sources;
    for (const auto& pattern : lexicon.select) {
      const std::size_t slot = pattern.find("{domain}");
      if (slot == std::string::npos) continue;
      for (const auto& [d, words] : lexicon.domains) {
        if (!is_venue_domain(d)) continue;
        for (const auto& w : words) {
          const std::string phrase = pattern.substr(0, slot) + w + pattern.substr(slot + 8);
          for (std::size_t p = find_word(hay, phrase); p != std::string::npos;
               p = find_word(hay, phrase, p)) {
            sources.push_back(d);
            consume(hay, p, phrase.size());
          }
        }
      }
    }
    if (auto d = first_domain(hay, lexicon)) current = d;

    for (const auto& [kind, words] : lexicon.general) {
      for (const auto& w : words) {
        for (std::size_t p = find_word(hay, w); p != std::string::npos; p = find_word(hay, w, p)) {
          push_unique(local, acts::general(kind));
          consume(hay, p, w.size());
        }
      }
    }
    if (!current) {
      out.insert(out.end(), local.begin(), local.end());
      continue;
    }
    const Domain d = *current;

    std::vector<Candidate> cands;
    auto add = [&](std::string key, DialogueAct act) {
      Candidate c;
      c.key = text::normalize(key);
      c.act = std::move(act);
      c.domain = d;
      cands.push_back(std::move(c));
    };
    if (is_traffic_domain(d)) {
      for (Domain v : kVenueDomains) {
        for (const auto& e : db.entities(v)) add(e.name(), acts::inform(d, "", e.name()));
      }
    } else {
      for (const auto& e : db.entities(d)) add(e.name(), acts::inform(d, slots::kName, e.name()));
      for (const SlotSpec& spec : domain_slots(d)) {
        if (!spec.informable) continue;
        if (spec.kind == SlotKind::Text && spec.name != slots::kName) {
          for (const auto& v : db.observed_values(d, spec.name)) add(v, acts::inform(d, spec.name, v));
        } else if (spec.kind == SlotKind::List) {
          for (const auto& v : db.observed_values(d, spec.name)) add(v, acts::inform(d, spec.name, v));
        } else if (spec.kind == SlotKind::Service) {
          add(spec.name, is_request ? acts::request(d, spec.name) : acts::inform(d, spec.name, "yes"));
        }
      }
    }
    const std::vector<Hit> hits = match_longest(hay, cands);
    for (const Hit& h : hits) {
      DialogueAct a = h.cand->act;
      if (is_traffic_domain(d)) {
        // The endpoint word right before the name decides the slot.
        const std::string before = original.substr(0, h.pos);
        for (const auto& [slot, words] : lexicon.endpoints) {
          for (const auto& w : words) {
            const std::string cue = w + " ";
            if (before.size() >= cue.size() && before.compare(before.size() - cue.size(), cue.size(), cue) == 0) {
              a.slot = slot;
            }
          }
        }
        if (a.slot.empty()) continue;
      }
      push_unique(local, std::move(a));
    }

    if (is_venue_domain(d)) {
      auto scan = [&](const std::regex& re, std::string_view slot) {
        if (slot.empty() || !find_slot(d, slot)) return;
        for (std::smatch m; std::regex_search(hay, m, re);) {
          const std::size_t p = static_cast<std::size_t>(m.position(0));
          const std::size_t n = static_cast<std::size_t>(m.length(0));
          const std::string raw = original.substr(p, n);
          consume(hay, p, n);
          try {
            const db::Constraint c = db::parse_constraint(d, slot, raw);
            push_unique(local, acts::inform(d, slot, db::constraint_text(db, c)));
          } catch (const db::QueryError&) {
          }
        }
      };
      scan(kAtMost, money_slot(d));
      scan(kAtLeast, slots::kRating);
      if (d == Domain::Attraction) {
        scan(kHours, slots::kDuration);
        scan(kFree, slots::kFee);
      }
    }

    if (is_request) {
      std::vector<Candidate> slot_cands;
      for (const SlotSpec& spec : domain_slots(d)) {
        if (!spec.requestable || spec.kind == SlotKind::Service) continue;
        auto it = lexicon.slots.find(spec.name);
        if (it == lexicon.slots.end()) continue;
        for (const auto& w : it->second) {
          Candidate c;
          c.key = w;
          c.act = acts::request(d, spec.name);
          slot_cands.push_back(std::move(c));
        }
      }
      for (const Hit& h : match_longest(hay, slot_cands)) push_unique(local, h.cand->act);
    }
    for (Domain src : sources) push_unique(local, acts::select(d, src));
    for (auto& a : local) push_unique(out, std::move(a));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

ActCounts& ActCounts::operator+=(const ActCounts& o) {
  matched += o.matched;
  gold += o.gold;
  predicted += o.predicted;
  return *this;
}

double ActCounts::precision() const {
  return predicted ? static_cast<double>(matched) / static_cast<double>(predicted) : 1.0;
}

double ActCounts::recall() const {
  return gold ? static_cast<double>(matched) / static_cast<double>(gold) : 1.0;
}

double ActCounts::f1() const {
  if (gold == 0 && predicted == 0) return 1.0;
  return 2.0 * static_cast<double>(matched) / static_cast<double>(gold + predicted);
}

ActCounts count_acts(const ActList& gold, const ActList& pred, std::optional<Intent> intent) {
  auto pick = [&](const ActList& in) {
    ActList out;
    for (const auto& a : in) {
      if (!intent || a.intent == *intent) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const ActList g = pick(gold), p = pick(pred);
  ActList common;
  std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(common));
  return {common.size(), g.size(), p.size()};
}

double da_f1(const ActList& gold, const ActList& pred) { return count_acts(gold, pred).f1(); }

double da_f1(std::span<const ActList> gold, std::span<const ActList> pred) {
  if (gold.size() != pred.size()) {
    throw std::invalid_argument("da_f1: " + std::to_string(gold.size()) + " gold turns vs " +
                                std::to_string(pred.size()));
  }
  ActCounts total;
  for (std::size_t i = 0; i < gold.size(); ++i) total += count_acts(gold[i], pred[i]);
  return total.f1();
}

nlohmann::json AgreementReport::to_json() const {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [i, f] : per_intent_f1) per[std::string(xdial::to_string(i))] = f;
  return {{"da_f1", da_f1}, {"state_accuracy", state_accuracy}, {"per_intent_f1", per},
          {"turns", turns}};
}

AgreementReport agreement(std::span<const ActList> gold_acts, std::span<const ActList> pred_acts,
                          std::span<const nlohmann::json> gold_states,
                          std::span<const nlohmann::json> pred_states) {
  AgreementReport r;
  r.turns = gold_acts.size();
  r.da_f1 = da_f1(gold_acts, pred_acts);
  r.state_accuracy = joint_state_accuracy(gold_states, pred_states);
  for (Intent intent : kAllIntents) {
    ActCounts c;
    for (std::size_t i = 0; i < gold_acts.size(); ++i) c += count_acts(gold_acts[i], pred_acts[i], intent);
    if (c.gold || c.predicted) r.per_intent_f1[intent] = c.f1();
  }
  return r;
}

}  // namespace xdial::annotation
