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

#include "xdial/sim_harness.hpp"

#include <algorithm>
#include <cstdio>

#include "xdial/text.hpp"

namespace xdial::sim {

using nlohmann::json;

std::string_view to_string(Level l) { return l == Level::DialogueAct ? "da" : "nl"; }

Level level_from_string(std::string_view s) {
  if (s == "da" || s == "dialogue-act") return Level::DialogueAct;
  if (s == "nl" || s == "natural-language") return Level::NaturalLanguage;
  throw std::invalid_argument("unknown level '" + std::string(s) + "' (da or nl)");
}

std::string_view to_string(Failure f) {
  switch (f) {
    case Failure::None: return "";
    case Failure::MaxTurns: return "max-turns";
    case Failure::PolicyError: return "policy-error";
    case Failure::NlgMiss: return "nlg-miss";
  }
  return "?";
}

void SimConfig::validate() const {
  if (max_turns < 2) throw std::invalid_argument("max_turns must be at least 2");
  if (mode == wizard::Mode::Oracle && level == Level::NaturalLanguage) {
    throw std::invalid_argument("the oracle wizard runs at the dialogue-act level only");
  }
  goals.validate();
}

json SimConfig::to_json() const {
  const auto& g = goals;
  json goal_cfg = {{"p_domain", g.p_domain},
                   {"p_cross", g.p_cross},
                   {"p_taxi", g.p_taxi},
                   {"p_metro", g.metro()},
                   {"max_subgoals", g.max_subgoals},
                   {"n_informable", g.n_informable},
                   {"n_cross_informable", g.n_cross_informable},
                   {"p_name_informable", g.p_name_informable},
                   {"p_request", g.p_request},
                   {"p_nearby_request", g.p_nearby_request},
                   {"retry_budget", g.retry_budget}};
  return {{"level", std::string(sim::to_string(level))},
          {"max_turns", max_turns},
          {"n_runs", n_runs},
          {"goals", std::move(goal_cfg)},
          {"user_n_tuples", policy.n_tuples},
          {"wizard", std::string(wizard::to_string(mode))},
          {"seed", seed}};
}

std::string SimConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Sessions

namespace {

int query_count(const wizard::SystemState& s) {
  int n = 0;
  for (Domain d : s.touched) {
    if (auto it = s.queries.find(d); it != s.queries.end()) n = std::max(n, static_cast<int>(it->second.size()));
  }
  return n;
}

std::optional<Domain> last_domain(const ActList& acts, std::optional<Domain> fallback) {
  for (auto it = acts.rbegin(); it != acts.rend(); ++it) {
    if (auto d = parse_domain(it->domain)) return d;
  }
  return fallback;
}

annotation::MentionContext mention_context(const db::Database& db, const wizard::Wizard& wiz,
                                           const wizard::SystemTurnOutput& out) {
  annotation::MentionContext ctx;
  auto add = [&](const db::EntityId& id) {
    const db::Entity* e = db.find(id);
    if (e && std::find(ctx.entities.begin(), ctx.entities.end(), e) == ctx.entities.end()) {
      ctx.entities.push_back(e);
    }
  };
  for (const auto& id : out.retrieved) add(id);
  for (const auto& [d, id] : wiz.state().selected) add(id);
  for (std::size_t i = 0; i < out.acts.size(); ++i) {
    const std::string& src = out.sources[i];
    if (src == "booking" || src == "station" || src == "endpoint") {
      if (auto d = parse_domain(out.acts[i].domain)) ctx.extra.push_back({*d, out.acts[i].slot, out.acts[i].value});
    }
  }
  if (!wiz.state().touched.empty()) ctx.domain = wiz.state().touched.front();
  return ctx;
}

}  // namespace

corpus::DialogueRecord run_session(const SimConfig& cfg, const db::Database& db,
                                   const goal::UserGoal& goal, std::uint64_t seed, std::string id) {
  cfg.validate();
  corpus::DialogueRecord rec;
  rec.id = std::move(id);
  rec.goal = goal;
  rec.meta.source = corpus::Source::Simulated;
  rec.meta.seed = seed;
  rec.meta.config_hash = cfg.hash();

  const bool nl = cfg.level == Level::NaturalLanguage;
  const auto& store = nlg::TemplateStore::english();
  const auto& lex = annotation::Lexicon::english();
  user::UserState us = user::init_state(goal);
  wizard::Wizard wiz(db, cfg.mode, Rng::derive(seed, 1));
  Rng user_rng(Rng::derive(seed, 2));
  Rng nlg_rng(Rng::derive(seed, 3));
  std::optional<Domain> user_domain;

  Failure failure = Failure::None;
  bool finished = false;
  auto count = [&] { return static_cast<int>(rec.turns.size()); };
  while (true) {
    if (count() >= cfg.max_turns) {
      failure = Failure::MaxTurns;
      break;
    }
    const auto u = user::respond(us, user_rng, cfg.policy);
    corpus::Turn ut;
    ut.role = corpus::Speaker::User;
    ut.acts = u.acts;
    ut.user_state = us;
    ut.selected = u.selected;
    ActList heard = u.acts;
    if (nl) {
      try {
        ut.utterance = nlg::generate(store, nlg::Role::User, u.acts, nlg_rng);
      } catch (const nlg::NoTemplate&) {
        failure = Failure::NlgMiss;
        rec.turns.push_back(std::move(ut));
        break;
      }
      heard = annotation::derive_user_das_from_text(ut.utterance, db, user_domain, lex);
      user_domain = last_domain(heard, user_domain);
      ut.metadata["understood"] = to_json(heard);
    }
    rec.turns.push_back(std::move(ut));
    if (u.terminated) finished = user::is_terminated(us);
    if (count() >= cfg.max_turns) {
      if (!finished) failure = Failure::MaxTurns;
      break;
    }

    corpus::Turn st;
    st.role = corpus::Speaker::System;
    ActList replied;
    try {
      const auto s = wiz.respond(heard, cfg.mode == wizard::Mode::Oracle ? &us : nullptr);
      st.acts = s.acts;
      st.sources = s.sources;
      st.sys_state = wiz.state();
      st.n_queries = query_count(wiz.state());
      replied = s.acts;
      if (nl) {
        st.utterance = nlg::generate(store, nlg::Role::System, s.acts, nlg_rng);
        replied = annotation::derive_system_das(st.utterance, db, mention_context(db, wiz, s), lex);
        st.metadata["understood"] = to_json(replied);
      }
    } catch (const nlg::NoTemplate&) {
      failure = Failure::NlgMiss;
      break;
    } catch (const std::exception& e) {
      failure = Failure::PolicyError;
      rec.meta.extra["error"] = e.what();
      break;
    }
    rec.turns.push_back(std::move(st));
    if (u.terminated) break;
    try {
      user::receive(us, replied, db);
    } catch (const std::exception& e) {
      failure = Failure::PolicyError;
      rec.meta.extra["error"] = e.what();
      break;
    }
  }
  rec.meta.finished = finished;
  rec.meta.failure = std::string(to_string(finished ? Failure::None : failure));
  return rec;
}

goal::UserGoal sample_goal_of_type(const goal::GoalGenConfig& cfg, const db::Database& db,
                                   goal::GoalType type, std::uint64_t seed, int max_attempts) {
  goal::GoalGenConfig c = cfg;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    c.seed = Rng::derive(seed, static_cast<std::uint64_t>(attempt));
    goal::UserGoal g;
    try {
      g = goal::generate_goal(c, db);
    } catch (const goal::GenerationError&) {
      continue;
    }
    if (g.type == type) return g;
  }
  throw goal::GenerationError("no " + std::string(goal::to_string(type)) + " goal in " +
                              std::to_string(max_attempts) + " draws");
}

json SimResult::summary() const {
  json types = json::object();
  for (const auto& [t, r] : by_type) {
    types[std::string(goal::to_string(t))] = {
        {"runs", r.runs}, {"finished", r.finished}, {"finish_rate", r.rate()}, {"failures", r.failures}};
  }
  return {{"config", config.to_json()}, {"config_hash", config.hash()}, {"by_type", std::move(types)}};
}

json SimResult::to_json() const {
  json j = summary();
  j["corpus"] = corpus::export_corpus(records);
  return j;
}

SimResult finish_rate(const SimConfig& cfg, const db::Database& db, std::span<const goal::GoalType> types) {
  if (cfg.n_runs < 1) throw std::invalid_argument("n_runs must be at least 1");
  cfg.validate();
  SimResult out;
  out.config = cfg;
  for (goal::GoalType type : types) {
    auto& tr = out.by_type[type];
    const auto type_seed = Rng::derive(cfg.seed, 1000 + static_cast<std::uint64_t>(type));
    for (int k = 0; k < cfg.n_runs; ++k) {
      const auto session_seed = Rng::derive(type_seed, static_cast<std::uint64_t>(k));
      const auto g = sample_goal_of_type(cfg.goals, db, type, Rng::derive(session_seed, 0));
      char id[32];
      std::snprintf(id, sizeof id, "%s-%05d", std::string(goal::to_string(type)).c_str(), k);
      auto rec = run_session(cfg, db, g, session_seed, id);
      ++tr.runs;
      if (rec.meta.finished.value_or(false)) {
        ++tr.finished;
      } else {
        ++tr.failures[rec.meta.failure];
      }
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Re-annotation

ActList annotate_turn(const corpus::Turn& t, const db::Database& db) {
  if (t.role == corpus::Speaker::User) {
    if (!t.user_state) throw std::invalid_argument("no user state");
    if (t.selected.empty() && user::is_terminated(*t.user_state)) {
      return {acts::general(acts::kThank), acts::general(acts::kBye)};
    }
    return annotation::derive_user_das(t.user_state->tuples, t.selected);
  }
  if (t.sys_state && t.sources.size() == t.acts.size() && !t.sources.empty()) {
    ActList again;
    for (std::size_t k = 0; k < t.acts.size(); ++k) {
      DialogueAct a = t.acts[k];
      if (t.sources[k] != "none") {
        try {
          a.value = wizard::source_value(db, *t.sys_state, a, t.sources[k]);
        } catch (const std::exception& e) {
          a.value = std::string("<") + e.what() + ">";
        }
      }
      again.push_back(std::move(a));
    }
    return again;
  }
  if (!t.utterance.empty()) {
    annotation::MentionContext ctx;
    if (t.sys_state) {
      for (const auto& [d, id] : t.sys_state->selected) {
        if (const db::Entity* e = db.find(id)) ctx.entities.push_back(e);
      }
      if (!t.sys_state->touched.empty()) ctx.domain = t.sys_state->touched.front();
    }
    return annotation::derive_system_das(t.utterance, db, ctx, annotation::Lexicon::english());
  }
  if (t.acts.empty() && t.sys_state) return {};
  throw std::invalid_argument("no system state, sources or text");
}

int annotate(corpus::DialogueRecord& r, const db::Database& db) {
  int changed = 0;
  for (auto& t : r.turns) {
    try {
      ActList again = annotate_turn(t, db);
      if (again != t.acts) {
        t.acts = std::move(again);
        ++changed;
      }
    } catch (const std::invalid_argument&) {
    }
  }
  return changed;
}

Consistency reannotate(const corpus::DialogueRecord& r, const db::Database& db) {
  Consistency out;
  for (std::size_t i = 0; i < r.turns.size(); ++i) {
    const auto& t = r.turns[i];
    const std::string where = r.id + " turn " + std::to_string(i);
    ActList again;
    try {
      again = annotate_turn(t, db);
    } catch (const std::invalid_argument& e) {
      out.mismatches.push_back(where + ": " + e.what());
      continue;
    }
    (t.role == corpus::Speaker::User ? out.user : out.system) += annotation::count_acts(t.acts, again);
    if (annotation::da_f1(t.acts, again) != 1.0) {
      out.mismatches.push_back(where + ": logged " + to_json(t.acts).dump() + " vs " + to_json(again).dump());
    }
  }
  return out;
}

std::vector<std::map<Domain, wizard::Query>> reconstruct_first_queries(const corpus::DialogueRecord& r,
                                                                       const db::Database&) {
  // slot -> constraint per domain, with nearby-of kept under its own key.
  std::map<Domain, std::map<std::string, db::Constraint>> cumulative;
  std::map<Domain, db::EntityId> selected;
  std::vector<std::map<Domain, wizard::Query>> out;
  ActList pending;
  for (const auto& t : r.turns) {
    if (t.role == corpus::Speaker::User) {
      pending = t.metadata.contains("understood") ? acts_from_json(t.metadata["understood"]) : t.acts;
      continue;
    }
    for (const auto& a : pending) {
      const auto d = parse_domain(a.domain);
      if (!d || a.intent != Intent::Inform) continue;
      try {
        cumulative[*d][a.slot] = db::parse_constraint(*d, a.slot, a.value);
      } catch (const db::QueryError&) {
      }
    }
    for (const auto& a : pending) {
      const auto d = parse_domain(a.domain);
      const auto src = parse_domain(a.value);
      if (!d || !src || a.intent != Intent::Select) continue;
      if (auto it = selected.find(*src); it != selected.end()) {
        cumulative[*d]["@nearby"] = {std::string(slots::kName), db::Matcher::NearbyOf, it->second};
      }
    }
    std::map<Domain, wizard::Query> now;
    for (const auto& [d, m] : cumulative) {
      for (const auto& [k, c] : m) now[d].push_back(c);
    }
    out.push_back(std::move(now));
    if (t.sys_state) selected = t.sys_state->selected;
    pending.clear();
  }
  return out;
}

}  // namespace xdial::sim
