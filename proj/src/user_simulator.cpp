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

#include "xdial/user_simulator.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "xdial/annotation.hpp"

namespace xdial::user {

namespace {

using goal::CrossRef;
using goal::Relation;
using goal::SemanticTuple;

bool has_domain(const UserState& s, Domain d) {
  return std::any_of(s.tuples.begin(), s.tuples.end(),
                     [&](const TupleState& t) { return t.tuple.domain == d; });
}

std::optional<int> target_subgoal(const UserState& s, Domain d) {
  if (auto active = active_subgoal(s)) {
    for (const TupleState& t : s.tuples) {
      if (t.tuple.subgoal == *active && t.tuple.domain == d) return active;
    }
  }
  for (const TupleState& t : s.tuples) {
    if (t.tuple.domain == d && is_pending(t)) return t.tuple.subgoal;
  }
  return std::nullopt;
}

TupleState* find_tuple(UserState& s, int subgoal, std::string_view slot) {
  for (TupleState& t : s.tuples) {
    if (t.tuple.subgoal == subgoal && t.tuple.slot == slot) return &t;
  }
  return nullptr;
}

void log_change(UserState& s, const SemanticTuple& before, std::optional<SemanticTuple> after) {
  s.goal_changed = true;
  s.change_log.push_back({s.turn, before, std::move(after)});
}

void drop(UserState& s, std::size_t i) {
  log_change(s, s.tuples[i].tuple, std::nullopt);
  s.tuples.erase(s.tuples.begin() + static_cast<std::ptrdiff_t>(i));
}

void replace_value(UserState& s, TupleState& t, std::string value) {
  const SemanticTuple before = t.tuple;
  t.tuple.value = std::move(value);
  t.tuple.expressed = false;
  log_change(s, before, t.tuple);
}

/// Binds cross-refs to the current names of their referents.
void resolve(UserState& s) {
  for (TupleState& t : s.tuples) {
    const auto* ref = std::get_if<CrossRef>(&t.tuple.value);
    if (!ref) continue;
    const auto name = subgoal_name(s, ref->target);
    if (!name || t.anchor == name) continue;
    const bool rebound = t.anchor.has_value();
    t.anchor = name;
    if (ref->relation == Relation::AtEntity) {
      t.fill = name;
    } else if (rebound) {
      t.fill.reset();
    }
    if (rebound) t.tuple.expressed = false;
  }
}

void learn_name(UserState& s, int subgoal, const std::string& name) {
  TupleState* t = find_tuple(s, subgoal, slots::kName);
  if (!t || t->tuple.is_concrete() || t->fill == name) return;
  const bool changed = t->fill.has_value();
  t->fill = name;
  if (!changed) return;
  // Values learned about the previous entity no longer apply.
  for (TupleState& other : s.tuples) {
    if (other.tuple.subgoal == subgoal && other.tuple.is_blank() && &other != t) other.fill.reset();
  }
}

/// Accepts an offered value that breaks a concrete constraint.
void accept_offer(UserState& s, std::size_t i, const std::string& value, const db::Database& db) {
  TupleState& t = s.tuples[i];
  const Domain d = t.tuple.domain;
  const SlotSpec& spec = slot_spec(d, t.tuple.slot);
  switch (spec.kind) {
    case SlotKind::Service:
    case SlotKind::List:
      drop(s, i);
      return;
    case SlotKind::Text:
      replace_value(s, t, value);
      return;
    case SlotKind::Numeric: {
      const auto v = db::parse_number(value);
      if (!v) return;
      db::Constraint c{spec.name, db::Matcher::AtMost, *v};
      if (spec.name == slots::kRating) {
        c.matcher = db::Matcher::AtLeast;
      } else if (spec.name == slots::kDuration || (spec.name == slots::kFee && *v == 0.0)) {
        c.matcher = db::Matcher::Equals;
      }
      replace_value(s, t, db::constraint_text(db, c));
      return;
    }
    case SlotKind::Nearby:
      return;
  }
}

void learn_value(UserState& s, int subgoal, const DialogueAct& a, const db::Database& db) {
  TupleState* t = find_tuple(s, subgoal, a.slot);
  if (!t) return;
  if (t->tuple.is_blank()) {
    t->fill = a.value;
    return;
  }
  const auto* v = std::get_if<std::string>(&t->tuple.value);
  if (!v) return;
  bool ok = false;
  try {
    ok = db::value_satisfies(t->tuple.domain, t->tuple.slot, *v, a.value);
  } catch (const db::QueryError&) {
    return;
  }
  if (!ok) accept_offer(s, static_cast<std::size_t>(t - s.tuples.data()), a.value, db);
}

}  // namespace

UserState init_state(const goal::UserGoal& goal) {
  UserState s;
  for (const SemanticTuple& t : goal.tuples) s.tuples.push_back({t, std::nullopt, std::nullopt});
  resolve(s);
  return s;
}

bool is_pending(const TupleState& t) {
  if (t.tuple.is_blank()) return !t.fill.has_value();
  if (!t.tuple.expressed) return true;
  return t.tuple.is_cross_ref() && !t.fill.has_value();
}

bool is_terminated(const UserState& state) {
  return std::all_of(state.tuples.begin(), state.tuples.end(), [](const TupleState& t) {
    return t.tuple.is_concrete() || t.fill.has_value();
  });
}

std::optional<int> active_subgoal(const UserState& state) {
  std::optional<int> best;
  for (const TupleState& t : state.tuples) {
    if (is_pending(t) && (!best || t.tuple.subgoal < *best)) best = t.tuple.subgoal;
  }
  return best;
}

std::optional<std::string> subgoal_name(const UserState& state, int subgoal) {
  for (const TupleState& t : state.tuples) {
    if (t.tuple.subgoal != subgoal || t.tuple.slot != slots::kName) continue;
    if (const auto* v = std::get_if<std::string>(&t.tuple.value)) return *v;
    return t.fill;
  }
  return std::nullopt;
}

void receive(UserState& state, const ActList& system_acts, const db::Database& db) {
  std::set<int> recommended;
  // Targets are fixed at the start of the turn.
  std::map<Domain, std::optional<int>> targets;
  for (Domain d : kAllDomains) targets[d] = target_subgoal(state, d);
  for (const DialogueAct& a : system_acts) {
    if (a.intent != Intent::Inform && a.intent != Intent::Recommend && a.intent != Intent::NoOffer) {
      continue;
    }
    const auto d = parse_domain(a.domain);
    if (!d) continue;
    if (!has_domain(state, *d)) {
      ++state.ignored_acts;
      continue;
    }
    const auto target = targets[*d];
    if (!target) continue;
    if (a.intent == Intent::NoOffer) {
      compromise(state, *target, db);
    } else if (a.intent == Intent::Recommend) {
      // The first suggestion of the turn is the one taken.
      if (recommended.insert(*target).second) learn_name(state, *target, a.value);
    } else if (a.slot == slots::kName) {
      learn_name(state, *target, a.value);
    } else {
      learn_value(state, *target, a, db);
    }
    resolve(state);
  }
}

bool compromise(UserState& state, int subgoal, const db::Database& db) {
  auto concrete = [&](std::size_t i) {
    const SemanticTuple& t = state.tuples[i].tuple;
    return t.subgoal == subgoal && t.is_concrete() && t.slot != slots::kName;
  };
  for (std::size_t i = 0; i < state.tuples.size(); ++i) {
    if (concrete(i) && slot_spec(state.tuples[i].tuple.domain, state.tuples[i].tuple.slot).kind ==
                           SlotKind::Service) {
      drop(state, i);
      return true;
    }
  }
  for (std::size_t i = 0; i < state.tuples.size(); ++i) {
    if (!concrete(i)) continue;
    const SemanticTuple& t = state.tuples[i].tuple;
    if (slot_spec(t.domain, t.slot).kind != SlotKind::Numeric) continue;
    if (auto looser = db::loosen(db, t.domain, goal::tuple_constraint(t))) {
      replace_value(state, state.tuples[i], db::constraint_text(db, *looser));
      return true;
    }
  }
  for (std::size_t i = 0; i < state.tuples.size(); ++i) {
    if (concrete(i)) {
      drop(state, i);
      return true;
    }
  }
  return false;
}

UserTurnOutput respond(UserState& state, Rng& rng, const UserPolicy& policy) {
  ++state.turn;
  UserTurnOutput out;
  if (is_terminated(state)) {
    out.acts = {acts::general(acts::kThank), acts::general(acts::kBye)};
    out.terminated = true;
    return out;
  }
  const auto active = active_subgoal(state);
  if (!active) return out;

  auto expressible = [&](const TupleState& t) {
    if (t.tuple.is_cross_ref()) return t.anchor.has_value();
    return t.tuple.is_concrete() || !t.fill.has_value();
  };
  std::vector<std::size_t> fresh, requests, again;
  for (std::size_t i = 0; i < state.tuples.size(); ++i) {
    const TupleState& t = state.tuples[i];
    if (t.tuple.subgoal != *active || !expressible(t)) continue;
    if (!t.tuple.expressed) {
      (t.tuple.is_informable() ? fresh : requests).push_back(i);
    } else if (!t.tuple.is_concrete() && !t.fill) {
      again.push_back(i);
    }
  }
  fresh.insert(fresh.end(), requests.begin(), requests.end());
  std::vector<std::size_t>& pool = fresh.empty() ? again : fresh;

  const std::size_t k = std::min(pool.size(), 1 + rng.weighted(policy.n_tuples));
  out.selected.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  for (std::size_t i : out.selected) state.tuples[i].tuple.expressed = true;
  out.acts = annotation::derive_user_das(state.tuples, out.selected);
  return out;
}

}  // namespace xdial::user
