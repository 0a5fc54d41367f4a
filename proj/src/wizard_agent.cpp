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

#include "xdial/wizard_agent.hpp"

#include <algorithm>
#include <stdexcept>

#include "xdial/user_simulator.hpp"

namespace xdial::wizard {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxRecommend = 3;

bool same_key(const db::Constraint& a, const db::Constraint& b) {
  return a.slot == b.slot &&
         (a.matcher == db::Matcher::NearbyOf) == (b.matcher == db::Matcher::NearbyOf);
}

void upsert(Query& q, db::Constraint c) {
  for (auto& old : q) {
    if (same_key(old, c)) {
      old = std::move(c);
      return;
    }
  }
  q.push_back(std::move(c));
}

Query& first_query(SystemState& s, Domain d) {
  auto& qs = s.queries[d];
  if (qs.empty()) qs.emplace_back();
  return qs.front();
}

void touch(SystemState& s, Domain d) {
  if (std::find(s.touched.begin(), s.touched.end(), d) == s.touched.end()) s.touched.push_back(d);
}

std::vector<const db::Entity*> run(const db::Database& db, Domain d, const Query& q) {
  try {
    return db::query(db, d, q);
  } catch (const db::QueryError&) {
    return {};
  }
}

/// The next, looser query; nullopt when nothing may be relaxed.
std::optional<Query> relax_step(const db::Database& db, Domain d, Query q) {
  auto find = [&](auto pred) {
    return std::find_if(q.begin(), q.end(), pred);
  };
  if (auto it = find([](const db::Constraint& c) { return c.matcher == db::Matcher::IsYes; });
      it != q.end()) {
    q.erase(it);
    return q;
  }
  if (auto it = find([](const db::Constraint& c) {
        return c.matcher == db::Matcher::AtLeast || c.matcher == db::Matcher::AtMost;
      });
      it != q.end()) {
    if (auto looser = db::loosen(db, d, *it)) {
      *it = *looser;
    } else {
      q.erase(it);
    }
    return q;
  }
  if (auto it = find([](const db::Constraint& c) { return c.matcher == db::Matcher::Contains; });
      it != q.end()) {
    q.erase(it);
    return q;
  }
  if (auto it = find([](const db::Constraint& c) {
        return c.matcher == db::Matcher::Equals && c.slot != slots::kName;
      });
      it != q.end()) {
    q.erase(it);
    return q;
  }
  return std::nullopt;
}

std::optional<std::string> endpoint(const Query& q, std::string_view slot) {
  for (const auto& c : q) {
    if (c.slot == slot) return std::get<std::string>(c.value);
  }
  return std::nullopt;
}

std::string station_of(const db::Database& db, const std::string& name) {
  const db::Entity* e = db.find_by_name(name);
  return e ? db.nearest_station(e->id) : std::string("unknown");
}

/// Appends an act unless the turn already says it.
void emit(SystemTurnOutput& out, DialogueAct a, std::string source) {
  if (std::find(out.acts.begin(), out.acts.end(), a) != out.acts.end()) return;
  out.acts.push_back(std::move(a));
  out.sources.push_back(std::move(source));
}

}  // namespace

const Query& SystemState::first(Domain d) const {
  static const Query kEmpty;
  auto it = queries.find(d);
  return it == queries.end() || it->second.empty() ? kEmpty : it->second.front();
}

void rule_dst_update(SystemState& state, const ActList& user_acts) {
  state.requested.clear();
  state.unresolved.clear();
  state.touched.clear();
  for (auto& [d, qs] : state.queries) {
    if (qs.size() > 1) qs.resize(1);
  }
  for (const DialogueAct& a : user_acts) {
    const auto d = parse_domain(a.domain);
    if (!d) continue;
    if (a.intent == Intent::Inform) {
      try {
        upsert(first_query(state, *d), db::parse_constraint(*d, a.slot, a.value));
      } catch (const db::QueryError&) {
        continue;
      }
      touch(state, *d);
    } else if (a.intent == Intent::Request) {
      first_query(state, *d);
      state.requested.emplace_back(*d, a.slot);
      touch(state, *d);
    }
  }
  for (const DialogueAct& a : user_acts) {
    if (a.intent != Intent::Select) continue;
    const auto d = parse_domain(a.domain);
    const auto src = parse_domain(a.value);
    if (!d || !src) continue;
    touch(state, *d);
    auto it = state.selected.find(*src);
    if (it == state.selected.end()) {
      first_query(state, *d);
      state.unresolved.emplace_back(*d, *src);
      continue;
    }
    upsert(first_query(state, *d),
           db::Constraint{std::string(slots::kName), db::Matcher::NearbyOf, it->second});
  }
}

SearchResult search_with_relaxation(SystemState& state, const db::Database& db, Domain d) {
  auto& qs = state.queries[d];
  if (qs.empty()) qs.emplace_back();
  qs.resize(1);
  Query q = qs.front();
  SearchResult out;
  out.results = run(db, d, q);
  while (out.results.empty()) {
    auto next = relax_step(db, d, q);
    if (!next) break;
    q = std::move(*next);
    qs.push_back(q);
    out.results = run(db, d, q);
  }
  if (out.results.empty()) return out;
  for (const auto& c : qs.front()) {
    if (std::find(q.begin(), q.end(), c) == q.end()) out.relaxed.push_back(c.slot);
  }
  return out;
}

std::string_view to_string(Mode m) { return m == Mode::Rule ? "rule" : "oracle"; }

Mode mode_from_string(std::string_view s) {
  if (s == "rule") return Mode::Rule;
  if (s == "oracle") return Mode::Oracle;
  throw std::invalid_argument("unknown wizard mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Wizard

Wizard::Wizard(const db::Database& db, Mode mode, std::uint64_t seed)
    : db_(db), mode_(mode), rng_(seed) {}

SystemTurnOutput Wizard::respond(const ActList& user_acts, const user::UserState* user_view) {
  if (mode_ == Mode::Oracle && !user_view) {
    throw std::invalid_argument("oracle wizard needs the user state");
  }
  ++state_.turn;
  std::map<Domain, Query> before;
  for (Domain d : kAllDomains) before[d] = state_.first(d);
  rule_dst_update(state_, user_acts);

  SystemTurnOutput out;
  for (Domain d : state_.touched) {
    if (is_traffic_domain(d)) {
      answer_traffic(d, out);
    } else {
      answer_venue(d, state_.first(d) != before[d], out, user_view);
    }
  }
  for (const DialogueAct& a : user_acts) {
    if (a.intent != Intent::General) continue;
    if (a.domain == acts::kThank) emit(out, acts::general(acts::kWelcome), "none");
    if (a.domain == acts::kBye) emit(out, acts::general(acts::kBye), "none");
    if (a.domain == acts::kGreet) emit(out, acts::general(acts::kGreet), "none");
  }
  return out;
}

std::vector<db::EntityId> Wizard::oracle_pick(Domain d, const user::UserState& view) {
  std::optional<int> target;
  if (auto active = user::active_subgoal(view)) {
    for (const auto& t : view.tuples) {
      if (t.tuple.subgoal == *active && t.tuple.domain == d) target = active;
    }
  }
  for (const auto& t : view.tuples) {
    if (!target && t.tuple.domain == d && user::is_pending(t)) target = t.tuple.subgoal;
  }
  if (!target) {
    auto it = state_.selected.find(d);
    if (it != state_.selected.end()) return {it->second};
    return {};
  }
  auto constraints_of = [&](int subgoal) {
    Query q;
    for (const auto& t : view.tuples) {
      if (t.tuple.subgoal != subgoal) continue;
      if (t.tuple.is_concrete()) {
        q.push_back(goal::tuple_constraint(t.tuple));
      } else if (const auto* ref = std::get_if<goal::CrossRef>(&t.tuple.value);
                 ref && ref->relation == goal::Relation::Nearby && t.anchor) {
        for (const auto& r : view.tuples) {
          if (r.tuple.subgoal != ref->target) continue;
          if (const db::Entity* anchor = db_.find_by_name(r.tuple.domain, *t.anchor)) {
            q.push_back({std::string(slots::kName), db::Matcher::NearbyOf, anchor->id});
          }
          break;
        }
      }
    }
    return q;
  };
  const Query q = constraints_of(*target);
  if (auto it = chosen_.find(*target); it != chosen_.end()) {
    const db::Entity& e = db_.lookup(it->second);
    if (std::all_of(q.begin(), q.end(),
                    [&](const db::Constraint& c) { return db::matches(db_, e, c); })) {
      return {e.id};
    }
  }
  const auto results = run(db_, d, q);
  if (results.empty()) return {};
  // Look one step ahead so every sub-goal anchored here can still be met.
  std::vector<std::pair<Domain, Query>> dependents;
  std::map<int, Domain> dependent_domains;
  for (const auto& t : view.tuples) {
    const auto* ref = std::get_if<goal::CrossRef>(&t.tuple.value);
    if (ref && ref->relation == goal::Relation::Nearby && ref->target == *target) {
      dependent_domains[t.tuple.subgoal] = t.tuple.domain;
    }
  }
  for (const auto& [id, dd] : dependent_domains) dependents.emplace_back(dd, constraints_of(id));
  const db::Entity* pick = results.front();
  for (const db::Entity* e : results) {
    const bool ok = std::all_of(dependents.begin(), dependents.end(), [&](const auto& dep) {
      Query dq = dep.second;
      dq.push_back({std::string(slots::kName), db::Matcher::NearbyOf, e->id});
      return !run(db_, dep.first, dq).empty();
    });
    if (ok) {
      pick = e;
      break;
    }
  }
  chosen_[*target] = pick->id;
  return {pick->id};
}

void Wizard::answer_venue(Domain d, bool changed, SystemTurnOutput& out,
                          const user::UserState* view) {
  for (const auto& [dd, src] : state_.unresolved) {
    if (dd == d) {
      emit(out, acts::request(src, slots::kName), "none");
      return;
    }
  }
  std::vector<db::EntityId> shown;
  if (mode_ == Mode::Oracle) {
    shown = oracle_pick(d, *view);
    if (shown.empty()) {
      emit(out, acts::no_offer(d), "none");
      state_.selected.erase(d);
      state_.announced.erase(d);
      return;
    }
    state_.selected[d] = shown.front();
  } else if (changed || !state_.selected.contains(d)) {
    const SearchResult res = search_with_relaxation(state_, db_, d);
    if (res.results.empty()) {
      emit(out, acts::no_offer(d), "none");
      state_.selected.erase(d);
      state_.announced.erase(d);
      return;
    }
    for (std::size_t i = 0; i < res.results.size() && i < kMaxRecommend; ++i) {
      shown.push_back(res.results[i]->id);
    }
    state_.selected[d] = shown.front();
    if (!res.relaxed.empty()) {
      out.relaxed = true;
      const db::Entity& e = *res.results.front();
      for (const auto& slot : res.relaxed) {
        emit(out, acts::inform(d, slot, db::render_value(db_, e, slot)), e.id.str());
      }
    }
  } else {
    shown.push_back(state_.selected.at(d));
  }

  const db::Entity& e = db_.lookup(state_.selected.at(d));
  bool named = false;
  auto announced = state_.announced.find(d);
  if (changed || announced == state_.announced.end() || announced->second != e.id) {
    if (shown.size() > 1) {
      for (const auto& id : shown) emit(out, acts::recommend(d, db_.lookup(id).name()), id.str());
    } else {
      emit(out, acts::inform(d, slots::kName, e.name()), e.id.str());
    }
    state_.announced[d] = e.id;
    named = true;
  }
  out.retrieved.insert(out.retrieved.end(), shown.begin(), shown.end());
  for (const auto& [dd, slot] : state_.requested) {
    if (dd != d || (slot == slots::kName && named)) continue;
    if (!find_slot(d, slot)) {
      throw std::invalid_argument("request for unknown slot '" + slot + "' in " +
                                  std::string(xdial::to_string(d)));
    }
    emit(out, acts::inform(d, slot, db::render_value(db_, e, slot)), e.id.str());
  }
}

void Wizard::answer_traffic(Domain d, SystemTurnOutput& out) {
  const Query& q = state_.first(d);
  const auto from = endpoint(q, slots::kFrom);
  const auto to = endpoint(q, slots::kTo);
  bool asked = false;
  for (const auto& [dd, slot] : state_.requested) {
    if (dd != d) continue;
    if (!from || !to) {
      if (!asked) {
        if (!from) emit(out, acts::request(d, slots::kFrom), "none");
        if (!to) emit(out, acts::request(d, slots::kTo), "none");
        asked = true;
      }
      continue;
    }
    if (!find_slot(d, slot)) {
      throw std::invalid_argument("request for unknown slot '" + slot + "' in " +
                                  std::string(xdial::to_string(d)));
    }
    if (slot == slots::kCarType) {
      emit(out, acts::inform(d, slot, booking(*from, *to).car_type), "booking");
    } else if (slot == slots::kPlate) {
      emit(out, acts::inform(d, slot, booking(*from, *to).plate), "booking");
    } else if (slot == slots::kFromStation) {
      emit(out, acts::inform(d, slot, station_of(db_, *from)), "station");
    } else if (slot == slots::kToStation) {
      emit(out, acts::inform(d, slot, station_of(db_, *to)), "station");
    } else {
      emit(out, acts::inform(d, slot, slot == slots::kFrom ? *from : *to), "endpoint");
    }
  }
}

const Booking& Wizard::booking(const std::string& from, const std::string& to) {
  static constexpr std::array<std::string_view, 5> kColors = {"black", "white", "silver", "red",
                                                              "blue"};
  static constexpr std::array<std::string_view, 4> kModels = {"sedan", "SUV", "hatchback",
                                                              "minivan"};
  static constexpr std::string_view kPlateChars = "0123456789ABCDEFGHJKLMNPQRSTUVWXYZ";
  const std::string key = from + "|" + to;
  auto it = state_.bookings.find(key);
  if (it != state_.bookings.end()) return it->second;
  Booking b;
  b.car_type = std::string(kColors[rng_.uniform(kColors.size())]) + " " +
               std::string(kModels[rng_.uniform(kModels.size())]);
  b.plate = std::string(1, static_cast<char>('A' + rng_.uniform(26))) + "-";
  for (int i = 0; i < 5; ++i) b.plate += kPlateChars[rng_.uniform(kPlateChars.size())];
  return state_.bookings.emplace(key, std::move(b)).first->second;
}

std::string source_value(const db::Database& db, const SystemState& state, const DialogueAct& act,
                         const std::string& source) {
  const auto d = parse_domain(act.domain);
  if (source.find('#') != std::string::npos) return db::render_value(db, db.lookup(source), act.slot);
  if (!d) return "none";
  const Query& q = state.first(*d);
  const auto from = endpoint(q, slots::kFrom);
  const auto to = endpoint(q, slots::kTo);
  if (source == "booking" && from && to) {
    auto it = state.bookings.find(*from + "|" + *to);
    if (it == state.bookings.end()) return "none";
    return act.slot == slots::kCarType ? it->second.car_type : it->second.plate;
  }
  if (source == "station" && from && to) {
    return station_of(db, act.slot == slots::kFromStation ? *from : *to);
  }
  if (source == "endpoint") return act.slot == slots::kFrom ? from.value_or("none") : to.value_or("none");
  return "none";
}

// ---------------------------------------------------------------------------
// Serialization

json to_json(const db::Constraint& c) {
  json value;
  if (const auto* s = std::get_if<std::string>(&c.value)) {
    value = *s;
  } else if (const auto* v = std::get_if<double>(&c.value)) {
    value = *v;
  } else {
    value = std::get<db::EntityId>(c.value).str();
  }
  return json::array({c.slot, db::to_string(c.matcher), value});
}

db::Constraint constraint_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("constraint must be [slot, matcher, value]: " + j.dump());
  }
  db::Constraint c{j[0].get<std::string>(), db::matcher_from_string(j[1].get<std::string>()),
                   std::string()};
  if (c.matcher == db::Matcher::NearbyOf) {
    c.value = db::EntityId::parse(j[2].get<std::string>());
  } else if (j[2].is_number()) {
    c.value = j[2].get<double>();
  } else {
    c.value = j[2].get<std::string>();
  }
  return c;
}

json to_json(const SystemState& s) {
  json queries = json::object();
  for (const auto& [d, qs] : s.queries) {
    json list = json::array();
    for (const auto& q : qs) {
      json cs = json::array();
      for (const auto& c : q) cs.push_back(to_json(c));
      list.push_back(std::move(cs));
    }
    queries[std::string(xdial::to_string(d))] = std::move(list);
  }
  auto ids = [](const std::map<Domain, db::EntityId>& m) {
    json out = json::object();
    for (const auto& [d, id] : m) out[std::string(xdial::to_string(d))] = id.str();
    return out;
  };
  json requested = json::array();
  for (const auto& [d, slot] : s.requested) requested.push_back({xdial::to_string(d), slot});
  json unresolved = json::array();
  for (const auto& [d, src] : s.unresolved) {
    unresolved.push_back({xdial::to_string(d), xdial::to_string(src)});
  }
  json touched = json::array();
  for (Domain d : s.touched) touched.push_back(xdial::to_string(d));
  json bookings = json::object();
  for (const auto& [k, b] : s.bookings) bookings[k] = {b.car_type, b.plate};
  return {{"turn", s.turn},           {"queries", std::move(queries)},
          {"selected", ids(s.selected)}, {"announced", ids(s.announced)},
          {"requested", requested},   {"unresolved", unresolved},
          {"touched", touched},       {"bookings", bookings}};
}

SystemState system_state_from_json(const json& j) {
  SystemState s;
  s.turn = j.value("turn", 0);
  const json queries = j.value("queries", json::object());
  for (const auto& [d, list] : queries.items()) {
    auto& qs = s.queries[domain_from_string(d)];
    for (const auto& q : list) {
      Query cs;
      for (const auto& c : q) cs.push_back(constraint_from_json(c));
      qs.push_back(std::move(cs));
    }
  }
  for (const char* key : {"selected", "announced"}) {
    const json m = j.value(key, json::object());
    auto& out = std::string_view(key) == "selected" ? s.selected : s.announced;
    for (const auto& [d, id] : m.items()) {
      out[domain_from_string(d)] = db::EntityId::parse(id.get<std::string>());
    }
  }
  for (const auto& r : j.value("requested", json::array())) {
    s.requested.emplace_back(domain_from_string(r[0].get<std::string>()), r[1].get<std::string>());
  }
  for (const auto& r : j.value("unresolved", json::array())) {
    s.unresolved.emplace_back(domain_from_string(r[0].get<std::string>()),
                              domain_from_string(r[1].get<std::string>()));
  }
  for (const auto& d : j.value("touched", json::array())) {
    s.touched.push_back(domain_from_string(d.get<std::string>()));
  }
  const json bookings = j.value("bookings", json::object());
  for (const auto& [k, b] : bookings.items()) {
    s.bookings[k] = {b[0].get<std::string>(), b[1].get<std::string>()};
  }
  return s;
}

}  // namespace xdial::wizard
