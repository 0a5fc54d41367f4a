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

#include "xdial/goal.hpp"

#include <algorithm>
#include <cassert>
#include <set>

#include "xdial/rng.hpp"

namespace xdial::goal {

std::string_view to_string(GoalType t) {
  switch (t) {
    case GoalType::S: return "S";
    case GoalType::M: return "M";
    case GoalType::MT: return "M+T";
    case GoalType::CM: return "CM";
    case GoalType::CMT: return "CM+T";
  }
  return "?";
}

GoalType goal_type_from_string(std::string_view s) {
  for (GoalType t : kAllGoalTypes) {
    if (to_string(t) == s) return t;
  }
  throw std::invalid_argument("unknown goal type: " + std::string(s));
}

double GoalGenConfig::cross(Domain source, Domain target) const {
  if (!is_venue_domain(source) || !is_venue_domain(target)) return 0.0;
  return p_cross[static_cast<std::size_t>(source)][static_cast<std::size_t>(target)];
}

void GoalGenConfig::validate() const {
  auto prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
  };
  double total = 0.0;
  for (double p : p_domain) prob(p, "p_domain"), total += p;
  if (total <= 0.0) throw std::invalid_argument("p_domain is zero for every domain");
  for (const auto& row : p_cross) {
    for (double p : row) prob(p, "p_cross");
  }
  if (p_cross[2][2] != 0.0) throw std::invalid_argument("p_cross hotel->hotel must be 0");
  prob(p_taxi, "p_taxi");
  prob(metro(), "p_metro");
  prob(p_name_informable, "p_name_informable");
  prob(p_request, "p_request");
  prob(p_nearby_request, "p_nearby_request");
  if (max_subgoals < 1) throw std::invalid_argument("max_subgoals must be >= 1");
  if (retry_budget < 1) throw std::invalid_argument("retry_budget must be >= 1");
  auto mass = [](std::span<const double> w, const char* what) {
    double s = 0.0;
    for (double x : w) {
      if (x < 0.0) throw std::invalid_argument(std::string(what) + " has a negative weight");
      s += x;
    }
    if (s <= 0.0) throw std::invalid_argument(std::string(what) + " has zero mass");
  };
  mass(n_informable, "n_informable");
  mass(n_cross_informable, "n_cross_informable");
}

// ---------------------------------------------------------------------------
// Generation

namespace {

constexpr std::string_view kServiceGroup = "@service";

struct Draft {
  int id = 0;
  Domain domain = Domain::Attraction;
  std::vector<std::pair<std::string, TupleValue>> informs;
  std::vector<std::string> requests;
  db::ConstraintSet constraints;
  int anchor = 0;
  std::vector<int> dependents;
};

std::vector<std::string_view> informable_pool(Domain d) {
  switch (d) {
    case Domain::Attraction: return {slots::kRating, slots::kFee, slots::kDuration};
    case Domain::Restaurant: return {slots::kRating, slots::kCost, slots::kDishes};
    case Domain::Hotel: return {slots::kRating, slots::kPrice, slots::kType, kServiceGroup};
    default: return {};
  }
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[rng.uniform(v.size())];
}

db::Constraint sample_constraint(Rng& rng, const db::Database& db, Domain d,
                                 std::string_view group) {
  if (group == kServiceGroup) {
    const auto services = hotel_services();
    const std::string_view s = services[rng.uniform(services.size())];
    return {std::string(s), db::Matcher::IsYes, std::string("yes")};
  }
  const SlotSpec& spec = slot_spec(d, group);
  if (spec.kind == SlotKind::Numeric) {
    const double v = pick(rng, db.observed_numbers(d, group));
    db::Matcher m = db::Matcher::AtMost;
    if (group == slots::kRating) m = db::Matcher::AtLeast;
    if (group == slots::kDuration || (group == slots::kFee && v == 0.0)) m = db::Matcher::Equals;
    return {spec.name, m, v};
  }
  const std::string& v = pick(rng, db.observed_values(d, group));
  return {spec.name, spec.kind == SlotKind::List ? db::Matcher::Contains : db::Matcher::Equals, v};
}

std::size_t slot_rank(Domain d, std::string_view slot) {
  const auto all = domain_slots(d);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].name == slot) return i;
  }
  return all.size();
}

/// Candidates of an anchor: entities meeting its constraints that also have
/// a matching nearby entity for every dependent.
std::vector<const db::Entity*> anchor_candidates(const db::Database& db, const Draft& anchor,
                                                 const std::vector<Draft>& drafts,
                                                 const Draft* extra) {
  std::vector<const Draft*> deps;
  for (int id : anchor.dependents) deps.push_back(&drafts[static_cast<std::size_t>(id - 1)]);
  if (extra) deps.push_back(extra);
  std::vector<const db::Entity*> out;
  for (const db::Entity* e : db::query(db, anchor.domain, anchor.constraints)) {
    bool ok = true;
    for (const Draft* dep : deps) {
      auto it = e->nearby.find(dep->domain);
      if (it == e->nearby.end()) {
        ok = false;
        break;
      }
      const bool hit = std::any_of(it->second.begin(), it->second.end(), [&](const db::EntityId& t) {
        const db::Entity& target = db.lookup(t);
        return std::all_of(dep->constraints.begin(), dep->constraints.end(),
                           [&](const db::Constraint& c) { return db::matches(db, target, c); });
      });
      if (!hit) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(e);
  }
  return out;
}

class Generator {
 public:
  Generator(const GoalGenConfig& cfg, const db::Database& db)
      : cfg_(cfg), db_(db), rng_(cfg.seed) {}

  TupleList run() {
    for (Domain d : kVenueDomains) {
      if (db_.size(d) == 0) {
        throw std::invalid_argument("database has no " + std::string(domain_noun(d)) + " entities");
      }
    }
    // Step 1.
    do {
      drafts_.clear();
      for (Domain d : kVenueDomains) {
        if (rng_.bernoulli(cfg_.p_domain[static_cast<std::size_t>(d)]) && room()) {
          drafts_.push_back(independent(d));
        }
      }
    } while (drafts_.empty());
    // Step 2.
    const std::size_t n_independent = drafts_.size();
    for (std::size_t i = 0; i < n_independent; ++i) {
      for (Domain target : kVenueDomains) {
        const Draft& anchor = drafts_[i];
        const double p = cfg_.cross(anchor.domain, target);
        if (p <= 0.0 || !room()) continue;
        if (std::find(anchor.requests.begin(), anchor.requests.end(), nearby_slot(target)) ==
            anchor.requests.end()) {
          continue;
        }
        if (!rng_.bernoulli(p)) continue;
        if (auto dep = nearby(static_cast<int>(i) + 1, target)) {
          drafts_[i].dependents.push_back(dep->id);
          drafts_.push_back(std::move(*dep));
        }
      }
    }
    // Step 3.
    std::vector<int> venue_ids;
    for (const Draft& d : drafts_) venue_ids.push_back(d.id);
    for (Domain d : {Domain::Taxi, Domain::Metro}) {
      const double p = d == Domain::Taxi ? cfg_.p_taxi : cfg_.metro();
      if (venue_ids.size() < 2 || !room() || !rng_.bernoulli(p)) continue;
      const std::size_t a = rng_.uniform(venue_ids.size());
      std::size_t b = rng_.uniform(venue_ids.size() - 1);
      if (b >= a) ++b;
      Draft t;
      t.id = static_cast<int>(drafts_.size()) + 1;
      t.domain = d;
      t.informs.emplace_back(std::string(slots::kFrom), CrossRef{venue_ids[a], Relation::AtEntity});
      t.informs.emplace_back(std::string(slots::kTo), CrossRef{venue_ids[b], Relation::AtEntity});
      if (d == Domain::Taxi) {
        t.requests = {std::string(slots::kCarType), std::string(slots::kPlate)};
      } else {
        t.requests = {std::string(slots::kFromStation), std::string(slots::kToStation)};
      }
      drafts_.push_back(std::move(t));
    }
    // Step 4.
    TupleList tuples;
    for (const Draft& d : drafts_) emit(d, tuples);
    return reorder_subgoals(std::move(tuples));
  }

 private:
  bool room() const { return static_cast<int>(drafts_.size()) < cfg_.max_subgoals; }

  void add_requests(Draft& g, bool cross) {
    std::set<std::string> used;
    for (const auto& [slot, v] : g.informs) used.insert(slot);
    if (!cross && !used.count(std::string(slots::kName))) g.requests.emplace_back(slots::kName);
    std::vector<std::string> pool;
    bool service = false;
    for (const SlotSpec& s : domain_slots(g.domain)) {
      if (s.name == slots::kName || used.count(s.name)) continue;
      if (s.kind == SlotKind::Service) {
        service = true;
        continue;
      }
      const double p = s.kind == SlotKind::Nearby ? cfg_.p_nearby_request : cfg_.p_request;
      pool.push_back(s.name);
      if (rng_.bernoulli(p)) g.requests.push_back(s.name);
    }
    if (service && rng_.bernoulli(cfg_.p_request)) {
      std::vector<std::string> free;
      for (std::string_view s : hotel_services()) {
        if (!used.count(std::string(s))) free.emplace_back(s);
      }
      g.requests.push_back(pick(rng_, free));
    }
    if (g.requests.empty()) {
      std::vector<std::string> plain;
      for (const auto& s : pool) {
        if (!nearby_target(s)) plain.push_back(s);
      }
      g.requests.push_back(pick(rng_, plain));
    }
  }

  void sample_informs(Draft& g, std::size_t n) {
    std::vector<std::string_view> pool = informable_pool(g.domain);
    n = std::min(n, pool.size());
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t j = k + rng_.uniform(pool.size() - k);
      std::swap(pool[k], pool[j]);
      g.constraints.push_back(sample_constraint(rng_, db_, g.domain, pool[k]));
    }
    for (const db::Constraint& c : g.constraints) {
      g.informs.emplace_back(c.slot, db::constraint_text(db_, c));
    }
  }

  Draft independent(Domain d) {
    for (int attempt = 0; attempt < cfg_.retry_budget; ++attempt) {
      Draft g;
      g.id = static_cast<int>(drafts_.size()) + 1;
      g.domain = d;
      if (rng_.bernoulli(cfg_.p_name_informable)) {
        const auto all = db_.entities(d);
        const std::string& name = all[rng_.uniform(all.size())].name();
        g.constraints.push_back({std::string(slots::kName), db::Matcher::Equals, name});
        g.informs.emplace_back(std::string(slots::kName), name);
      } else {
        sample_informs(g, rng_.weighted(cfg_.n_informable));
      }
      if (db::query(db_, d, g.constraints).empty()) continue;
      add_requests(g, false);
      return g;
    }
    throw GenerationError("no satisfiable " + std::string(domain_noun(d)) + " sub-goal within " +
                          std::to_string(cfg_.retry_budget) + " samples");
  }

  std::optional<Draft> nearby(int anchor_id, Domain target) {
    const Draft& anchor = drafts_[static_cast<std::size_t>(anchor_id - 1)];
    for (int attempt = 0; attempt <= cfg_.retry_budget; ++attempt) {
      Draft g;
      g.id = static_cast<int>(drafts_.size()) + 1;
      g.domain = target;
      g.anchor = anchor_id;
      g.informs.emplace_back(std::string(slots::kName), CrossRef{anchor_id, Relation::Nearby});
      // The last attempt keeps only the nearby relation.
      if (attempt < cfg_.retry_budget) sample_informs(g, rng_.weighted(cfg_.n_cross_informable));
      if (anchor_candidates(db_, anchor, drafts_, &g).empty()) continue;
      add_requests(g, true);
      return g;
    }
    return std::nullopt;
  }

  static void emit(const Draft& g, TupleList& out) {
    std::vector<SemanticTuple> informs, requests;
    for (const auto& [slot, v] : g.informs) informs.push_back({g.id, g.domain, slot, v, false});
    for (const auto& slot : g.requests) requests.push_back({g.id, g.domain, slot, Blank{}, false});
    auto by_rank = [&](const SemanticTuple& a, const SemanticTuple& b) {
      return slot_rank(g.domain, a.slot) < slot_rank(g.domain, b.slot);
    };
    std::stable_sort(informs.begin(), informs.end(), by_rank);
    std::stable_sort(requests.begin(), requests.end(), by_rank);
    out.insert(out.end(), informs.begin(), informs.end());
    out.insert(out.end(), requests.begin(), requests.end());
  }

  const GoalGenConfig& cfg_;
  const db::Database& db_;
  Rng rng_;
  std::vector<Draft> drafts_;
};

}  // namespace

UserGoal generate_goal(const GoalGenConfig& cfg, const db::Database& db) {
  cfg.validate();
  UserGoal g;
  g.tuples = Generator(cfg, db).run();
  g.type = classify_goal_type(g.tuples);
  g.description = render_description(g.tuples, DescriptionTemplates::english());
  return g;
}

// ---------------------------------------------------------------------------
// Structure

std::vector<int> subgoal_ids(std::span<const SemanticTuple> tuples) {
  std::vector<int> out;
  for (const auto& t : tuples) {
    if (std::find(out.begin(), out.end(), t.subgoal) == out.end()) out.push_back(t.subgoal);
  }
  return out;
}

std::optional<Domain> subgoal_domain(std::span<const SemanticTuple> tuples, int id) {
  for (const auto& t : tuples) {
    if (t.subgoal == id) return t.domain;
  }
  return std::nullopt;
}

TupleList reorder_subgoals(TupleList tuples) {
  const std::vector<int> ids = subgoal_ids(tuples);
  std::map<int, std::set<int>> deps;
  for (const auto& t : tuples) {
    deps[t.subgoal];
    if (auto* r = std::get_if<CrossRef>(&t.value)) {
      if (r->target != t.subgoal) deps[t.subgoal].insert(r->target);
    }
  }
  std::vector<int> order;
  std::set<int> done;
  auto ready = [&](int id) {
    if (done.count(id)) return false;
    return std::all_of(deps[id].begin(), deps[id].end(), [&](int d) { return done.count(d) > 0; });
  };
  auto emit = [&](auto&& self, int id) -> void {
    order.push_back(id);
    done.insert(id);
    for (bool progress = true; progress;) {
      progress = false;
      for (int r : ids) {
        if (deps[r].count(id) && ready(r)) {
          self(self, r);
          progress = true;
          break;
        }
      }
    }
  };
  while (order.size() < ids.size()) {
    auto it = std::find_if(ids.begin(), ids.end(), ready);
    assert(it != ids.end() && "circular sub-goal reference");
    if (it == ids.end()) throw std::logic_error("circular sub-goal reference");
    emit(emit, *it);
  }
  std::map<int, int> renumber;
  for (std::size_t i = 0; i < order.size(); ++i) renumber[order[i]] = static_cast<int>(i) + 1;
  TupleList out;
  out.reserve(tuples.size());
  for (int id : order) {
    for (const auto& t : tuples) {
      if (t.subgoal != id) continue;
      SemanticTuple c = t;
      c.subgoal = renumber[id];
      if (auto* r = std::get_if<CrossRef>(&c.value)) {
        if (auto f = renumber.find(r->target); f != renumber.end()) r->target = f->second;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

GoalType classify_goal_type(std::span<const SemanticTuple> tuples) {
  std::set<int> venue, traffic;
  bool cross = false;
  for (const auto& t : tuples) {
    if (is_venue_domain(t.domain)) {
      venue.insert(t.subgoal);
      cross = cross || t.is_cross_ref();
    } else {
      traffic.insert(t.subgoal);
    }
  }
  const bool has_traffic = !traffic.empty();
  if (cross) return has_traffic ? GoalType::CMT : GoalType::CM;
  if (venue.size() <= 1 && !has_traffic) return GoalType::S;
  return has_traffic ? GoalType::MT : GoalType::M;
}

std::vector<std::string> validate_goal(std::span<const SemanticTuple> tuples, int max_subgoals) {
  std::vector<std::string> errors;
  const std::vector<int> ids = subgoal_ids(tuples);
  if (ids.empty()) errors.push_back("goal has no sub-goals");
  if (static_cast<int>(ids.size()) > max_subgoals) {
    errors.push_back("goal has " + std::to_string(ids.size()) + " sub-goals");
  }
  std::map<int, std::size_t> position;
  for (std::size_t i = 0; i < ids.size(); ++i) position[ids[i]] = i;
  std::map<int, Domain> domain_of;
  std::map<int, int> blanks;
  int last = 0;
  std::set<int> closed;
  for (const auto& t : tuples) {
    const std::string where = "sub-goal " + std::to_string(t.subgoal) + " slot '" + t.slot + "'";
    if (t.subgoal != last) {
      if (closed.count(t.subgoal)) errors.push_back("sub-goal " + std::to_string(t.subgoal) + " is split");
      if (last) closed.insert(last);
      last = t.subgoal;
    }
    auto [it, fresh] = domain_of.emplace(t.subgoal, t.domain);
    if (!fresh && it->second != t.domain) errors.push_back(where + ": mixed domains");
    const SlotSpec* spec = find_slot(t.domain, t.slot);
    if (!spec) {
      errors.push_back(where + ": unknown slot");
      continue;
    }
    if (t.is_blank()) {
      ++blanks[t.subgoal];
      if (!spec->requestable) errors.push_back(where + ": blank on a non-requestable slot");
    } else if (!spec->informable) {
      errors.push_back(where + ": value on a non-informable slot");
    }
    if (const auto* r = std::get_if<CrossRef>(&t.value)) {
      if (!spec->cross_domain_capable) errors.push_back(where + ": cross-ref on a plain slot");
      auto p = position.find(r->target);
      if (p == position.end()) {
        errors.push_back(where + ": unresolved reference to " + std::to_string(r->target));
        continue;
      }
      if (p->second >= position[t.subgoal]) errors.push_back(where + ": referent does not precede");
      const auto target_domain = subgoal_domain(tuples, r->target);
      if (!target_domain || !is_venue_domain(*target_domain)) {
        errors.push_back(where + ": referent is not a venue sub-goal");
      }
      const Relation want = is_traffic_domain(t.domain) ? Relation::AtEntity : Relation::Nearby;
      if (r->relation != want) errors.push_back(where + ": wrong reference relation");
    }
  }
  for (int id : ids) {
    const Domain d = domain_of[id];
    if (is_venue_domain(d)) {
      if (blanks[id] == 0) errors.push_back("sub-goal " + std::to_string(id) + " has no requestable");
      continue;
    }
    std::optional<int> from, to;
    for (const auto& t : tuples) {
      if (t.subgoal != id) continue;
      if (const auto* r = std::get_if<CrossRef>(&t.value)) {
        if (t.slot == slots::kFrom) from = r->target;
        if (t.slot == slots::kTo) to = r->target;
      }
    }
    if (!from || !to) {
      errors.push_back("traffic sub-goal " + std::to_string(id) + " lacks from/to references");
    } else if (*from == *to) {
      errors.push_back("traffic sub-goal " + std::to_string(id) + " commutes to itself");
    }
    if (blanks[id] != 2) errors.push_back("traffic sub-goal " + std::to_string(id) + " requestables");
  }
  return errors;
}

db::Constraint tuple_constraint(const SemanticTuple& t) {
  const auto* v = std::get_if<std::string>(&t.value);
  if (!v) throw std::invalid_argument("tuple '" + t.slot + "' has no concrete value");
  return db::parse_constraint(t.domain, t.slot, *v);
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const SemanticTuple& t) {
  nlohmann::json value;
  if (const auto* s = std::get_if<std::string>(&t.value)) {
    value = *s;
  } else if (const auto* r = std::get_if<CrossRef>(&t.value)) {
    value = {{r->relation == Relation::Nearby ? "near" : "at", r->target}};
  }
  return nlohmann::json::array({t.subgoal, std::string(to_string(t.domain)), t.slot, value, t.expressed});
}

SemanticTuple tuple_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 5) {
    throw std::invalid_argument("semantic tuple must be a 5-element array: " + j.dump());
  }
  SemanticTuple t;
  t.subgoal = j[0].get<int>();
  t.domain = domain_from_string(j[1].get<std::string>());
  t.slot = j[2].get<std::string>();
  const auto& v = j[3];
  if (v.is_null()) {
    t.value = Blank{};
  } else if (v.is_string()) {
    t.value = v.get<std::string>();
  } else if (v.is_object() && v.contains("near")) {
    t.value = CrossRef{v["near"].get<int>(), Relation::Nearby};
  } else if (v.is_object() && v.contains("at")) {
    t.value = CrossRef{v["at"].get<int>(), Relation::AtEntity};
  } else {
    throw std::invalid_argument("bad semantic tuple value: " + v.dump());
  }
  t.expressed = j[4].get<bool>();
  return t;
}

nlohmann::json to_json(const TupleList& tuples) {
  auto out = nlohmann::json::array();
  for (const auto& t : tuples) out.push_back(to_json(t));
  return out;
}

TupleList tuples_from_json(const nlohmann::json& j) {
  TupleList out;
  for (const auto& t : j) out.push_back(tuple_from_json(t));
  return out;
}

nlohmann::json to_json(const UserGoal& g) {
  return {{"tuples", to_json(g.tuples)},
          {"description", g.description},
          {"goal_type", std::string(to_string(g.type))}};
}

UserGoal goal_from_json(const nlohmann::json& j) {
  UserGoal g;
  g.tuples = tuples_from_json(j.at("tuples"));
  g.description = j.value("description", "");
  g.type = j.contains("goal_type") ? goal_type_from_string(j["goal_type"].get<std::string>())
                                   : classify_goal_type(g.tuples);
  return g;
}

}  // namespace xdial::goal
