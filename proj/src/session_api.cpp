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

#include "xdial/session_api.hpp"

#include <algorithm>
#include <set>

#include "xdial/annotation.hpp"
#include "xdial/rng.hpp"
#include "xdial/sim_harness.hpp"
#include "xdial/template_nlg.hpp"

namespace xdial::api {

using nlohmann::json;

std::string_view to_string(Role r) { return r == Role::User ? "user" : "wizard"; }

Role role_from_string(std::string_view s) {
  if (s == "user") return Role::User;
  if (s == "wizard") return Role::Wizard;
  throw ApiError(400, "role must be \"user\" or \"wizard\", got \"" + std::string(s) + "\"");
}

json error_body(const ApiError& e) {
  return {{"api_version", kApiVersion}, {"error", {{"status", e.status()}, {"message", e.what()}}}};
}

namespace {

void check_version(const json& request) {
  if (!request.is_object()) throw ApiError(400, "request body must be a JSON object");
  if (request.contains("api_version") && request["api_version"] != kApiVersion) {
    throw ApiError(400, "unsupported api_version " + request["api_version"].dump());
  }
}

bool selectable(const user::TupleState& t) {
  if (t.tuple.is_cross_ref()) return t.anchor.has_value() && (!t.tuple.expressed || !t.fill.has_value());
  if (!t.tuple.expressed) return true;
  return t.tuple.is_blank() && !t.fill.has_value();
}

int query_count(const wizard::SystemState& s) {
  int n = 0;
  for (Domain d : s.touched) {
    if (auto it = s.queries.find(d); it != s.queries.end()) n = std::max(n, static_cast<int>(it->second.size()));
  }
  return n;
}

json turn_view(const corpus::Turn& t) {
  return {{"role", std::string(corpus::to_string(t.role))}, {"acts", to_json(t.acts)}, {"utterance", t.utterance}};
}

}  // namespace

class Session {
 public:
  Session(const db::Database& db, std::string id, Role role, goal::UserGoal goal, std::uint64_t seed,
          int max_turns)
      : db_(db),
        role_(role),
        seed_(seed),
        max_turns_(max_turns),
        us_(user::init_state(goal)),
        user_rng_(Rng::derive(seed, 2)),
        nlg_rng_(Rng::derive(seed, 3)) {
    rec_.id = std::move(id);
    rec_.goal = std::move(goal);
    rec_.meta.source = corpus::Source::Human;
    rec_.meta.seed = seed;
    rec_.meta.extra["human_role"] = std::string(to_string(role));
    rec_.meta.extra["max_turns"] = max_turns;
    if (role == Role::User) {
      wiz_ = std::make_unique<wizard::Wizard>(db, wizard::Mode::Rule, Rng::derive(seed, 1));
    } else {
      simulated_user_turn();
    }
  }

  json post(const json& request) {
    std::lock_guard lock(mu_);
    if (closed_) throw ApiError(409, "session " + rec_.id + " is finished");
    if (request.contains("role") && role_from_string(request["role"].get<std::string>()) != role_) {
      throw ApiError(409, "out of turn: session " + rec_.id + " expects a " + std::string(to_string(role_)) +
                              " turn");
    }
    if (request.contains("turn") && request["turn"] != rec_.turns.size()) {
      throw ApiError(409, "out of turn: next turn is " + std::to_string(rec_.turns.size()) + ", got " +
                              request["turn"].dump());
    }
    const corpus::Turn* reply = role_ == Role::User ? human_user_turn(request) : human_wizard_turn(request);
    return {{"api_version", kApiVersion}, {"reply", reply ? turn_view(*reply) : json()}, {"state", view()}};
  }

  json state() const {
    std::lock_guard lock(mu_);
    return view();
  }

  json export_corpus() const {
    std::lock_guard lock(mu_);
    corpus::DialogueRecord r = rec_;
    r.meta.finished = finished_;
    r.meta.failure = failure_;
    return corpus::export_corpus({r});
  }

 private:
  json view() const {
    json transcript = json::array();
    for (const auto& t : rec_.turns) transcript.push_back(turn_view(t));
    json j = {{"api_version", kApiVersion},
              {"id", rec_.id},
              {"role", std::string(to_string(role_))},
              {"seed", seed_},
              {"max_turns", max_turns_},
              {"finished", closed_ && finished_},
              {"closed", closed_},
              {"failure", failure_},
              {"turn", rec_.turns.size()},
              {"expecting", closed_ ? json() : json(std::string(to_string(role_)))},
              {"transcript", std::move(transcript)}};
    if (role_ == Role::User) {
      j["goal"] = goal::to_json(rec_.goal);
      j["user_state"] = user::to_json(us_);
      json sel = json::array();
      for (std::size_t i = 0; i < us_.tuples.size(); ++i) {
        if (selectable(us_.tuples[i])) sel.push_back(i);
      }
      j["selectable"] = std::move(sel);
      j["terminated"] = user::is_terminated(us_);
    } else {
      j["sys_state"] = wizard::to_json(sys_);
      json results = json::object();
      for (const auto& [d, qs] : sys_.queries) {
        if (!is_venue_domain(d)) continue;
        json per_query = json::array();
        for (const auto& q : qs) {
          json hits = json::array();
          for (const db::Entity* e : db::query(db_, d, q)) hits.push_back({{"id", e->id.str()}, {"name", e->name()}});
          per_query.push_back(std::move(hits));
        }
        results[std::string(xdial::to_string(d))] = std::move(per_query);
      }
      j["results"] = std::move(results);
    }
    return j;
  }

  std::string render(nlg::Role role, const ActList& acts) {
    try {
      return nlg::generate(nlg::TemplateStore::english(), role, acts, nlg_rng_);
    } catch (const nlg::NoTemplate&) {
      return "";
    }
  }

  void close(bool finished, std::string failure) {
    closed_ = true;
    finished_ = finished;
    failure_ = finished ? "" : std::move(failure);
  }

  bool at_cap() const { return static_cast<int>(rec_.turns.size()) >= max_turns_; }

  corpus::Turn& log_user(const ActList& acts, std::vector<std::size_t> selected) {
    corpus::Turn t;
    t.role = corpus::Speaker::User;
    t.acts = acts;
    t.user_state = us_;
    t.selected = std::move(selected);
    t.utterance = render(nlg::Role::User, acts);
    rec_.turns.push_back(std::move(t));
    return rec_.turns.back();
  }

  corpus::Turn& log_system(const ActList& acts, std::vector<std::string> sources, const wizard::SystemState& s) {
    corpus::Turn t;
    t.role = corpus::Speaker::System;
    t.acts = acts;
    t.sources = std::move(sources);
    t.sys_state = s;
    t.n_queries = query_count(s);
    t.utterance = render(nlg::Role::System, acts);
    rec_.turns.push_back(std::move(t));
    return rec_.turns.back();
  }

  void simulated_user_turn() {
    const auto u = user::respond(us_, user_rng_);
    user_terminated_ = u.terminated;
    log_user(u.acts, u.selected);
    if (at_cap()) close(u.terminated && user::is_terminated(us_), "max-turns");
  }

  std::vector<std::size_t> parse_selection(const json& request) const {
    std::vector<std::size_t> out;
    if (request.contains("selected")) {
      if (!request["selected"].is_array()) throw ApiError(400, "\"selected\" must be an array of tuple indices");
      for (const auto& v : request["selected"]) {
        if (!v.is_number_integer() || v.get<long>() < 0 || v.get<std::size_t>() >= us_.tuples.size()) {
          throw ApiError(400, "no tuple at index " + v.dump());
        }
        out.push_back(v.get<std::size_t>());
      }
    }
    if (request.contains("tuples")) {
      if (!request["tuples"].is_array()) throw ApiError(400, "\"tuples\" must be an array");
      for (const auto& t : request["tuples"]) {
        if (!t.is_array() || t.size() < 3 || t.size() > 4 || !t[0].is_number_integer() || !t[1].is_string() ||
            !t[2].is_string()) {
          throw ApiError(400, "tuple must be [subgoal, domain, slot, value?]: " + t.dump());
        }
        const int sub = t[0].get<int>();
        const auto d = parse_domain(t[1].get<std::string>());
        const auto slot = t[2].get<std::string>();
        auto it = std::find_if(us_.tuples.begin(), us_.tuples.end(), [&](const user::TupleState& s) {
          return d && s.tuple.subgoal == sub && s.tuple.domain == *d && s.tuple.slot == slot;
        });
        if (it == us_.tuples.end()) throw ApiError(400, "no such tuple in the goal: " + t.dump());
        if (t.size() == 4 && it->tuple.is_concrete() && t[3] != std::get<std::string>(it->tuple.value)) {
          throw ApiError(400, "tuple value does not match the goal: " + t.dump());
        }
        out.push_back(static_cast<std::size_t>(it - us_.tuples.begin()));
      }
    }
    std::set<std::size_t> seen;
    for (std::size_t i : out) {
      if (!seen.insert(i).second) throw ApiError(400, "tuple " + std::to_string(i) + " selected twice");
      if (!selectable(us_.tuples[i])) {
        throw ApiError(400, "tuple " + std::to_string(i) + " cannot be expressed now: " +
                                goal::to_json(us_.tuples[i].tuple).dump());
      }
    }
    return out;
  }

  const corpus::Turn* human_user_turn(const json& request) {
    auto selected = parse_selection(request);
    ActList acts;
    bool terminated = false;
    if (selected.empty()) {
      if (!user::is_terminated(us_)) throw ApiError(400, "select at least one tuple");
      acts = {acts::general(acts::kThank), acts::general(acts::kBye)};
      terminated = true;
    } else {
      for (std::size_t i : selected) us_.tuples[i].tuple.expressed = true;
      acts = annotation::derive_user_das(us_.tuples, selected);
    }
    ++us_.turn;
    log_user(acts, std::move(selected));
    if (at_cap()) {
      close(terminated, "max-turns");
      return nullptr;
    }
    const auto s = wiz_->respond(acts);
    const corpus::Turn& reply = log_system(s.acts, s.sources, wiz_->state());
    if (terminated) {
      close(true, "");
      return &reply;
    }
    user::receive(us_, s.acts, db_);
    if (at_cap()) close(false, "max-turns");
    return &reply;
  }

  const corpus::Turn* human_wizard_turn(const json& request) {
    wizard::SystemState next = sys_;
    next.requested.clear();
    next.unresolved.clear();
    next.touched.clear();
    ActList acts;
    try {
      if (!request.contains("acts")) throw ApiError(400, "a wizard turn needs \"acts\"");
      acts = acts_from_json(request["acts"]);
      if (request.contains("queries")) {
        const json queries = request["queries"];
        if (!queries.is_object()) throw ApiError(400, "\"queries\" must map domains to query lists");
        for (const auto& [name, list] : queries.items()) {
          const Domain d = domain_from_string(name);
          std::vector<wizard::Query> qs;
          for (const auto& q : list) {
            wizard::Query query;
            for (const auto& c : q) {
              query.push_back(wizard::constraint_from_json(c));
              db::check_constraint(d, query.back());
            }
            qs.push_back(std::move(query));
          }
          next.queries[d] = std::move(qs);
        }
      }
      if (request.contains("selected")) {
        const json selected = request["selected"];
        if (!selected.is_object()) throw ApiError(400, "\"selected\" must map domains to entity ids");
        for (const auto& [name, id] : selected.items()) {
          const Domain d = domain_from_string(name);
          const auto eid = db::EntityId::parse(id.get<std::string>());
          if (eid.domain != d || !db_.find(eid)) throw ApiError(400, "no " + name + " entity " + id.dump());
          next.selected[d] = eid;
        }
      }
    } catch (const ApiError&) {
      throw;
    } catch (const std::exception& e) {
      throw ApiError(400, std::string("malformed wizard turn: ") + e.what());
    }
    std::vector<std::string> sources;
    for (const auto& a : acts) {
      std::string src = "none";
      const auto d = parse_domain(a.domain);
      if (d) {
        if (std::find(next.touched.begin(), next.touched.end(), *d) == next.touched.end()) next.touched.push_back(*d);
        if (auto it = next.selected.find(*d); it != next.selected.end() && a.value != "none") {
          if (db::render_value(db_, db_.lookup(it->second), a.slot) == a.value) {
            src = it->second.str();
            if (a.slot == slots::kName) next.announced[*d] = it->second;
          }
        }
      }
      sources.push_back(std::move(src));
    }
    ++next.turn;
    user::UserState after = us_;
    if (!user_terminated_) {
      try {
        user::receive(after, acts, db_);
      } catch (const std::exception& e) {
        throw ApiError(400, std::string("the user cannot read these acts: ") + e.what());
      }
    }
    sys_ = std::move(next);
    log_system(acts, std::move(sources), sys_);
    if (user_terminated_) {
      close(user::is_terminated(us_), "");
      return nullptr;
    }
    us_ = std::move(after);
    if (at_cap()) {
      close(false, "max-turns");
      return nullptr;
    }
    simulated_user_turn();
    return &rec_.turns.back();
  }

  const db::Database& db_;
  Role role_;
  std::uint64_t seed_;
  int max_turns_;
  user::UserState us_;
  Rng user_rng_;
  Rng nlg_rng_;
  std::unique_ptr<wizard::Wizard> wiz_;
  wizard::SystemState sys_;
  corpus::DialogueRecord rec_;
  bool user_terminated_ = false;
  bool closed_ = false;
  bool finished_ = false;
  std::string failure_;
  mutable std::mutex mu_;
};

SessionManager::SessionManager(const db::Database& db, goal::GoalGenConfig goals)
    : db_(db), goals_(std::move(goals)) {}

SessionManager::~SessionManager() = default;

json SessionManager::open_session(const json& request) {
  check_version(request);
  if (!request.contains("role") || !request["role"].is_string()) {
    throw ApiError(400, "open needs \"role\": \"user\" or \"wizard\"");
  }
  const Role role = role_from_string(request["role"].get<std::string>());
  std::unique_lock lock(mu_);
  const std::uint64_t n = next_++;
  lock.unlock();
  std::uint64_t seed = Rng::derive(0x5e55, n);
  int max_turns = 40;
  goal::UserGoal g;
  try {
    if (request.contains("seed")) seed = request["seed"].get<std::uint64_t>();
    if (request.contains("max_turns")) max_turns = request["max_turns"].get<int>();
    if (max_turns < 2) throw ApiError(400, "max_turns must be at least 2");
    if (request.contains("goal")) {
      g = goal::goal_from_json(request["goal"]);
      const auto problems = goal::validate_goal(g.tuples, goals_.max_subgoals);
      if (!problems.empty()) throw ApiError(400, "invalid goal: " + problems.front());
    } else if (request.contains("goal_type")) {
      const auto type = goal::goal_type_from_string(request["goal_type"].get<std::string>());
      g = sim::sample_goal_of_type(goals_, db_, type, Rng::derive(seed, 0));
    } else {
      goal::GoalGenConfig c = goals_;
      c.seed = Rng::derive(seed, 0);
      g = goal::generate_goal(c, db_);
    }
  } catch (const ApiError&) {
    throw;
  } catch (const std::exception& e) {
    throw ApiError(400, std::string("malformed open request: ") + e.what());
  }
  const std::string id = "s" + std::to_string(n);
  auto session = std::make_unique<Session>(db_, id, role, std::move(g), seed, max_turns);
  json view = session->state();
  lock.lock();
  sessions_.emplace(id, std::move(session));
  return view;
}

Session& SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "unknown session \"" + id + "\"");
  return *it->second;
}

json SessionManager::post_turn(const std::string& id, const json& request) {
  Session& s = find(id);
  check_version(request);
  try {
    return s.post(request);
  } catch (const json::exception& e) {
    throw ApiError(400, std::string("malformed turn: ") + e.what());
  }
}

json SessionManager::state(const std::string& id) const { return find(id).state(); }

json SessionManager::export_session(const std::string& id) const { return find(id).export_corpus(); }

std::size_t SessionManager::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace xdial::api
