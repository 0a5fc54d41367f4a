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

#include "xdial/user_state.hpp"

namespace xdial::user {

using nlohmann::json;

namespace {

json optional_text(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> text_or_null(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

}  // namespace

json to_json(const UserState& s) {
  json tuples = json::array();
  for (const TupleState& t : s.tuples) {
    json row = goal::to_json(t.tuple);
    row.push_back(optional_text(t.fill));
    row.push_back(optional_text(t.anchor));
    tuples.push_back(std::move(row));
  }
  json log = json::array();
  for (const GoalChange& c : s.change_log) {
    log.push_back({{"turn", c.turn},
                   {"before", goal::to_json(c.before)},
                   {"after", c.after ? goal::to_json(*c.after) : json(nullptr)}});
  }
  return {{"tuples", std::move(tuples)},
          {"goal_changed", s.goal_changed},
          {"change_log", std::move(log)},
          {"turn", s.turn},
          {"ignored_acts", s.ignored_acts}};
}

UserState user_state_from_json(const json& j) {
  UserState s;
  for (const json& row : j.at("tuples")) {
    if (!row.is_array() || row.size() != 7) {
      throw std::invalid_argument("user state row must have 7 elements: " + row.dump());
    }
    json head = json::array();
    for (std::size_t i = 0; i < 5; ++i) head.push_back(row[i]);
    s.tuples.push_back({goal::tuple_from_json(head), text_or_null(row[5]), text_or_null(row[6])});
  }
  s.goal_changed = j.value("goal_changed", false);
  for (const json& c : j.value("change_log", json::array())) {
    GoalChange g;
    g.turn = c.at("turn").get<int>();
    g.before = goal::tuple_from_json(c.at("before"));
    if (!c.at("after").is_null()) g.after = goal::tuple_from_json(c["after"]);
    s.change_log.push_back(std::move(g));
  }
  s.turn = j.value("turn", 0);
  s.ignored_acts = j.value("ignored_acts", 0);
  return s;
}

}  // namespace xdial::user
