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

// Small hand-built databases shared by the unit tests.

#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "xdial/goal.hpp"
#include "xdial/venue_db.hpp"

namespace xdial::testing {

inline db::EntityId id(Domain d, std::uint32_t i) { return {d, i}; }

struct AttractionRow {
  std::string name;
  double rating;
  double fee;
  double duration;
};

// Five attractions, three restaurants, three hotels.
//   attraction#0 <-> hotel#0, hotel#1 ; attraction#0 <-> restaurant#0
//   attraction#1 <-> hotel#2
//   attraction#3 <-> hotel#0, hotel#2 ; attraction#3 <-> attraction#4
inline db::Database small_db() {
  using db::Entity;
  const Domain A = Domain::Attraction, R = Domain::Restaurant, H = Domain::Hotel;
  const std::vector<AttractionRow> rows = {{"Jade Park", 4.5, 0, 2},
                                           {"Stone Temple", 4.8, 40, 3},
                                           {"Old Bell Tower", 4.0, 0, 1},
                                           {"Lake Garden", 4.6, 0, 2},
                                           {"Silk Museum", 3.5, 20, 1}};
  std::array<std::vector<Entity>, 3> venues;
  for (std::uint32_t i = 0; i < rows.size(); ++i) {
    Entity e;
    e.id = id(A, i);
    e.values = {{"name", rows[i].name},
                {"rating", rows[i].rating},
                {"fee", rows[i].fee},
                {"duration", rows[i].duration},
                {"address", "No. " + std::to_string(i + 1) + " Park Road"},
                {"phone", "010-1000" + std::to_string(i)}};
    e.x = 0.1 * i;
    e.y = 0.1 * i;
    venues[0].push_back(std::move(e));
  }
  const std::vector<std::tuple<std::string, double, double, std::vector<std::string>>> rests = {
      {"Golden Duck", 4.7, 120, {"roast duck", "noodles"}},
      {"Green Bowl", 4.1, 45, {"noodles"}},
      {"River Fish House", 4.4, 90, {"boiled fish"}}};
  for (std::uint32_t i = 0; i < rests.size(); ++i) {
    Entity e;
    e.id = id(R, i);
    e.values = {{"name", std::get<0>(rests[i])},
                {"rating", std::get<1>(rests[i])},
                {"cost", std::get<2>(rests[i])},
                {"dishes", std::get<3>(rests[i])},
                {"address", "No. " + std::to_string(i + 1) + " Food Street"},
                {"phone", "010-2000" + std::to_string(i)},
                {"open", "10:00-22:00"}};
    e.x = 0.5 + 0.1 * i;
    e.y = 0.2;
    venues[1].push_back(std::move(e));
  }
  const std::vector<std::tuple<std::string, double, double, std::string, bool>> hotels = {
      {"Sunrise Inn", 4.2, 300, "budget", true},
      {"Grand Palace Hotel", 4.8, 900, "luxury", false},
      {"Quiet Courtyard", 4.5, 500, "boutique", true}};
  for (std::uint32_t i = 0; i < hotels.size(); ++i) {
    Entity e;
    e.id = id(H, i);
    e.values = {{"name", std::get<0>(hotels[i])},
                {"rating", std::get<1>(hotels[i])},
                {"price", std::get<2>(hotels[i])},
                {"type", std::get<3>(hotels[i])},
                {"wake-up call", std::get<4>(hotels[i])},
                {"phone", "010-3000" + std::to_string(i)},
                {"address", "No. " + std::to_string(i + 1) + " Hotel Lane"}};
    e.x = 0.3;
    e.y = 0.6 + 0.1 * i;
    venues[2].push_back(std::move(e));
  }
  auto link = [&](db::EntityId a, db::EntityId b) {
    venues[static_cast<std::size_t>(a.domain)][a.index].nearby[b.domain].push_back(b);
    venues[static_cast<std::size_t>(b.domain)][b.index].nearby[a.domain].push_back(a);
  };
  link(id(A, 0), id(H, 0));
  link(id(A, 0), id(H, 1));
  link(id(A, 0), id(R, 0));
  link(id(A, 1), id(H, 2));
  link(id(A, 3), id(H, 0));
  link(id(A, 3), id(H, 2));
  link(id(A, 3), id(A, 4));
  std::vector<db::MetroStation> stations = {{"North Gate", 0.0, 0.0}, {"South Gate", 1.0, 1.0}};
  std::map<db::EntityId, std::string> metro;
  for (const auto& list : venues) {
    for (const auto& e : list) metro[e.id] = e.x + e.y < 1.0 ? "North Gate" : "South Gate";
  }
  return db::Database(std::move(venues), std::move(stations), std::move(metro));
}

// The ten-tuple attraction + hotel + taxi goal used across the suites.
inline goal::TupleList table2_goal() {
  using goal::Blank;
  using goal::CrossRef;
  using goal::Relation;
  using goal::SemanticTuple;
  const Domain A = Domain::Attraction, H = Domain::Hotel, T = Domain::Taxi;
  return {SemanticTuple{1, A, "fee", std::string("free")},
          SemanticTuple{1, A, "name", Blank{}},
          SemanticTuple{1, A, "nearby hotels", Blank{}},
          SemanticTuple{2, H, "name", CrossRef{1, Relation::Nearby}},
          SemanticTuple{2, H, "wake-up call", std::string("yes")},
          SemanticTuple{2, H, "rating", Blank{}},
          SemanticTuple{3, T, "from", CrossRef{1, Relation::AtEntity}},
          SemanticTuple{3, T, "to", CrossRef{2, Relation::AtEntity}},
          SemanticTuple{3, T, "car type", Blank{}},
          SemanticTuple{3, T, "plate number", Blank{}}};
}

}  // namespace xdial::testing
