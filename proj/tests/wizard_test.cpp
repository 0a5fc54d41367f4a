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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "xdial/user_simulator.hpp"
#include "xdial/wizard_agent.hpp"

namespace xdial::wizard {
namespace {

using testing::id;

constexpr Domain A = Domain::Attraction;
constexpr Domain R = Domain::Restaurant;
constexpr Domain H = Domain::Hotel;
constexpr Domain T = Domain::Taxi;
constexpr Domain M = Domain::Metro;

db::Constraint nearby_of(db::EntityId e) {
  return {std::string(slots::kName), db::Matcher::NearbyOf, e};
}

TEST(Dst, InformWritesFirstQuery) {
  SystemState s;
  rule_dst_update(s, {acts::inform(A, "fee", "free")});
  ASSERT_EQ(s.first(A).size(), 1u);
  EXPECT_EQ(s.first(A)[0], (db::Constraint{"fee", db::Matcher::Equals, 0.0}));
  EXPECT_EQ(s.touched, std::vector<Domain>{A});
}

TEST(Dst, LaterInformReplacesSameSlot) {
  SystemState s;
  rule_dst_update(s, {acts::inform(H, "price", "300 yuan or less")});
  rule_dst_update(s, {acts::inform(H, "price", "500 yuan or less"), acts::request(H, "phone")});
  ASSERT_EQ(s.first(H).size(), 1u);
  EXPECT_EQ(s.first(H)[0], (db::Constraint{"price", db::Matcher::AtMost, 500.0}));
  EXPECT_EQ(s.requested, (std::vector<std::pair<Domain, std::string>>{{H, "phone"}}));
}

TEST(Dst, SelectBindsSelectedEntity) {
  SystemState s;
  s.selected[A] = id(A, 3);
  rule_dst_update(s, {acts::select(H, A), acts::inform(H, "wake-up call", "yes")});
  const Query want = {{"wake-up call", db::Matcher::IsYes, std::string("yes")}, nearby_of(id(A, 3))};
  EXPECT_EQ(s.first(H), want);
  EXPECT_TRUE(s.unresolved.empty());
}

TEST(Dst, SelectWithoutSelectionIsUnresolved) {
  SystemState s;
  rule_dst_update(s, {acts::select(H, A)});
  EXPECT_TRUE(s.first(H).empty());
  EXPECT_EQ(s.unresolved, (std::vector<std::pair<Domain, Domain>>{{H, A}}));
}

TEST(Dst, EmptyTurnKeepsState) {
  SystemState s;
  rule_dst_update(s, {acts::inform(A, "fee", "free")});
  const SystemState before = s;
  rule_dst_update(s, {});
  EXPECT_EQ(s.queries, before.queries);
}

TEST(Dst, ActsWithinTurnCommute) {
  SystemState a, b;
  a.selected[A] = b.selected[A] = id(A, 0);
  const ActList acts = {acts::select(H, A), acts::inform(H, "type", "budget"),
                        acts::request(H, "name")};
  ActList reversed(acts.rbegin(), acts.rend());
  rule_dst_update(a, acts);
  rule_dst_update(b, reversed);
  EXPECT_EQ(a.first(H), b.first(H));
}

TEST(Search, SatisfiableNeedsOneQuery) {
  const db::Database db = testing::small_db();
  SystemState s;
  rule_dst_update(s, {acts::inform(A, "fee", "free")});
  const SearchResult r = search_with_relaxation(s, db, A);
  EXPECT_EQ(s.queries[A].size(), 1u);
  ASSERT_EQ(r.results.size(), 3u);
  EXPECT_EQ(r.results[0]->id, id(A, 0));
  EXPECT_TRUE(r.relaxed.empty());
}

TEST(Search, UnsatisfiableRatingIsLoosenedOnce) {
  const db::Database db = testing::small_db();
  SystemState s;
  rule_dst_update(s, {acts::inform(H, "rating", "4.9 or higher")});
  const SearchResult r = search_with_relaxation(s, db, H);
  ASSERT_EQ(s.queries[H].size(), 2u);
  EXPECT_EQ(s.queries[H][0][0], (db::Constraint{"rating", db::Matcher::AtLeast, 4.9}));
  EXPECT_EQ(s.queries[H][1][0].slot, "rating");
  ASSERT_EQ(r.results.size(), 1u);
  EXPECT_EQ(r.results[0]->name(), "Grand Palace Hotel");
  EXPECT_EQ(r.relaxed, std::vector<std::string>{"rating"});
}

TEST(Search, ServicesAreRelaxedFirst) {
  const db::Database db = testing::small_db();
  SystemState s;
  rule_dst_update(s, {acts::inform(H, "type", "luxury"), acts::inform(H, "wake-up call", "yes")});
  const SearchResult r = search_with_relaxation(s, db, H);
  ASSERT_EQ(s.queries[H].size(), 2u);
  EXPECT_EQ(s.queries[H][1], (Query{{"type", db::Matcher::Equals, std::string("luxury")}}));
  EXPECT_EQ(r.relaxed, std::vector<std::string>{"wake-up call"});
}

TEST(Search, NearbyOfIsNeverRelaxed) {
  const db::Database db = testing::small_db();
  SystemState s;
  s.selected[A] = id(A, 2);  // Old Bell Tower has no hotels nearby.
  rule_dst_update(s, {acts::select(H, A), acts::inform(H, "wake-up call", "yes")});
  const SearchResult r = search_with_relaxation(s, db, H);
  EXPECT_TRUE(r.results.empty());
  EXPECT_EQ(s.queries[H].size(), 2u);
  EXPECT_EQ(s.queries[H].back(), Query{nearby_of(id(A, 2))});
}

TEST(Respond, RequestIsAnsweredFromSelectedEntity) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 1);
  const auto out = w.respond({acts::inform(A, "fee", "free"), acts::request(A, "fee")});
  EXPECT_EQ(out.acts, (ActList{acts::recommend(A, "Jade Park"), acts::recommend(A, "Old Bell Tower"),
                               acts::recommend(A, "Lake Garden"), acts::inform(A, "fee", "free")}));
  EXPECT_EQ(w.state().selected.at(A), id(A, 0));
  EXPECT_EQ(out.sources.size(), out.acts.size());
  EXPECT_FALSE(out.relaxed);
}

TEST(Respond, NarrowedQueryAnnouncesTheSameEntityAgain) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 1);
  w.respond({acts::inform(A, "fee", "free")});
  EXPECT_EQ(w.respond({acts::request(A, "rating")}).acts, ActList{acts::inform(A, "rating", "4.5")});
  const auto out = w.respond({acts::inform(A, "duration", "2")});
  EXPECT_EQ(out.acts, (ActList{acts::recommend(A, "Jade Park"), acts::recommend(A, "Lake Garden")}));
  EXPECT_EQ(w.state().selected.at(A), id(A, 0));
}

TEST(Respond, RepeatedRequestIsAnsweredOnce) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 1);
  w.respond({acts::inform(A, "fee", "free")});
  const auto out = w.respond({acts::request(A, "phone"), acts::request(A, "phone")});
  EXPECT_EQ(out.acts, ActList{acts::inform(A, "phone", "010-10000")});
  EXPECT_EQ(out.sources, std::vector<std::string>{"attraction#0"});
}

TEST(Respond, HotelNameUnderNearbyGivesRecommend) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 1);
  w.respond({acts::inform(A, "name", "Lake Garden")});
  const auto out = w.respond({acts::select(H, A), acts::request(H, "name")});
  EXPECT_EQ(out.acts, (ActList{acts::recommend(H, "Sunrise Inn"), acts::recommend(H, "Quiet Courtyard")}));
}

TEST(Respond, NoOfferWhenRelaxationFails) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 1);
  w.respond({acts::inform(A, "name", "Old Bell Tower")});
  const auto out = w.respond({acts::select(H, A), acts::request(H, "name")});
  EXPECT_EQ(out.acts, ActList{acts::no_offer(H)});
  EXPECT_FALSE(w.state().selected.contains(H));
}

TEST(Respond, RelaxedSlotsAreReported) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 1);
  const auto out = w.respond({acts::inform(H, "rating", "4.9 or higher")});
  EXPECT_TRUE(out.relaxed);
  EXPECT_EQ(out.acts, (ActList{acts::inform(H, "rating", "4.8"),
                               acts::inform(H, "name", "Grand Palace Hotel")}));
}

TEST(Respond, UnknownSlotThrows) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 1);
  EXPECT_THROW(w.respond({acts::request(A, "wifi")}), std::invalid_argument);
}

TEST(Respond, TaxiBookingIsStable) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 9);
  const auto a = w.respond({acts::inform(T, "from", "Jade Park"), acts::inform(T, "to", "Sunrise Inn"),
                            acts::request(T, "car type")});
  const auto b = w.respond({acts::request(T, "car type"), acts::request(T, "plate number")});
  ASSERT_EQ(a.acts.size(), 1u);
  ASSERT_EQ(b.acts.size(), 2u);
  EXPECT_EQ(a.acts[0], b.acts[0]);
  EXPECT_EQ(b.acts[1].slot, "plate number");
  EXPECT_EQ(source_value(db, w.state(), b.acts[1], b.sources[1]), b.acts[1].value);
}

TEST(Respond, TaxiAsksForMissingEndpoint) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 9);
  const auto out = w.respond({acts::inform(T, "from", "Jade Park"), acts::request(T, "car type")});
  EXPECT_EQ(out.acts, ActList{acts::request(T, "to")});
}

TEST(Respond, MetroStationsComeFromTheDatabase) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 9);
  const auto out = w.respond({acts::inform(M, "from", "Jade Park"),
                              acts::inform(M, "to", "Quiet Courtyard"),
                              acts::request(M, "from station"), acts::request(M, "to station")});
  EXPECT_EQ(out.acts, (ActList{acts::inform(M, "from station", "North Gate"),
                               acts::inform(M, "to station", "South Gate")}));
}

TEST(Respond, GeneralActsAreMirrored) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 1);
  const auto out = w.respond({acts::general(acts::kThank), acts::general(acts::kBye)});
  EXPECT_EQ(out.acts, (ActList{acts::general(acts::kWelcome), acts::general(acts::kBye)}));
}

TEST(Oracle, SearchesWithTheWholeSubgoalAndLooksAhead) {
  const db::Database db = testing::small_db();
  user::UserState view = user::init_state({testing::table2_goal(), "", goal::GoalType::CMT});
  Wizard w(db, Mode::Oracle, 1);
  // Only the name is asked; fee=free is still unsaid. Jade Park is first,
  // but the lookahead needs a nearby hotel with a wake-up call.
  view.tuples[1].tuple.expressed = true;
  const auto out = w.respond({acts::request(A, "name")}, &view);
  ASSERT_EQ(out.acts.size(), 1u);
  EXPECT_EQ(out.acts[0], acts::inform(A, "name", "Jade Park"));
  EXPECT_THROW(w.respond({}, nullptr), std::invalid_argument);
}

TEST(Oracle, LookaheadSkipsAnchorsWithoutNeighbours) {
  const db::Database db = testing::small_db();
  using goal::SemanticTuple;
  goal::UserGoal g;
  g.tuples = {SemanticTuple{1, A, "fee", std::string("free")},
              SemanticTuple{1, A, "duration", std::string("1 hour")},
              SemanticTuple{1, A, "name", goal::Blank{}}};
  user::UserState view = user::init_state(g);
  Wizard w(db, Mode::Oracle, 1);
  auto out = w.respond({acts::request(A, "name")}, &view);
  EXPECT_EQ(out.acts, ActList{acts::inform(A, "name", "Old Bell Tower")});

  // Jade Park also lasts two hours but has no attraction nearby.
  g.tuples = {SemanticTuple{1, A, "duration", std::string("2 hours")},
              SemanticTuple{1, A, "name", goal::Blank{}},
              SemanticTuple{2, A, "name", goal::CrossRef{1, goal::Relation::Nearby}}};
  view = user::init_state(g);
  Wizard w2(db, Mode::Oracle, 1);
  out = w2.respond({acts::request(A, "name")}, &view);
  EXPECT_EQ(out.acts, ActList{acts::inform(A, "name", "Lake Garden")});
}

TEST(StateJson, RoundTrip) {
  const db::Database db = testing::small_db();
  Wizard w(db, Mode::Rule, 3);
  w.respond({acts::inform(A, "fee", "free"), acts::request(A, "name")});
  w.respond({acts::select(H, A), acts::inform(H, "rating", "4.9 or higher")});
  w.respond({acts::inform(T, "from", "Jade Park"), acts::inform(T, "to", "Sunrise Inn"),
             acts::request(T, "plate number")});
  const SystemState& s = w.state();
  const SystemState back = system_state_from_json(to_json(s));
  EXPECT_EQ(back, s);
  EXPECT_EQ(to_json(back).dump(), to_json(s).dump());
}

}  // namespace
}  // namespace xdial::wizard
