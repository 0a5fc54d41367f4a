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

namespace xdial::user {
namespace {

using goal::Blank;
using goal::CrossRef;
using goal::Relation;
using goal::SemanticTuple;

constexpr Domain A = Domain::Attraction;
constexpr Domain R = Domain::Restaurant;
constexpr Domain H = Domain::Hotel;
constexpr Domain T = Domain::Taxi;

goal::UserGoal table2() { return {testing::table2_goal(), "", goal::GoalType::CMT}; }

const TupleState& row(const UserState& s, int subgoal, std::string_view slot) {
  for (const auto& t : s.tuples) {
    if (t.tuple.subgoal == subgoal && t.tuple.slot == slot) return t;
  }
  throw std::out_of_range(std::string(slot));
}

bool has_row(const UserState& s, int subgoal, std::string_view slot) {
  for (const auto& t : s.tuples) {
    if (t.tuple.subgoal == subgoal && t.tuple.slot == slot) return true;
  }
  return false;
}

constexpr UserPolicy kTwoPerTurn{{0.0, 1.0, 0.0}};
constexpr UserPolicy kThreePerTurn{{0.0, 0.0, 1.0}};

TEST(InitState, CopiesTheGoal) {
  const UserState s = init_state(table2());
  ASSERT_EQ(s.tuples.size(), 10u);
  for (std::size_t i = 0; i < s.tuples.size(); ++i) {
    EXPECT_EQ(s.tuples[i].tuple, testing::table2_goal()[i]);
    EXPECT_FALSE(s.tuples[i].tuple.expressed);
    EXPECT_FALSE(s.tuples[i].fill);
  }
  EXPECT_FALSE(s.goal_changed);
  EXPECT_TRUE(s.change_log.empty());
  EXPECT_EQ(active_subgoal(s), 1);
}

TEST(IsPending, ConcreteUntilExpressed) {
  TupleState t{SemanticTuple{1, A, "fee", std::string("free")}, {}, {}};
  EXPECT_TRUE(is_pending(t));
  t.tuple.expressed = true;
  EXPECT_FALSE(is_pending(t));
}

TEST(IsPending, BlankUntilFilledEvenIfNeverAsked) {
  TupleState t{SemanticTuple{1, A, "name", Blank{}}, {}, {}};
  EXPECT_TRUE(is_pending(t));
  t.tuple.expressed = true;
  EXPECT_TRUE(is_pending(t));
  t.tuple.expressed = false;
  t.fill = "Jade Park";
  EXPECT_FALSE(is_pending(t));
}

TEST(IsPending, CrossRefUntilExpressedAndFilled) {
  TupleState t{SemanticTuple{2, H, "name", CrossRef{1, Relation::Nearby}}, {}, std::string("Jade Park")};
  EXPECT_TRUE(is_pending(t));
  t.tuple.expressed = true;
  EXPECT_TRUE(is_pending(t));
  t.fill = "Sunrise Inn";
  EXPECT_FALSE(is_pending(t));
}

TEST(Respond, FirstTurnInformsBeforeRequesting) {
  UserState s = init_state(table2());
  Rng rng(1);
  const UserTurnOutput out = respond(s, rng, kTwoPerTurn);
  EXPECT_FALSE(out.terminated);
  EXPECT_EQ(out.acts, (ActList{acts::inform(A, "fee", "free"), acts::request(A, "name")}));
  EXPECT_TRUE(row(s, 1, "fee").tuple.expressed);
  EXPECT_TRUE(row(s, 1, "name").tuple.expressed);
  EXPECT_FALSE(row(s, 1, "nearby hotels").tuple.expressed);
}

TEST(Respond, CountStaysWithinOneToThree) {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    UserState s = init_state(table2());
    const auto out = respond(s, rng);
    EXPECT_GE(out.acts.size(), 1u);
    EXPECT_LE(out.acts.size(), 3u);
  }
}

TEST(Receive, InformFillsBlankAndRecommendBindsCrossRefs) {
  UserState s = init_state(table2());
  const db::Database db = testing::small_db();
  receive(s, {acts::recommend(A, "Jade Park"), acts::recommend(A, "Lake Garden")}, db);
  EXPECT_EQ(row(s, 1, "name").fill, "Jade Park");
  EXPECT_EQ(row(s, 2, "name").anchor, "Jade Park");
  EXPECT_FALSE(row(s, 2, "name").fill);
  EXPECT_EQ(row(s, 3, "from").fill, "Jade Park");
  EXPECT_FALSE(row(s, 3, "to").anchor);

  receive(s, {acts::inform(A, "nearby hotels", "Sunrise Inn, Grand Palace Hotel")}, db);
  EXPECT_EQ(row(s, 1, "nearby hotels").fill, "Sunrise Inn, Grand Palace Hotel");
}

TEST(Receive, RepeatedInformIsIdempotent) {
  UserState s = init_state(table2());
  const db::Database db = testing::small_db();
  const ActList acts = {acts::inform(A, "name", "Jade Park"), acts::inform(A, "name", "Jade Park")};
  receive(s, acts, db);
  const UserState once = s;
  receive(s, acts, db);
  EXPECT_EQ(s, once);
}

TEST(Receive, UnknownDomainIsCounted) {
  UserState s = init_state(table2());
  receive(s, {acts::inform(R, "name", "Golden Duck"), acts::general(acts::kWelcome)},
          testing::small_db());
  EXPECT_EQ(s.ignored_acts, 1);
  EXPECT_EQ(s, [] {
    UserState f = init_state(table2());
    f.ignored_acts = 1;
    return f;
  }());
}

TEST(Receive, NewNameClearsStaleValues) {
  UserState s = init_state(table2());
  const db::Database db = testing::small_db();
  receive(s, {acts::inform(A, "name", "Jade Park"), acts::inform(A, "nearby hotels", "x")}, db);
  receive(s, {acts::inform(A, "name", "Lake Garden")}, db);
  EXPECT_EQ(row(s, 1, "name").fill, "Lake Garden");
  EXPECT_FALSE(row(s, 1, "nearby hotels").fill);
  EXPECT_EQ(row(s, 2, "name").anchor, "Lake Garden");
}

TEST(Receive, NoOfferDropsServiceFirst) {
  UserState s = init_state(table2());
  const db::Database db = testing::small_db();
  for (auto& t : s.tuples) t.tuple.expressed = t.tuple.subgoal == 1;
  receive(s, {acts::inform(A, "name", "Jade Park"), acts::inform(A, "nearby hotels", "x")}, db);
  ASSERT_EQ(active_subgoal(s), 2);
  receive(s, {acts::no_offer(H)}, db);
  EXPECT_TRUE(s.goal_changed);
  ASSERT_EQ(s.change_log.size(), 1u);
  EXPECT_EQ(s.change_log[0].before.slot, "wake-up call");
  EXPECT_FALSE(s.change_log[0].after);
  EXPECT_FALSE(has_row(s, 2, "wake-up call"));
  // Only the cross-ref remains; it is never given up.
  receive(s, {acts::no_offer(H)}, db);
  EXPECT_EQ(s.change_log.size(), 1u);
  EXPECT_TRUE(has_row(s, 2, "name"));
}

TEST(Compromise, ServiceThenNumericThenDrop) {
  goal::UserGoal g;
  g.tuples = {SemanticTuple{1, H, "name", Blank{}},
              SemanticTuple{1, H, "price", std::string("300 yuan or less")},
              SemanticTuple{1, H, "type", std::string("budget")},
              SemanticTuple{1, H, "wake-up call", std::string("yes")}};
  UserState s = init_state(g);
  const db::Database db = testing::small_db();
  ASSERT_TRUE(compromise(s, 1, db));
  EXPECT_FALSE(has_row(s, 1, "wake-up call"));
  ASSERT_TRUE(compromise(s, 1, db));
  EXPECT_EQ(std::get<std::string>(row(s, 1, "price").tuple.value), "500 yuan or less");
  ASSERT_TRUE(compromise(s, 1, db));
  EXPECT_EQ(std::get<std::string>(row(s, 1, "price").tuple.value), "900 yuan or less");
  ASSERT_TRUE(compromise(s, 1, db));
  EXPECT_FALSE(has_row(s, 1, "price"));
  ASSERT_TRUE(compromise(s, 1, db));
  EXPECT_FALSE(has_row(s, 1, "type"));
  EXPECT_FALSE(compromise(s, 1, db));
  EXPECT_EQ(s.change_log.size(), 5u);
}

TEST(Receive, OfferBreakingAConstraintIsAccepted) {
  goal::UserGoal g;
  g.tuples = {SemanticTuple{1, H, "name", Blank{}},
              SemanticTuple{1, H, "rating", std::string("4.5 or higher")},
              SemanticTuple{1, H, "price", std::string("300 yuan or less")}};
  UserState s = init_state(g);
  for (auto& t : s.tuples) t.tuple.expressed = true;
  const db::Database db = testing::small_db();
  receive(s, {acts::inform(H, "rating", "4.8"), acts::inform(H, "price", "900 yuan")}, db);
  EXPECT_EQ(std::get<std::string>(row(s, 1, "rating").tuple.value), "4.5 or higher");
  EXPECT_TRUE(row(s, 1, "rating").tuple.expressed);
  EXPECT_EQ(std::get<std::string>(row(s, 1, "price").tuple.value), "900 yuan or less");
  EXPECT_FALSE(row(s, 1, "price").tuple.expressed);
  EXPECT_TRUE(s.goal_changed);
}

TEST(Respond, CrossRefWaitsForReferentThenSelects) {
  UserState s = init_state(table2());
  const db::Database db = testing::small_db();
  Rng rng(3);
  respond(s, rng, kThreePerTurn);
  EXPECT_EQ(active_subgoal(s), 1);
  EXPECT_FALSE(row(s, 2, "name").tuple.expressed);
  receive(s, {acts::inform(A, "name", "Jade Park"), acts::inform(A, "nearby hotels", "Sunrise Inn")},
          db);
  ASSERT_EQ(active_subgoal(s), 2);
  const auto out = respond(s, rng, kTwoPerTurn);
  EXPECT_EQ(out.acts, (ActList{acts::select(H, A), acts::inform(H, "wake-up call", "yes")}));
}

TEST(Respond, UnansweredRequestIsAskedAgain) {
  UserState s = init_state({{SemanticTuple{1, A, "name", Blank{}}}, "", goal::GoalType::S});
  Rng rng(5);
  EXPECT_EQ(respond(s, rng).acts, ActList{acts::request(A, "name")});
  EXPECT_EQ(respond(s, rng).acts, ActList{acts::request(A, "name")});
}

TEST(Terminate, AllFilledGivesGoodbye) {
  UserState s = init_state(table2());
  const db::Database db = testing::small_db();
  receive(s,
          {acts::inform(A, "name", "Jade Park"), acts::inform(A, "nearby hotels", "Sunrise Inn"),
           acts::inform(H, "name", "Sunrise Inn"), acts::inform(H, "rating", "4.2"),
           acts::inform(T, "car type", "sedan"), acts::inform(T, "plate number", "AB-1")},
          db);
  EXPECT_TRUE(is_terminated(s));
  Rng rng(1);
  const auto out = respond(s, rng);
  EXPECT_TRUE(out.terminated);
  EXPECT_EQ(out.acts, (ActList{acts::general(acts::kThank), acts::general(acts::kBye)}));
}

TEST(Terminate, UnresolvedCrossRefBlocks) {
  UserState s = init_state(table2());
  EXPECT_FALSE(is_terminated(s));
  for (auto& t : s.tuples) {
    if (t.tuple.is_blank()) t.fill = "x";
  }
  EXPECT_FALSE(is_terminated(s));
  for (auto& t : s.tuples) {
    if (t.tuple.is_cross_ref()) t.fill = "y";
  }
  EXPECT_TRUE(is_terminated(s));
}

TEST(UserStateJson, RoundTrip) {
  UserState s = init_state(table2());
  const db::Database db = testing::small_db();
  receive(s, {acts::inform(A, "name", "Jade Park"), acts::no_offer(A)}, db);
  const UserState back = user_state_from_json(to_json(s));
  EXPECT_EQ(back, s);
  EXPECT_EQ(to_json(back).dump(), to_json(s).dump());
}

}  // namespace
}  // namespace xdial::user
