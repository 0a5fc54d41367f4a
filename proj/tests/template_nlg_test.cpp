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

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "xdial/annotation.hpp"
#include "xdial/template_nlg.hpp"

namespace xdial::nlg {
namespace {

constexpr Domain A = Domain::Attraction;
constexpr Domain R = Domain::Restaurant;
constexpr Domain H = Domain::Hotel;
constexpr Domain T = Domain::Taxi;

ActList sorted(ActList a) {
  std::sort(a.begin(), a.end(), [](const DialogueAct& x, const DialogueAct& y) {
    return std::tie(x.intent, x.domain, x.slot, x.value) < std::tie(y.intent, y.domain, y.slot, y.value);
  });
  return a;
}

TEST(Delex, NameAndCostBecomePlaceholders) {
  const ActList acts = {acts::inform(R, "name", "Golden Duck"), acts::inform(R, "cost", "120 yuan")};
  const auto d = delexicalize(acts, "I suggest Golden Duck, it costs 120 yuan per person.");
  EXPECT_EQ(d.text, "I suggest $name, it costs $cost per person.");
  ASSERT_EQ(d.acts.size(), 2u);
  EXPECT_EQ(d.acts[0].slot, "cost");
  EXPECT_EQ(d.acts[0].placeholder, "$cost");
  EXPECT_EQ(d.acts[1].placeholder, "$name");
}

TEST(Delex, AbsentValueLeavesTextUnchanged) {
  const ActList acts = {acts::inform(R, "name", "Green Bowl")};
  const auto d = delexicalize(acts, "I suggest Golden Duck.");
  EXPECT_EQ(d.text, "I suggest Golden Duck.");
  EXPECT_EQ(d.acts[0].placeholder, "$name");
}

TEST(Delex, LongestValueWinsOverlap) {
  const ActList acts = {acts::inform(A, "name", "Jade Park"),
                        acts::inform(A, "nearby attractions", "Jade Park East")};
  const auto d = delexicalize(acts, "Near Jade Park East is Jade Park.");
  EXPECT_EQ(d.text, "Near $nearby_attractions is $name.");
}

TEST(Delex, RepeatedSlotsNumberedInOrder) {
  const ActList acts = {acts::recommend(H, "Sunrise Inn"), acts::recommend(H, "Quiet Courtyard")};
  const auto d = delexicalize(acts, "Try Quiet Courtyard or Sunrise Inn.");
  EXPECT_EQ(d.text, "Try $name_2 or $name.");
  EXPECT_EQ(lexicalize(d.text, acts), "Try Quiet Courtyard or Sunrise Inn.");
}

TEST(Delex, EqualValuesTakeLeftmostInActOrder) {
  const ActList acts = {acts::inform(A, "fee", "free"), acts::inform(H, "wake-up call", "free")};
  const auto d = delexicalize(acts, "The park is free and the call is free.");
  EXPECT_EQ(d.text, "The park is $fee and the call is $wake_up_call.");
}

TEST(Delex, KeyIgnoresOrderAndValues) {
  const ActList a = {acts::inform(R, "name", "X"), acts::request(R, "phone")};
  const ActList b = {acts::request(R, "phone"), acts::inform(R, "name", "Y")};
  EXPECT_EQ(delex_key(Role::System, a), delex_key(Role::System, b));
  EXPECT_EQ(delex_key(Role::System, a), "sys:Inform-Restaurant-name+Request-Restaurant-phone");
  EXPECT_NE(delex_key(Role::User, a), delex_key(Role::System, a));
}

TEST(Delex, RoundTripWhenValuesOccurOnce) {
  const ActList acts = {acts::inform(T, "from", "Jade Park"), acts::inform(T, "to", "Sunrise Inn"),
                        acts::request(T, "car type")};
  const std::string u = "A taxi from Jade Park to Sunrise Inn, what car is it?";
  EXPECT_EQ(lexicalize(delexicalize(acts, u).text, acts), u);
}

TEST(Generate, FullKeyIsDeterministicWithOneTemplate) {
  TemplateStore store;
  const ActList acts = {acts::inform(R, "name", "Golden Duck"), acts::inform(R, "cost", "120 yuan")};
  extract(store, Role::System, acts, "Golden Duck costs 120 yuan.");
  Rng rng(1);
  const ActList other = {acts::inform(R, "cost", "45 yuan"), acts::inform(R, "name", "Green Bowl")};
  EXPECT_EQ(generate(store, Role::System, other, rng), "Green Bowl costs 45 yuan.");
}

TEST(Generate, BacksOffToSingleActs) {
  TemplateStore store;
  store.add("sys:Inform-*-name", "Try $value.");
  store.add("sys:Inform-Restaurant-cost", "It costs $value.");
  store.add("sys:Inform-*-cost", "Wildcard $value.");
  Rng rng(1);
  const ActList acts = {acts::inform(R, "name", "Golden Duck"), acts::inform(R, "cost", "120 yuan")};
  EXPECT_EQ(generate(store, Role::System, acts, rng), "Try Golden Duck. It costs 120 yuan.");
}

TEST(Generate, IncompleteFullTemplateIsSkipped) {
  TemplateStore store;
  const ActList acts = {acts::inform(R, "name", "Golden Duck"), acts::inform(R, "cost", "120 yuan")};
  store.add(delex_key(Role::System, acts), "Only $name here.");
  store.add("sys:Inform-*-name", "Try $value.");
  store.add("sys:Inform-*-cost", "It costs $value.");
  Rng rng(1);
  EXPECT_EQ(generate(store, Role::System, acts, rng), "Try Golden Duck. It costs 120 yuan.");
}

TEST(Generate, ServiceBackoffAndDomainNoun) {
  TemplateStore store;
  store.add("usr:Request-*-@service", "Does the {domain} have {slot}?");
  Rng rng(1);
  EXPECT_EQ(generate(store, Role::User, {acts::request(H, "wake-up call")}, rng),
            "Does the hotel have wake-up call?");
}

TEST(Generate, MissingTemplateThrows) {
  TemplateStore store;
  Rng rng(1);
  EXPECT_THROW(generate(store, Role::User, {acts::request(H, "phone")}, rng), NoTemplate);
  EXPECT_EQ(generate(store, Role::User, {}, rng), "");
}

TEST(Generate, SameSeedSameText) {
  const ActList acts = {acts::recommend(H, "Sunrise Inn")};
  Rng a(7), b(7);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(generate(TemplateStore::english(), Role::System, acts, a),
              generate(TemplateStore::english(), Role::System, acts, b));
  }
}

TEST(Store, JsonRoundTripAndMerge) {
  TemplateStore a;
  a.add("usr:General-thank-none", "Thanks.");
  a.add("usr:General-thank-none", "Thanks.");
  TemplateStore b = TemplateStore::from_json(a.to_json());
  EXPECT_EQ(b.all(), a.all());
  TemplateStore c;
  c.add("usr:General-thank-none", "Thank you.");
  b.merge(c);
  ASSERT_NE(b.find("usr:General-thank-none"), nullptr);
  EXPECT_EQ(b.find("usr:General-thank-none")->size(), 2u);
}

// Every act the simulators emit has an English rendering, and user renderings
// parse back to the same acts.
TEST(English, UserActsSurviveTheTextChannel) {
  const auto db = testing::small_db();
  const auto& lex = annotation::Lexicon::english();
  const std::vector<ActList> cases = {
      {acts::inform(A, "fee", "free"), acts::request(A, "name")},
      {acts::inform(A, "rating", "4.5 or higher")},
      {acts::inform(A, "duration", "2 hours")},
      {acts::inform(R, "cost", "100 yuan or less"), acts::inform(R, "dishes", "roast duck")},
      {acts::inform(H, "price", "500 yuan or less"), acts::inform(H, "type", "budget")},
      {acts::inform(H, "wake-up call", "yes"), acts::request(H, "phone")},
      {acts::select(H, A), acts::request(H, "rating")},
      {acts::inform(A, "name", "Jade Park"), acts::request(A, "nearby hotels")},
      {acts::inform(T, "from", "Jade Park"), acts::inform(T, "to", "Sunrise Inn")},
      {acts::request(T, "car type"), acts::request(T, "plate number")},
      {acts::request(Domain::Metro, "from station")},
      {acts::general("thank"), acts::general("bye")},
  };
  for (const auto& want : cases) {
    Rng rng(3);
    const std::string text = generate(TemplateStore::english(), Role::User, want, rng);
    const std::optional<Domain> none;
    EXPECT_EQ(sorted(annotation::derive_user_das_from_text(text, db, none, lex)), sorted(want)) << text;
  }
}

TEST(English, CoversEverySystemInform) {
  Rng rng(5);
  for (Domain d : kAllDomains) {
    for (const auto& spec : domain_slots(d)) {
      if (is_traffic_domain(d) && (spec.name == "from" || spec.name == "to")) continue;
      EXPECT_NO_THROW(generate(TemplateStore::english(), Role::System, {acts::inform(d, spec.name, "x")}, rng))
          << to_string(d) << " " << spec.name;
      EXPECT_NO_THROW(generate(TemplateStore::english(), Role::User, {acts::request(d, spec.name)}, rng))
          << to_string(d) << " " << spec.name;
    }
  }
}

TEST(Bleu, SelfBleuIsOne) {
  const std::vector<std::string> hyps = {"the hotel is cheap", "thank you very much"};
  const std::vector<std::vector<std::string>> refs = {{"the hotel is cheap", "a cheap hotel"},
                                                      {"thank you very much"}};
  EXPECT_DOUBLE_EQ(corpus_bleu(hyps, refs), 1.0);
}

TEST(Bleu, OneWrongTokenByHand) {
  // Clipped matches per order: 4/5, 3/4, 2/3, 1/2; equal lengths.
  const double want = std::pow(4.0 / 5 * 3.0 / 4 * 2.0 / 3 * 1.0 / 2, 0.25);
  const std::vector<std::string> hyps = {"a b c d e"};
  const std::vector<std::vector<std::string>> refs = {{"a b c d f"}};
  EXPECT_NEAR(corpus_bleu(hyps, refs), want, 1e-12);
  EXPECT_NEAR(want, 0.66874, 1e-5);
}

TEST(Bleu, DisjointIsZero) {
  const std::vector<std::string> hyps = {"x y z w"};
  const std::vector<std::vector<std::string>> refs = {{"a b c d"}};
  EXPECT_EQ(corpus_bleu(hyps, refs), 0.0);
}

TEST(Bleu, BrevityPenaltyUsesClosestReference) {
  // Hypothesis of 4 tokens, references of 6 and 10: r = 6, BP = exp(1 - 6/4).
  const std::vector<std::string> hyps = {"a b c d"};
  const std::vector<std::vector<std::string>> refs = {{"a b c d e f", "a b c d e f g h i j"}};
  EXPECT_NEAR(corpus_bleu(hyps, refs), std::exp(1.0 - 6.0 / 4.0), 1e-12);
}

TEST(Bleu, ClipsRepeatedTokens) {
  // Unigram "the" x4 against a reference with two: 2/4; higher orders have
  // matches "the the" 1/3, "the the the" 0/2 so the score is zero.
  const std::vector<std::string> hyps = {"the the the the"};
  const std::vector<std::vector<std::string>> refs = {{"the the cat sat"}};
  EXPECT_EQ(corpus_bleu(hyps, refs), 0.0);
  const std::vector<std::string> two = {"the cat"};
  const std::vector<std::vector<std::string>> ref2 = {{"the cat"}};
  EXPECT_DOUBLE_EQ(corpus_bleu(two, ref2), 1.0);
}

TEST(Bleu, ErrorsOnBadInput) {
  const std::vector<std::string> hyps = {"a"};
  const std::vector<std::vector<std::string>> none;
  EXPECT_THROW(corpus_bleu(hyps, none), std::invalid_argument);
  const std::vector<std::vector<std::string>> empty_group = {{}};
  EXPECT_THROW(corpus_bleu(hyps, empty_group), std::invalid_argument);
}

}  // namespace
}  // namespace xdial::nlg
