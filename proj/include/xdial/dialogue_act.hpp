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

#pragma once

#include <array>
#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xdial/schema.hpp"

namespace xdial {

enum class Intent { Inform, Request, Recommend, NoOffer, Select, General };

inline constexpr std::array<Intent, 6> kAllIntents = {
    Intent::Inform, Intent::Request, Intent::Recommend,
    Intent::NoOffer, Intent::Select, Intent::General};

std::string_view to_string(Intent i);
Intent intent_from_string(std::string_view s);

/// (intent, domain, slot, value). General acts carry the general type
/// ("greet", "thank", "bye", "welcome") in the domain position.
struct DialogueAct {
  Intent intent = Intent::General;
  std::string domain;
  std::string slot = "none";
  std::string value = "none";

  auto operator<=>(const DialogueAct&) const = default;
};

using ActList = std::vector<DialogueAct>;

/// Prints [intent, domain, slot, value].
std::ostream& operator<<(std::ostream& os, const DialogueAct& a);

namespace acts {
inline constexpr std::string_view kNone = "none";
inline constexpr std::string_view kGreet = "greet";
inline constexpr std::string_view kThank = "thank";
inline constexpr std::string_view kBye = "bye";
inline constexpr std::string_view kWelcome = "welcome";

DialogueAct inform(Domain d, std::string_view slot, std::string_view value);
DialogueAct request(Domain d, std::string_view slot);
DialogueAct recommend(Domain d, std::string_view name);
DialogueAct no_offer(Domain d);
DialogueAct select(Domain d, Domain source);
DialogueAct general(std::string_view kind);
}  // namespace acts

nlohmann::json to_json(const DialogueAct& a);
DialogueAct act_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ActList& list);
ActList acts_from_json(const nlohmann::json& j);

}  // namespace xdial
