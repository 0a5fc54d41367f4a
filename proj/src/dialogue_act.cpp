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

#include "xdial/dialogue_act.hpp"

#include <ostream>

#include <stdexcept>

namespace xdial {

std::ostream& operator<<(std::ostream& os, const DialogueAct& a) {
  return os << '[' << to_string(a.intent) << ", " << a.domain << ", " << a.slot << ", " << a.value
            << ']';
}

std::string_view to_string(Intent i) {
  switch (i) {
    case Intent::Inform: return "Inform";
    case Intent::Request: return "Request";
    case Intent::Recommend: return "Recommend";
    case Intent::NoOffer: return "NoOffer";
    case Intent::Select: return "Select";
    case Intent::General: return "General";
  }
  return "?";
}

Intent intent_from_string(std::string_view s) {
  for (Intent i : kAllIntents) {
    if (to_string(i) == s) return i;
  }
  throw std::invalid_argument("unknown intent: " + std::string(s));
}

namespace acts {

DialogueAct inform(Domain d, std::string_view slot, std::string_view value) {
  return {Intent::Inform, std::string(to_string(d)), std::string(slot), std::string(value)};
}

DialogueAct request(Domain d, std::string_view slot) {
  return {Intent::Request, std::string(to_string(d)), std::string(slot), std::string(kNone)};
}

DialogueAct recommend(Domain d, std::string_view name) {
  return {Intent::Recommend, std::string(to_string(d)), std::string(slots::kName),
          std::string(name)};
}

DialogueAct no_offer(Domain d) {
  return {Intent::NoOffer, std::string(to_string(d)), std::string(kNone), std::string(kNone)};
}

DialogueAct select(Domain d, Domain source) {
  return {Intent::Select, std::string(to_string(d)), std::string(slots::kSrcDomain),
          std::string(to_string(source))};
}

DialogueAct general(std::string_view kind) {
  return {Intent::General, std::string(kind), std::string(kNone), std::string(kNone)};
}

}  // namespace acts

nlohmann::json to_json(const DialogueAct& a) {
  return nlohmann::json::array({std::string(to_string(a.intent)), a.domain, a.slot, a.value});
}

DialogueAct act_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw std::invalid_argument("dialogue act must be a 4-element array: " + j.dump());
  }
  return {intent_from_string(j[0].get<std::string>()), j[1].get<std::string>(),
          j[2].get<std::string>(), j[3].get<std::string>()};
}

nlohmann::json to_json(const ActList& list) {
  auto out = nlohmann::json::array();
  for (const auto& a : list) out.push_back(to_json(a));
  return out;
}

ActList acts_from_json(const nlohmann::json& j) {
  ActList out;
  for (const auto& a : j) out.push_back(act_from_json(a));
  return out;
}

}  // namespace xdial
