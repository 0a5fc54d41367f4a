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

#include "xdial/schema.hpp"

#include <algorithm>

namespace xdial {

namespace {

constexpr std::array<std::string_view, 37> kHotelServices = {
    "wake-up call",          "wifi in all rooms",
    "wifi in public areas",  "broadband internet",
    "breakfast service",     "free parking",
    "paid parking",          "24-hour hot water",
    "luggage storage",       "laundry service",
    "airport pickup",        "station pickup",
    "gym",                   "indoor swimming pool",
    "outdoor swimming pool", "sauna",
    "spa",                   "hot spring",
    "business center",       "meeting room",
    "chinese restaurant",    "western restaurant",
    "bar",                   "chess and card room",
    "non-smoking rooms",     "accessible facilities",
    "childcare service",     "hair dryer",
    "heating",               "international calls",
    "free domestic calls",   "free local calls",
    "foreign guests accepted", "car rental",
    "ticket service",        "currency exchange",
    "pets allowed"};

std::vector<SlotSpec> build(Domain d) {
  std::vector<SlotSpec> out;
  auto add = [&](std::string_view name, SlotKind kind, bool informable,
                 bool requestable = true, bool cross = false) {
    out.push_back(SlotSpec{std::string(name), d, kind, informable, requestable,
                           cross});
  };
  using K = SlotKind;
  switch (d) {
    case Domain::Attraction:
      add(slots::kName, K::Text, true, true, true);
      add(slots::kRating, K::Numeric, true);
      add(slots::kFee, K::Numeric, true);
      add(slots::kDuration, K::Numeric, true);
      add(slots::kAddress, K::Text, false);
      add(slots::kPhone, K::Text, false);
      add(nearby_slot(Domain::Attraction), K::Nearby, false);
      add(nearby_slot(Domain::Restaurant), K::Nearby, false);
      add(nearby_slot(Domain::Hotel), K::Nearby, false);
      break;
    case Domain::Restaurant:
      add(slots::kName, K::Text, true, true, true);
      add(slots::kRating, K::Numeric, true);
      add(slots::kCost, K::Numeric, true);
      add(slots::kDishes, K::List, true);
      add(slots::kAddress, K::Text, false);
      add(slots::kPhone, K::Text, false);
      add(slots::kOpen, K::Text, false);
      add(nearby_slot(Domain::Attraction), K::Nearby, false);
      add(nearby_slot(Domain::Restaurant), K::Nearby, false);
      add(nearby_slot(Domain::Hotel), K::Nearby, false);
      break;
    case Domain::Hotel:
      add(slots::kName, K::Text, true, true, true);
      add(slots::kRating, K::Numeric, true);
      add(slots::kPrice, K::Numeric, true);
      add(slots::kType, K::Text, true);
      for (auto s : kHotelServices) add(s, K::Service, true);
      add(slots::kPhone, K::Text, false);
      add(slots::kAddress, K::Text, false);
      add(nearby_slot(Domain::Attraction), K::Nearby, false);
      add(nearby_slot(Domain::Restaurant), K::Nearby, false);
      break;
    case Domain::Taxi:
      add(slots::kFrom, K::Text, true, false, true);
      add(slots::kTo, K::Text, true, false, true);
      add(slots::kCarType, K::Text, false);
      add(slots::kPlate, K::Text, false);
      break;
    case Domain::Metro:
      add(slots::kFrom, K::Text, true, false, true);
      add(slots::kTo, K::Text, true, false, true);
      add(slots::kFromStation, K::Text, false);
      add(slots::kToStation, K::Text, false);
      break;
  }
  return out;
}

const std::array<std::vector<SlotSpec>, 5>& inventory() {
  static const std::array<std::vector<SlotSpec>, 5> inv = {
      build(Domain::Attraction), build(Domain::Restaurant),
      build(Domain::Hotel), build(Domain::Taxi), build(Domain::Metro)};
  return inv;
}

}  // namespace

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::Attraction: return "Attraction";
    case Domain::Restaurant: return "Restaurant";
    case Domain::Hotel: return "Hotel";
    case Domain::Taxi: return "Taxi";
    case Domain::Metro: return "Metro";
  }
  return "?";
}

std::string_view domain_noun(Domain d) {
  switch (d) {
    case Domain::Attraction: return "attraction";
    case Domain::Restaurant: return "restaurant";
    case Domain::Hotel: return "hotel";
    case Domain::Taxi: return "taxi";
    case Domain::Metro: return "metro";
  }
  return "?";
}

std::optional<Domain> parse_domain(std::string_view name) {
  for (Domain d : kAllDomains) {
    if (name == to_string(d) || name == domain_noun(d)) return d;
  }
  return std::nullopt;
}

Domain domain_from_string(std::string_view name) {
  if (auto d = parse_domain(name)) return *d;
  throw std::invalid_argument("unknown domain: " + std::string(name));
}

std::string_view to_string(SlotKind k) {
  switch (k) {
    case SlotKind::Text: return "text";
    case SlotKind::Numeric: return "numeric";
    case SlotKind::Service: return "service";
    case SlotKind::List: return "list";
    case SlotKind::Nearby: return "nearby";
  }
  return "?";
}

std::string nearby_slot(Domain target) {
  switch (target) {
    case Domain::Attraction: return "nearby attractions";
    case Domain::Restaurant: return "nearby restaurants";
    case Domain::Hotel: return "nearby hotels";
    default: throw std::invalid_argument("no nearby slot for traffic domains");
  }
}

std::optional<Domain> nearby_target(std::string_view slot) {
  for (Domain d : kVenueDomains) {
    if (slot == nearby_slot(d)) return d;
  }
  return std::nullopt;
}

std::span<const std::string_view> hotel_services() { return kHotelServices; }

std::span<const SlotSpec> domain_slots(Domain d) {
  return inventory()[static_cast<std::size_t>(d)];
}

const SlotSpec* find_slot(Domain d, std::string_view slot) {
  auto s = domain_slots(d);
  auto it = std::find_if(s.begin(), s.end(),
                         [&](const SlotSpec& spec) { return spec.name == slot; });
  return it == s.end() ? nullptr : &*it;
}

const SlotSpec& slot_spec(Domain d, std::string_view slot) {
  if (const SlotSpec* s = find_slot(d, slot)) return *s;
  throw std::invalid_argument("unknown slot '" + std::string(slot) + "' in " +
                              std::string(to_string(d)));
}

}  // namespace xdial
