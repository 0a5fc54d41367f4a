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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xdial {

enum class Domain { Attraction, Restaurant, Hotel, Taxi, Metro };

inline constexpr std::array<Domain, 5> kAllDomains = {
    Domain::Attraction, Domain::Restaurant, Domain::Hotel, Domain::Taxi,
    Domain::Metro};

/// Hotel, attraction and restaurant: the domains with stored venues.
inline constexpr std::array<Domain, 3> kVenueDomains = {
    Domain::Attraction, Domain::Restaurant, Domain::Hotel};

constexpr bool is_venue_domain(Domain d) {
  return d == Domain::Attraction || d == Domain::Restaurant ||
         d == Domain::Hotel;
}

constexpr bool is_traffic_domain(Domain d) {
  return d == Domain::Taxi || d == Domain::Metro;
}

std::string_view to_string(Domain d);
std::optional<Domain> parse_domain(std::string_view name);
/// Like parse_domain but throws std::invalid_argument.
Domain domain_from_string(std::string_view name);
/// Lowercase noun used in ids and text ("attraction").
std::string_view domain_noun(Domain d);

enum class SlotKind { Text, Numeric, Service, List, Nearby };

std::string_view to_string(SlotKind k);

struct SlotSpec {
  std::string name;
  Domain domain;
  SlotKind kind;
  bool informable = false;
  bool requestable = true;
  bool cross_domain_capable = false;
};

namespace slots {
inline constexpr std::string_view kName = "name";
inline constexpr std::string_view kRating = "rating";
inline constexpr std::string_view kFee = "fee";
inline constexpr std::string_view kDuration = "duration";
inline constexpr std::string_view kCost = "cost";
inline constexpr std::string_view kPrice = "price";
inline constexpr std::string_view kType = "type";
inline constexpr std::string_view kDishes = "dishes";
inline constexpr std::string_view kAddress = "address";
inline constexpr std::string_view kPhone = "phone";
inline constexpr std::string_view kOpen = "open";
inline constexpr std::string_view kFrom = "from";
inline constexpr std::string_view kTo = "to";
inline constexpr std::string_view kCarType = "car type";
inline constexpr std::string_view kPlate = "plate number";
inline constexpr std::string_view kFromStation = "from station";
inline constexpr std::string_view kToStation = "to station";
inline constexpr std::string_view kSrcDomain = "src_domain";
}  // namespace slots

/// Name of the "nearby <target>" list slot ("nearby hotels").
std::string nearby_slot(Domain target);
/// Inverse of nearby_slot; nullopt when the slot is not a nearby list.
std::optional<Domain> nearby_target(std::string_view slot);

/// The 37 boolean hotel services.
std::span<const std::string_view> hotel_services();

/// Full slot inventory of a domain, in display order.
std::span<const SlotSpec> domain_slots(Domain d);

/// Lookup; nullptr when the slot does not exist in the domain.
const SlotSpec* find_slot(Domain d, std::string_view slot);
/// Lookup that throws std::invalid_argument for unknown slots.
const SlotSpec& slot_spec(Domain d, std::string_view slot);

}  // namespace xdial
