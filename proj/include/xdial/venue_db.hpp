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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"
#include "xdial/schema.hpp"

namespace xdial::db {

inline constexpr int kSchemaVersion = 1;

struct EntityId {
  Domain domain = Domain::Attraction;
  std::uint32_t index = 0;

  auto operator<=>(const EntityId&) const = default;

  /// "attraction#3"
  std::string str() const;
  static EntityId parse(std::string_view text);
};

/// Stored value of a non-nearby slot.
using SlotValue = std::variant<std::string, double, bool, std::vector<std::string>>;

struct Entity {
  EntityId id;
  std::map<std::string, SlotValue, std::less<>> values;
  std::map<Domain, std::vector<EntityId>> nearby;
  double x = 0.0;
  double y = 0.0;

  const std::string& name() const;
  const SlotValue* value(std::string_view slot) const;
};

class UnknownEntity : public std::out_of_range {
 public:
  explicit UnknownEntity(const std::string& id)
      : std::out_of_range("unknown entity id: " + id) {}
};

struct MetroStation {
  std::string name;
  double x = 0.0;
  double y = 0.0;
};

/// Immutable venue database for the three venue domains plus the metro
/// station table. Taxi holds no stored entities.
class Database {
 public:
  Database() = default;
  /// Entities must be indexed 0..n-1 per domain; nearby lists must resolve.
  Database(std::array<std::vector<Entity>, 3> venues,
           std::vector<MetroStation> stations,
           std::map<EntityId, std::string> metro_of);

  std::span<const Entity> entities(Domain d) const;
  std::size_t size(Domain d) const { return entities(d).size(); }

  const Entity& lookup(const EntityId& id) const;
  const Entity& lookup(std::string_view id) const { return lookup(EntityId::parse(id)); }
  const Entity* find(const EntityId& id) const;
  const Entity* find_by_name(Domain d, std::string_view name) const;
  /// Searches all venue domains.
  const Entity* find_by_name(std::string_view name) const;

  const std::string& nearest_station(const EntityId& id) const;
  std::span<const MetroStation> stations() const { return stations_; }
  const std::map<EntityId, std::string>& metro_stations() const { return metro_of_; }

  /// Distinct observed values of a text, list or service slot, sorted.
  /// List slots yield their elements; services yield "yes" when offered.
  const std::vector<std::string>& observed_values(Domain d, std::string_view slot) const;
  /// Distinct observed values of a numeric slot, ascending.
  const std::vector<double>& observed_numbers(Domain d, std::string_view slot) const;
  /// Deduplicated decile grid of a numeric slot.
  const std::vector<double>& quantile_grid(Domain d, std::string_view slot) const;

 private:
  void index();

  std::array<std::vector<Entity>, 3> venues_;
  std::vector<MetroStation> stations_;
  std::map<EntityId, std::string> metro_of_;
  std::array<std::unordered_map<std::string, std::uint32_t>, 3> by_name_;
  std::map<std::pair<Domain, std::string>, std::vector<std::string>, std::less<>> observed_;
  std::map<std::pair<Domain, std::string>, std::vector<double>, std::less<>> numbers_;
  std::map<std::pair<Domain, std::string>, std::vector<double>, std::less<>> grids_;
};

enum class Matcher { Equals, AtLeast, AtMost, Contains, IsYes, NearbyOf };

std::string_view to_string(Matcher m);
Matcher matcher_from_string(std::string_view s);

struct Constraint {
  std::string slot;
  Matcher matcher = Matcher::Equals;
  /// Text for Equals/Contains/IsYes on text slots, number for numeric
  /// slots, entity id for NearbyOf.
  std::variant<std::string, double, EntityId> value;

  bool operator==(const Constraint&) const = default;
};

using ConstraintSet = std::vector<Constraint>;

class QueryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws QueryError when the matcher is incompatible with the slot kind.
void check_constraint(Domain d, const Constraint& c);

bool matches(const Database& db, const Entity& e, const Constraint& c);

/// Entities of `d` satisfying every constraint, ordered by id.
std::vector<const Entity*> query(const Database& db, Domain d,
                                 std::span<const Constraint> constraints);

/// One decile step looser; nullopt when the constraint cannot be loosened.
std::optional<Constraint> loosen(const Database& db, Domain d, const Constraint& c);

/// Surface text of a stored value ("free", "4.5", "60 yuan").
std::string render_value(const Database& db, const Entity& e, std::string_view slot);
/// Surface text of a constraint value ("4.5 or higher", "yes").
std::string constraint_text(const Database& db, const Constraint& c);
/// Parses an informable value as it appears in goals and acts.
/// Throws QueryError on malformed text.
Constraint parse_constraint(Domain d, std::string_view slot, std::string_view text);
/// True when a stored value (as rendered text) meets a constraint text.
bool value_satisfies(Domain d, std::string_view slot, std::string_view constraint,
                     std::string_view value);

std::string format_number(double v);
/// Numeric part of "60 yuan", "free" (0), "4.5". nullopt if unparsable.
std::optional<double> parse_number(std::string_view text);

/// {"schema_version", "entities": {domain: [...]}, "stations", "metro_stations"}
nlohmann::json to_json(const Database& db);
/// Throws std::runtime_error on unknown schema versions or malformed records.
Database database_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Synthetic generation

struct GenSizes {
  std::size_t attraction = 465;
  std::size_t restaurant = 951;
  std::size_t hotel = 1133;

  std::size_t of(Domain d) const;
};

/// Average number of nearby `target` entities per `source` entity.
struct NearbyTargets {
  // rows: source, columns: target, order attraction/restaurant/hotel;
  // hotel->hotel is unused.
  std::array<std::array<double, 3>, 3> avg = {{{4.7, 6.7, 2.1},
                                               {3.3, 4.1, 2.4},
                                               {0.8, 2.0, 0.0}}};
};

struct GenOptions {
  GenSizes sizes;
  NearbyTargets targets;
  /// Overrides every calibrated distance threshold when set.
  std::optional<double> threshold;
  std::size_t n_stations = 60;
};

/// Distance threshold for the (a, b) pair that reproduces the configured
/// averages under uniform placement in the unit square.
double nearby_threshold(const GenOptions& opt, Domain a, Domain b);

/// Throws std::invalid_argument for a zero venue-domain size.
Database generate_database(std::uint64_t seed, const GenOptions& opt = {});

}  // namespace xdial::db
