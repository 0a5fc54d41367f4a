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

#include "xdial/venue_db.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

#include "xdial/text.hpp"

namespace xdial::db {

namespace {

constexpr double kEps = 1e-9;

std::size_t slot_of(Domain d) {
  if (!is_venue_domain(d)) {
    throw std::invalid_argument("no stored entities for domain " +
                                std::string(to_string(d)));
  }
  return static_cast<std::size_t>(d);
}

std::string_view unit_of(std::string_view slot) {
  if (slot == slots::kFee || slot == slots::kCost || slot == slots::kPrice) {
    return "yuan";
  }
  if (slot == slots::kDuration) return "hours";
  return "";
}

std::string render_number(std::string_view slot, double v) {
  if (slot == slots::kFee && std::abs(v) < kEps) return "free";
  std::string out = format_number(v);
  if (slot == slots::kDuration) {
    out += std::abs(v - 1.0) < kEps ? " hour" : " hours";
  } else if (auto unit = unit_of(slot); !unit.empty()) {
    out += ' ';
    out += unit;
  }
  return out;
}

bool strip_suffix(std::string_view& s, std::string_view suffix) {
  if (s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix) {
    s.remove_suffix(suffix.size());
    return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ids and entities

std::string EntityId::str() const {
  return std::string(domain_noun(domain)) + "#" + std::to_string(index);
}

EntityId EntityId::parse(std::string_view text) {
  const auto hash = text.find('#');
  if (hash == std::string_view::npos) throw UnknownEntity(std::string(text));
  auto d = parse_domain(text.substr(0, hash));
  if (!d || !is_venue_domain(*d)) throw UnknownEntity(std::string(text));
  std::uint32_t index = 0;
  auto digits = text.substr(hash + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
    throw UnknownEntity(std::string(text));
  }
  return EntityId{*d, index};
}

const std::string& Entity::name() const {
  static const std::string empty;
  auto it = values.find(slots::kName);
  if (it == values.end()) return empty;
  return std::get<std::string>(it->second);
}

const SlotValue* Entity::value(std::string_view slot) const {
  auto it = values.find(slot);
  return it == values.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Database

Database::Database(std::array<std::vector<Entity>, 3> venues,
                   std::vector<MetroStation> stations,
                   std::map<EntityId, std::string> metro_of)
    : venues_(std::move(venues)),
      stations_(std::move(stations)),
      metro_of_(std::move(metro_of)) {
  index();
}

void Database::index() {
  for (Domain d : kVenueDomains) {
    auto& list = venues_[slot_of(d)];
    auto& names = by_name_[slot_of(d)];
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Entity& e = list[i];
      if (e.id.domain != d || e.id.index != i) {
        throw std::invalid_argument("entity " + e.id.str() + " stored out of order");
      }
      for (const auto& [slot, value] : e.values) {
        const SlotSpec& spec = slot_spec(d, slot);
        if (spec.kind == SlotKind::Nearby) {
          throw std::invalid_argument("nearby lists belong in Entity::nearby");
        }
      }
      if (!e.name().empty()) names.emplace(e.name(), static_cast<std::uint32_t>(i));
      for (const auto& [target, ids] : e.nearby) {
        if (!find_slot(d, nearby_slot(target))) {
          throw std::invalid_argument(e.id.str() + " has no nearby " +
                                      std::string(domain_noun(target)) + " slot");
        }
      }
    }
  }
  for (Domain d : kVenueDomains) {
    for (const Entity& e : venues_[slot_of(d)]) {
      for (const auto& [target, ids] : e.nearby) {
        for (const EntityId& id : ids) {
          if (!find(id)) throw UnknownEntity(id.str());
        }
      }
    }
  }

  for (Domain d : kVenueDomains) {
    for (const SlotSpec& spec : domain_slots(d)) {
      if (spec.kind == SlotKind::Nearby) continue;
      const auto key = std::make_pair(d, spec.name);
      if (spec.kind == SlotKind::Numeric) {
        std::vector<double> all;
        for (const Entity& e : venues_[slot_of(d)]) {
          if (auto* v = e.value(spec.name)) all.push_back(std::get<double>(*v));
        }
        std::sort(all.begin(), all.end());
        std::vector<double> grid;
        if (!all.empty()) {
          for (int q = 0; q <= 10; ++q) {
            const std::size_t i = std::min(all.size() - 1, (all.size() - 1) * q / 10);
            grid.push_back(all[i]);
          }
        }
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        numbers_[key] = std::move(all);
        grids_[key] = std::move(grid);
        continue;
      }
      std::set<std::string> distinct;
      for (const Entity& e : venues_[slot_of(d)]) {
        const SlotValue* v = e.value(spec.name);
        if (!v) continue;
        if (auto* s = std::get_if<std::string>(v)) {
          distinct.insert(*s);
        } else if (auto* list = std::get_if<std::vector<std::string>>(v)) {
          distinct.insert(list->begin(), list->end());
        } else if (auto* b = std::get_if<bool>(v); b && *b) {
          distinct.insert("yes");
        }
      }
      observed_[key] = std::vector<std::string>(distinct.begin(), distinct.end());
    }
  }
}

std::span<const Entity> Database::entities(Domain d) const {
  if (!is_venue_domain(d)) return {};
  return venues_[slot_of(d)];
}

const Entity* Database::find(const EntityId& id) const {
  if (!is_venue_domain(id.domain)) return nullptr;
  const auto& list = venues_[slot_of(id.domain)];
  return id.index < list.size() ? &list[id.index] : nullptr;
}

const Entity& Database::lookup(const EntityId& id) const {
  if (const Entity* e = find(id)) return *e;
  throw UnknownEntity(id.str());
}

const Entity* Database::find_by_name(Domain d, std::string_view name) const {
  if (!is_venue_domain(d)) return nullptr;
  const auto& names = by_name_[slot_of(d)];
  auto it = names.find(std::string(name));
  return it == names.end() ? nullptr : &venues_[slot_of(d)][it->second];
}

const Entity* Database::find_by_name(std::string_view name) const {
  for (Domain d : kVenueDomains) {
    if (const Entity* e = find_by_name(d, name)) return e;
  }
  return nullptr;
}

const std::string& Database::nearest_station(const EntityId& id) const {
  auto it = metro_of_.find(id);
  if (it == metro_of_.end()) throw UnknownEntity(id.str());
  return it->second;
}

const std::vector<std::string>& Database::observed_values(Domain d,
                                                          std::string_view slot) const {
  static const std::vector<std::string> empty;
  auto it = observed_.find(std::make_pair(d, std::string(slot)));
  return it == observed_.end() ? empty : it->second;
}

const std::vector<double>& Database::observed_numbers(Domain d,
                                                      std::string_view slot) const {
  static const std::vector<double> empty;
  auto it = numbers_.find(std::make_pair(d, std::string(slot)));
  return it == numbers_.end() ? empty : it->second;
}

const std::vector<double>& Database::quantile_grid(Domain d, std::string_view slot) const {
  static const std::vector<double> empty;
  auto it = grids_.find(std::make_pair(d, std::string(slot)));
  return it == grids_.end() ? empty : it->second;
}

// ---------------------------------------------------------------------------
// Constraints and queries

std::string_view to_string(Matcher m) {
  switch (m) {
    case Matcher::Equals: return "equals";
    case Matcher::AtLeast: return "at-least";
    case Matcher::AtMost: return "at-most";
    case Matcher::Contains: return "contains";
    case Matcher::IsYes: return "is-yes";
    case Matcher::NearbyOf: return "nearby-of";
  }
  return "?";
}

Matcher matcher_from_string(std::string_view s) {
  for (Matcher m : {Matcher::Equals, Matcher::AtLeast, Matcher::AtMost,
                    Matcher::Contains, Matcher::IsYes, Matcher::NearbyOf}) {
    if (to_string(m) == s) return m;
  }
  throw QueryError("unknown matcher: " + std::string(s));
}

void check_constraint(Domain d, const Constraint& c) {
  const SlotSpec* spec = find_slot(d, c.slot);
  if (!spec) {
    throw QueryError("unknown slot '" + c.slot + "' in " + std::string(to_string(d)));
  }
  auto mismatch = [&] {
    return QueryError("matcher " + std::string(to_string(c.matcher)) +
                      " incompatible with " + std::string(to_string(spec->kind)) +
                      " slot '" + c.slot + "'");
  };
  const bool is_text = std::holds_alternative<std::string>(c.value);
  const bool is_num = std::holds_alternative<double>(c.value);
  const bool is_id = std::holds_alternative<EntityId>(c.value);
  switch (spec->kind) {
    case SlotKind::Numeric:
      if (!is_num || (c.matcher != Matcher::Equals && c.matcher != Matcher::AtLeast &&
                      c.matcher != Matcher::AtMost)) {
        throw mismatch();
      }
      return;
    case SlotKind::Text:
      if (c.matcher == Matcher::NearbyOf && c.slot == slots::kName && is_id) return;
      if (c.matcher != Matcher::Equals || !is_text) throw mismatch();
      return;
    case SlotKind::List:
      if (c.matcher != Matcher::Contains || !is_text) throw mismatch();
      return;
    case SlotKind::Service:
      if (c.matcher != Matcher::IsYes) throw mismatch();
      return;
    case SlotKind::Nearby:
      throw mismatch();
  }
}

bool matches(const Database& db, const Entity& e, const Constraint& c) {
  if (c.matcher == Matcher::NearbyOf) {
    const Entity& anchor = db.lookup(std::get<EntityId>(c.value));
    auto it = anchor.nearby.find(e.id.domain);
    if (it == anchor.nearby.end()) {
      throw QueryError(anchor.id.str() + " has no nearby " +
                       std::string(domain_noun(e.id.domain)) + " list");
    }
    return std::find(it->second.begin(), it->second.end(), e.id) != it->second.end();
  }
  const SlotValue* v = e.value(c.slot);
  if (!v) return false;
  switch (c.matcher) {
    case Matcher::Equals:
      if (auto* num = std::get_if<double>(v)) {
        return std::abs(*num - std::get<double>(c.value)) < kEps;
      }
      if (auto* s = std::get_if<std::string>(v)) return *s == std::get<std::string>(c.value);
      return false;
    case Matcher::AtLeast:
      return std::get<double>(*v) >= std::get<double>(c.value) - kEps;
    case Matcher::AtMost:
      return std::get<double>(*v) <= std::get<double>(c.value) + kEps;
    case Matcher::Contains: {
      const auto& list = std::get<std::vector<std::string>>(*v);
      return std::find(list.begin(), list.end(), std::get<std::string>(c.value)) != list.end();
    }
    case Matcher::IsYes:
      return std::get<bool>(*v);
    case Matcher::NearbyOf:
      break;
  }
  return false;
}

std::vector<const Entity*> query(const Database& db, Domain d,
                                 std::span<const Constraint> constraints) {
  for (const Constraint& c : constraints) {
    check_constraint(d, c);
    if (c.matcher == Matcher::NearbyOf) {
      const Entity& anchor = db.lookup(std::get<EntityId>(c.value));
      if (!anchor.nearby.contains(d)) {
        throw QueryError(anchor.id.str() + " has no nearby " +
                         std::string(domain_noun(d)) + " list");
      }
    }
  }
  std::vector<const Entity*> out;
  for (const Entity& e : db.entities(d)) {
    bool ok = true;
    for (const Constraint& c : constraints) {
      if (!matches(db, e, c)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(&e);
  }
  return out;
}

std::optional<Constraint> loosen(const Database& db, Domain d, const Constraint& c) {
  if (c.matcher != Matcher::AtLeast && c.matcher != Matcher::AtMost) return std::nullopt;
  const auto& grid = db.quantile_grid(d, c.slot);
  const double v = std::get<double>(c.value);
  Constraint out = c;
  if (c.matcher == Matcher::AtLeast) {
    auto it = std::find_if(grid.rbegin(), grid.rend(), [&](double g) { return g < v - kEps; });
    if (it == grid.rend()) return std::nullopt;
    out.value = *it;
  } else {
    auto it = std::find_if(grid.begin(), grid.end(), [&](double g) { return g > v + kEps; });
    if (it == grid.end()) return std::nullopt;
    out.value = *it;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Surface text

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::optional<double> parse_number(std::string_view text) {
  text = text::trim(text);
  if (text == "free") return 0.0;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr == text.data()) return std::nullopt;
  std::string_view rest = text::trim(text.substr(ptr - text.data()));
  if (!rest.empty() && rest != "yuan" && rest != "hour" && rest != "hours") {
    return std::nullopt;
  }
  return v;
}

std::string render_value(const Database& db, const Entity& e, std::string_view slot) {
  const SlotSpec& spec = slot_spec(e.id.domain, slot);
  if (spec.kind == SlotKind::Nearby) {
    auto it = e.nearby.find(*nearby_target(slot));
    if (it == e.nearby.end() || it->second.empty()) return "nothing nearby";
    std::string out;
    for (const EntityId& id : it->second) {
      if (!out.empty()) out += ", ";
      out += db.lookup(id).name();
    }
    return out;
  }
  const SlotValue* v = e.value(slot);
  if (!v) return "unknown";
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          return render_number(slot, x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "yes" : "no";
        } else {
          std::string out;
          for (const auto& s : x) {
            if (!out.empty()) out += ", ";
            out += s;
          }
          return out;
        }
      },
      *v);
}

std::string constraint_text(const Database& db, const Constraint& c) {
  switch (c.matcher) {
    case Matcher::NearbyOf:
      return "near " + db.lookup(std::get<EntityId>(c.value)).name();
    case Matcher::IsYes:
      return "yes";
    case Matcher::Contains:
      return std::get<std::string>(c.value);
    case Matcher::Equals:
      if (auto* s = std::get_if<std::string>(&c.value)) return *s;
      return render_number(c.slot, std::get<double>(c.value));
    case Matcher::AtLeast:
      return render_number(c.slot, std::get<double>(c.value)) + " or higher";
    case Matcher::AtMost:
      return render_number(c.slot, std::get<double>(c.value)) + " or less";
  }
  return {};
}

Constraint parse_constraint(Domain d, std::string_view slot, std::string_view raw) {
  const SlotSpec* spec = find_slot(d, slot);
  if (!spec) {
    throw QueryError("unknown slot '" + std::string(slot) + "' in " +
                     std::string(to_string(d)));
  }
  std::string_view text = text::trim(raw);
  if (text.empty() || text == "none") {
    throw QueryError("empty value for slot '" + std::string(slot) + "'");
  }
  Constraint c{spec->name, Matcher::Equals, std::string(text)};
  switch (spec->kind) {
    case SlotKind::Numeric: {
      if (strip_suffix(text, " or higher") || strip_suffix(text, " or more") ||
          strip_suffix(text, " or above")) {
        c.matcher = Matcher::AtLeast;
      } else if (strip_suffix(text, " or less") || strip_suffix(text, " or lower") ||
                 strip_suffix(text, " or below")) {
        c.matcher = Matcher::AtMost;
      }
      auto v = parse_number(text);
      if (!v) throw QueryError("malformed numeric value '" + std::string(raw) + "'");
      c.value = *v;
      break;
    }
    case SlotKind::Text:
      break;
    case SlotKind::List:
      c.matcher = Matcher::Contains;
      break;
    case SlotKind::Service:
      if (text != "yes") {
        throw QueryError("service constraint must be 'yes', got '" + std::string(raw) + "'");
      }
      c.matcher = Matcher::IsYes;
      break;
    case SlotKind::Nearby:
      throw QueryError("nearby list slot '" + std::string(slot) + "' is not informable");
  }
  return c;
}

bool value_satisfies(Domain d, std::string_view slot, std::string_view constraint,
                     std::string_view value) {
  const Constraint c = parse_constraint(d, slot, constraint);
  switch (c.matcher) {
    case Matcher::Equals:
      if (auto* num = std::get_if<double>(&c.value)) {
        auto v = parse_number(value);
        return v && std::abs(*v - *num) < kEps;
      }
      return text::trim(value) == std::get<std::string>(c.value);
    case Matcher::AtLeast: {
      auto v = parse_number(value);
      return v && *v >= std::get<double>(c.value) - kEps;
    }
    case Matcher::AtMost: {
      auto v = parse_number(value);
      return v && *v <= std::get<double>(c.value) + kEps;
    }
    case Matcher::Contains: {
      for (auto part : text::split(value, ',')) {
        if (text::trim(part) == std::get<std::string>(c.value)) return true;
      }
      return false;
    }
    case Matcher::IsYes:
      return text::trim(value) == "yes";
    case Matcher::NearbyOf:
      break;
  }
  return false;
}

}  // namespace xdial::db
