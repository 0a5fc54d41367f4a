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

namespace xdial::db {

using nlohmann::json;

json to_json(const Database& db) {
  json entities = json::object();
  for (Domain d : kVenueDomains) {
    json list = json::array();
    for (const Entity& e : db.entities(d)) {
      json values = json::object();
      for (const auto& [slot, v] : e.values) {
        std::visit([&](const auto& x) { values[slot] = x; }, v);
      }
      json nearby = json::object();
      for (const auto& [target, ids] : e.nearby) {
        json arr = json::array();
        for (const EntityId& id : ids) arr.push_back(id.str());
        nearby[std::string(to_string(target))] = std::move(arr);
      }
      list.push_back({{"id", e.id.str()},
                      {"values", std::move(values)},
                      {"nearby", std::move(nearby)},
                      {"location", {e.x, e.y}}});
    }
    entities[std::string(to_string(d))] = std::move(list);
  }
  json stations = json::array();
  for (const MetroStation& s : db.stations()) {
    stations.push_back({{"name", s.name}, {"location", {s.x, s.y}}});
  }
  json metro = json::object();
  for (const auto& [id, name] : db.metro_stations()) metro[id.str()] = name;
  return {{"schema_version", kSchemaVersion},
          {"entities", std::move(entities)},
          {"stations", std::move(stations)},
          {"metro_stations", std::move(metro)}};
}

Database database_from_json(const json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw std::runtime_error("unsupported database schema_version " +
                               std::to_string(version));
    }
    std::array<std::vector<Entity>, 3> venues;
    for (Domain d : kVenueDomains) {
      const std::string key(to_string(d));
      if (!j.at("entities").contains(key)) continue;
      for (const json& rec : j.at("entities").at(key)) {
        Entity e;
        e.id = EntityId::parse(rec.at("id").get<std::string>());
        for (const auto& [slot, v] : rec.at("values").items()) {
          const SlotSpec& spec = slot_spec(d, slot);
          switch (spec.kind) {
            case SlotKind::Numeric: e.values.emplace(slot, v.get<double>()); break;
            case SlotKind::Service: e.values.emplace(slot, v.get<bool>()); break;
            case SlotKind::List:
              e.values.emplace(slot, v.get<std::vector<std::string>>());
              break;
            case SlotKind::Text: e.values.emplace(slot, v.get<std::string>()); break;
            case SlotKind::Nearby:
              throw std::runtime_error("nearby slot '" + slot + "' in values of " + e.id.str());
          }
        }
        for (const auto& [target, ids] : rec.at("nearby").items()) {
          auto& out = e.nearby[domain_from_string(target)];
          for (const json& id : ids) out.push_back(EntityId::parse(id.get<std::string>()));
        }
        if (rec.contains("location")) {
          e.x = rec["location"].at(0).get<double>();
          e.y = rec["location"].at(1).get<double>();
        }
        venues[static_cast<std::size_t>(d)].push_back(std::move(e));
      }
    }
    std::vector<MetroStation> stations;
    for (const json& s : j.value("stations", json::array())) {
      stations.push_back({s.at("name").get<std::string>(), s.at("location").at(0).get<double>(),
                          s.at("location").at(1).get<double>()});
    }
    std::map<EntityId, std::string> metro;
    const json metro_json = j.value("metro_stations", json::object());
    for (const auto& [id, name] : metro_json.items()) {
      metro.emplace(EntityId::parse(id), name.get<std::string>());
    }
    return Database(std::move(venues), std::move(stations), std::move(metro));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed database json: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw std::runtime_error(std::string("invalid database: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("invalid database: ") + e.what());
  }
}

}  // namespace xdial::db
