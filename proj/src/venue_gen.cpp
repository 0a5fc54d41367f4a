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

// Synthetic venue database: uniform placement on the unit square, nearby
// relations by per-domain-pair distance thresholds.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "xdial/rng.hpp"
#include "xdial/venue_db.hpp"

namespace xdial::db {

namespace {

constexpr std::array<std::string_view, 24> kAdjectives = {
    "Jade",    "Golden",  "Silver", "Crimson", "Azure",  "Emerald", "Ivory",  "Amber",
    "Misty",   "Quiet",   "Royal",  "Ancient", "Sunny",  "Windy",   "Hidden", "Grand",
    "Lotus",   "Pine",    "Willow", "Maple",   "Cloud",  "River",   "Stone",  "Spring"};

constexpr std::array<std::string_view, 24> kNouns = {
    "Dragon",  "Phoenix", "Crane",   "Tiger",   "Lantern", "Bridge", "Pagoda", "Harbor",
    "Orchard", "Meadow",  "Summit",  "Valley",  "Court",   "Moon",   "Star",   "Bell",
    "Drum",    "Gate",    "Pavilion", "Terrace", "Fountain", "Grove", "Peak",  "Canal"};

constexpr std::array<std::string_view, 8> kAttractionKinds = {
    "Park", "Museum", "Temple", "Garden", "Tower", "Palace", "Lake", "Gallery"};
constexpr std::array<std::string_view, 8> kRestaurantKinds = {
    "Restaurant", "Kitchen", "Bistro", "Diner", "Eatery", "Canteen", "Grill", "Tavern"};
constexpr std::array<std::string_view, 8> kHotelKinds = {
    "Hotel", "Inn", "Lodge", "Suites", "Residence", "Plaza", "Manor", "Retreat"};

constexpr std::array<std::string_view, 20> kStreets = {
    "Chang'an", "Guanghua", "Jianguo", "Chaoyang", "Dongsi",  "Xisi",    "Fuxing",
    "Deshengmen", "Andingmen", "Xueyuan", "Zhongguancun", "Wangfujing", "Qianmen",
    "Dongzhimen", "Xizhimen", "Sanlitun", "Gulou", "Haidian", "Fengtai", "Yongdingmen"};

constexpr std::array<std::string_view, 12> kDistricts = {
    "Dongcheng", "Xicheng", "Chaoyang", "Haidian", "Fengtai", "Shijingshan",
    "Tongzhou",  "Changping", "Daxing", "Shunyi",  "Mentougou", "Huairou"};

constexpr std::array<std::string_view, 32> kDishes = {
    "roast duck",     "kung pao chicken", "mapo tofu",    "dumplings",
    "hot pot",        "zhajiang noodles", "lamb skewers", "sweet and sour pork",
    "spring rolls",   "steamed buns",     "fried rice",   "wonton soup",
    "braised pork",   "fish in chili oil", "tea eggs",    "scallion pancake",
    "dan dan noodles", "sesame flatbread", "spicy crayfish", "beef noodle soup",
    "tofu pudding",   "fried dough sticks", "lotus root salad", "stir-fried greens",
    "crispy duck",    "shrimp dumplings", "egg tarts",    "congee",
    "hand-pulled noodles", "mutton hot pot", "sichuan fish", "rice noodles"};

constexpr std::array<std::string_view, 6> kOpenHours = {
    "10:00-22:00", "11:00-21:00", "09:00-23:00", "open 24 hours", "11:30-14:00, 17:00-21:30",
    "07:00-20:00"};

constexpr std::array<std::string_view, 5> kHotelTypes = {
    "economy", "comfort", "upscale", "luxury", "guesthouse"};

constexpr std::array<std::string_view, 24> kStationWords = {
    "Dongdan",   "Xidan",    "Jishuitan", "Chegongzhuang", "Guomao",   "Hujialou",
    "Tuanjiehu", "Beixinqiao", "Yonghegong", "Andelibeijie", "Muxidi", "Gongzhufen",
    "Wudaokou",  "Zhichunlu", "Huixinxijie", "Liufang",     "Shaoyaoju", "Taoranting",
    "Caishikou", "Hepingmen", "Chongwenmen", "Ciqikou",     "Tiantan",  "Puhuangyu"};

template <std::size_t N>
std::string_view pick(Rng& rng, const std::array<std::string_view, N>& a) {
  return a[rng.uniform(N)];
}

double pick_weighted(Rng& rng, std::span<const double> values,
                     std::span<const double> weights) {
  return values[rng.weighted(weights)];
}

// Unique names: partial Fisher-Yates over the adjective x noun x kind space.
std::vector<std::string> unique_names(Rng& rng, std::size_t n,
                                      const std::array<std::string_view, 8>& kinds) {
  const std::size_t space = kAdjectives.size() * kNouns.size() * kinds.size();
  std::vector<std::size_t> perm(space);
  for (std::size_t i = 0; i < space; ++i) perm[i] = i;
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t code;
    std::string suffix;
    if (i < space) {
      std::swap(perm[i], perm[i + rng.uniform(space - i)]);
      code = perm[i];
    } else {
      code = perm[i % space];
      suffix = " " + std::to_string(i / space + 1);
    }
    const std::size_t kind = code % kinds.size();
    const std::size_t noun = (code / kinds.size()) % kNouns.size();
    const std::size_t adj = code / (kinds.size() * kNouns.size());
    out.push_back(std::string(kAdjectives[adj]) + " " + std::string(kNouns[noun]) + " " +
                  std::string(kinds[kind]) + suffix);
  }
  return out;
}

std::string address(Rng& rng) {
  return std::to_string(1 + rng.uniform(300)) + " " + std::string(pick(rng, kStreets)) +
         " Road, " + std::string(pick(rng, kDistricts)) + " District";
}

std::string phone(Domain d, std::size_t index) {
  // Unique per entity: domain digit plus zero-padded index.
  const int digit = d == Domain::Attraction ? 6 : d == Domain::Restaurant ? 7 : 8;
  std::string idx = std::to_string(index);
  idx.insert(0, 7 - std::min<std::size_t>(7, idx.size()), '0');
  return "010-" + std::to_string(digit) + idx;
}

Entity make_attraction(Rng& rng, std::uint32_t i, std::string name) {
  static constexpr double kRatings[] = {3.0, 3.5, 4.0, 4.5, 5.0};
  static constexpr double kRatingW[] = {0.1, 0.2, 0.35, 0.25, 0.1};
  static constexpr double kFees[] = {0, 10, 20, 30, 40, 50, 60, 80, 100, 120, 150, 200};
  static constexpr double kFeeW[] = {0.4, 0.05, 0.07, 0.07, 0.06, 0.06, 0.06, 0.05, 0.05,
                                     0.05, 0.04, 0.04};
  static constexpr double kDur[] = {0.5, 1, 1.5, 2, 3, 4, 5};
  static constexpr double kDurW[] = {0.1, 0.25, 0.15, 0.25, 0.15, 0.06, 0.04};
  Entity e;
  e.id = {Domain::Attraction, i};
  e.values.emplace(slots::kName, std::move(name));
  e.values.emplace(slots::kRating, pick_weighted(rng, kRatings, kRatingW));
  e.values.emplace(slots::kFee, pick_weighted(rng, kFees, kFeeW));
  e.values.emplace(slots::kDuration, pick_weighted(rng, kDur, kDurW));
  e.values.emplace(slots::kAddress, address(rng));
  e.values.emplace(slots::kPhone, phone(Domain::Attraction, i));
  return e;
}

Entity make_restaurant(Rng& rng, std::uint32_t i, std::string name) {
  static constexpr double kRatings[] = {3.0, 3.5, 4.0, 4.5, 5.0};
  static constexpr double kRatingW[] = {0.1, 0.2, 0.35, 0.25, 0.1};
  static constexpr double kCosts[] = {30, 50, 70, 90, 120, 150, 200, 300};
  static constexpr double kCostW[] = {0.12, 0.18, 0.18, 0.15, 0.13, 0.1, 0.08, 0.06};
  Entity e;
  e.id = {Domain::Restaurant, i};
  e.values.emplace(slots::kName, std::move(name));
  e.values.emplace(slots::kRating, pick_weighted(rng, kRatings, kRatingW));
  e.values.emplace(slots::kCost, pick_weighted(rng, kCosts, kCostW));
  std::vector<std::string> dishes;
  const std::size_t n_dishes = 1 + rng.uniform(4);
  while (dishes.size() < n_dishes) {
    std::string dish(pick(rng, kDishes));
    if (std::find(dishes.begin(), dishes.end(), dish) == dishes.end()) {
      dishes.push_back(std::move(dish));
    }
  }
  e.values.emplace(slots::kDishes, std::move(dishes));
  e.values.emplace(slots::kAddress, address(rng));
  e.values.emplace(slots::kPhone, phone(Domain::Restaurant, i));
  e.values.emplace(slots::kOpen, std::string(pick(rng, kOpenHours)));
  return e;
}

Entity make_hotel(Rng& rng, std::uint32_t i, std::string name) {
  static constexpr double kRatings[] = {3.0, 3.5, 4.0, 4.5, 5.0};
  static constexpr double kRatingW[] = {0.1, 0.2, 0.35, 0.25, 0.1};
  static constexpr double kPrices[] = {150, 200, 300, 400, 500, 700, 1000, 1500};
  static constexpr double kPriceW[] = {0.12, 0.16, 0.18, 0.16, 0.13, 0.1, 0.09, 0.06};
  Entity e;
  e.id = {Domain::Hotel, i};
  e.values.emplace(slots::kName, std::move(name));
  e.values.emplace(slots::kRating, pick_weighted(rng, kRatings, kRatingW));
  e.values.emplace(slots::kPrice, pick_weighted(rng, kPrices, kPriceW));
  e.values.emplace(slots::kType, std::string(pick(rng, kHotelTypes)));
  const auto services = hotel_services();
  for (std::size_t s = 0; s < services.size(); ++s) {
    // Common amenities first in the list; availability decays along it.
    const double p = 0.8 - 0.5 * static_cast<double>(s) / static_cast<double>(services.size());
    e.values.emplace(std::string(services[s]), rng.bernoulli(p));
  }
  e.values.emplace(slots::kPhone, phone(Domain::Hotel, i));
  e.values.emplace(slots::kAddress, address(rng));
  return e;
}

// Probability that two uniform points in the unit square lie within r
// (r <= 1).
double pair_within(double r) {
  return std::numbers::pi * r * r - 8.0 / 3.0 * r * r * r + 0.5 * r * r * r * r;
}

}  // namespace

std::size_t GenSizes::of(Domain d) const {
  switch (d) {
    case Domain::Attraction: return attraction;
    case Domain::Restaurant: return restaurant;
    case Domain::Hotel: return hotel;
    default: return 0;
  }
}

double nearby_threshold(const GenOptions& opt, Domain a, Domain b) {
  if (opt.threshold) return *opt.threshold;
  const auto ia = static_cast<std::size_t>(a);
  const auto ib = static_cast<std::size_t>(b);
  const double na = static_cast<double>(opt.sizes.of(a));
  const double nb = static_cast<double>(opt.sizes.of(b));
  double p = 0.0;
  if (a == b) {
    if (na < 2) return 0.0;
    p = opt.targets.avg[ia][ia] / (na - 1.0);
  } else {
    // Undirected edge budget shared by both directions of the pair.
    const double edges = 0.5 * (opt.targets.avg[ia][ib] * na + opt.targets.avg[ib][ia] * nb);
    p = edges / (na * nb);
  }
  if (p <= 0.0) return 0.0;
  if (p >= pair_within(1.0)) return 2.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pair_within(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Database generate_database(std::uint64_t seed, const GenOptions& opt) {
  for (Domain d : kVenueDomains) {
    if (opt.sizes.of(d) == 0) {
      throw std::invalid_argument("database size for " + std::string(to_string(d)) +
                                  " must be at least 1");
    }
  }
  Rng rng(seed);
  std::array<std::vector<Entity>, 3> venues;
  for (Domain d : kVenueDomains) {
    const std::size_t n = opt.sizes.of(d);
    const auto& kinds = d == Domain::Attraction   ? kAttractionKinds
                        : d == Domain::Restaurant ? kRestaurantKinds
                                                  : kHotelKinds;
    auto names = unique_names(rng, n, kinds);
    auto& list = venues[static_cast<std::size_t>(d)];
    list.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = static_cast<std::uint32_t>(i);
      Entity e = d == Domain::Attraction   ? make_attraction(rng, idx, std::move(names[i]))
                 : d == Domain::Restaurant ? make_restaurant(rng, idx, std::move(names[i]))
                                           : make_hotel(rng, idx, std::move(names[i]));
      e.x = rng.real();
      e.y = rng.real();
      for (Domain t : kVenueDomains) {
        if (find_slot(d, nearby_slot(t))) e.nearby[t];
      }
      list.push_back(std::move(e));
    }
  }

  auto dist = [](const Entity& p, const Entity& q) { return std::hypot(p.x - q.x, p.y - q.y); };
  for (std::size_t ia = 0; ia < 3; ++ia) {
    for (std::size_t ib = ia; ib < 3; ++ib) {
      const Domain a = kVenueDomains[ia];
      const Domain b = kVenueDomains[ib];
      if (a == Domain::Hotel && b == Domain::Hotel) continue;
      const double r = nearby_threshold(opt, a, b);
      auto& la = venues[ia];
      auto& lb = venues[ib];
      for (std::size_t i = 0; i < la.size(); ++i) {
        for (std::size_t j = (a == b ? i + 1 : 0); j < lb.size(); ++j) {
          if (dist(la[i], lb[j]) < r) {
            la[i].nearby[b].push_back(lb[j].id);
            lb[j].nearby[a].push_back(la[i].id);
          }
        }
      }
    }
  }
  std::array<const std::vector<Entity>*, 3> all = {&venues[0], &venues[1], &venues[2]};
  for (auto& list : venues) {
    for (Entity& e : list) {
      for (auto& [target, ids] : e.nearby) {
        const auto& pool = *all[static_cast<std::size_t>(target)];
        std::sort(ids.begin(), ids.end(), [&](const EntityId& p, const EntityId& q) {
          const double dp = dist(e, pool[p.index]);
          const double dq = dist(e, pool[q.index]);
          return dp != dq ? dp < dq : p < q;
        });
      }
    }
  }

  std::vector<MetroStation> stations;
  const std::size_t n_stations = std::max<std::size_t>(1, opt.n_stations);
  for (std::size_t s = 0; s < n_stations; ++s) {
    std::string name(kStationWords[s % kStationWords.size()]);
    if (s >= kStationWords.size()) name += " " + std::string(kNouns[(s / kStationWords.size()) % kNouns.size()]);
    if (s >= kStationWords.size() * (kNouns.size() + 1)) name += " " + std::to_string(s);
    stations.push_back({name + " Station", rng.real(), rng.real()});
  }
  std::map<EntityId, std::string> metro_of;
  for (const auto& list : venues) {
    for (const Entity& e : list) {
      std::size_t best = 0;
      double best_d = std::hypot(e.x - stations[0].x, e.y - stations[0].y);
      for (std::size_t s = 1; s < stations.size(); ++s) {
        const double dd = std::hypot(e.x - stations[s].x, e.y - stations[s].y);
        if (dd < best_d) best_d = dd, best = s;
      }
      metro_of.emplace(e.id, stations[best].name);
    }
  }
  return Database(std::move(venues), std::move(stations), std::move(metro_of));
}

}  // namespace xdial::db
