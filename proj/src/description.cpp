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

#include <map>

#include "xdial/goal.hpp"
#include "xdial/text.hpp"

namespace xdial::goal {

namespace {

constexpr const char* kEnglish =
#include "description_en.inc"
    ;

std::string fill(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        auto it = vars.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string list_text(const std::vector<std::string>& items) {
  if (items.size() <= 1) return items.empty() ? std::string() : items[0];
  std::vector<std::string> head(items.begin(), items.end() - 1);
  return text::join(head, ", ") + " and " + items.back();
}

}  // namespace

DescriptionTemplates DescriptionTemplates::from_json(const nlohmann::json& j) {
  std::map<std::string, std::string, std::less<>> phrases;
  for (const auto& [k, v] : j.items()) phrases.emplace(k, v.get<std::string>());
  return DescriptionTemplates(std::move(phrases));
}

const DescriptionTemplates& DescriptionTemplates::english() {
  static const DescriptionTemplates t = from_json(nlohmann::json::parse(kEnglish));
  return t;
}

const std::string& DescriptionTemplates::get(std::initializer_list<std::string> keys) const {
  for (const auto& k : keys) {
    if (auto it = phrases_.find(k); it != phrases_.end()) return it->second;
  }
  throw MissingTemplate("missing description template '" + *keys.begin() + "'");
}

std::string render_description(std::span<const SemanticTuple> tuples,
                               const DescriptionTemplates& templates) {
  std::vector<std::string> sentences;
  const std::vector<int> ids = subgoal_ids(tuples);
  for (std::size_t step = 0; step < ids.size(); ++step) {
    const int id = ids[step];
    const Domain d = *subgoal_domain(tuples, id);
    const std::string dn(to_string(d));
    std::string body = templates.get({"intro." + dn});
    std::vector<std::string> requests;
    bool first = true;
    for (const auto& t : tuples) {
      if (t.subgoal != id) continue;
      if (t.is_blank()) {
        requests.push_back(t.slot);
        continue;
      }
      std::string clause;
      if (const auto* r = std::get_if<CrossRef>(&t.value)) {
        const auto target = subgoal_domain(tuples, r->target);
        const std::map<std::string, std::string> vars = {
            {"ref", std::to_string(r->target)},
            {"ref_noun", target ? std::string(domain_noun(*target)) : "place"}};
        const std::string key = r->relation == Relation::Nearby ? "near" : t.slot;
        clause = fill(templates.get({key}), vars);
      } else {
        const std::string& value = std::get<std::string>(t.value);
        const SlotSpec& spec = slot_spec(d, t.slot);
        const std::string kind = "@" + std::string(to_string(spec.kind));
        const std::string& tmpl = templates.get(
            {"inform." + dn + "." + t.slot + "=" + value, "inform." + dn + "." + t.slot,
             "inform." + dn + "." + kind, "inform.*." + t.slot, "inform.*." + kind});
        clause = fill(tmpl, {{"value", value}, {"slot", t.slot}});
      }
      const bool traffic = is_traffic_domain(d);
      body += (first || traffic ? " " : ", ") + clause;
      first = false;
    }
    if (!requests.empty()) {
      body += ", " + fill(templates.get({"request." + dn, "request"}),
                          {{"slots", list_text(requests)}});
    }
    sentences.push_back(fill(templates.get({"step"}),
                             {{"step", std::to_string(step + 1)}, {"body", body}}));
  }
  return text::join(sentences, " ");
}

}  // namespace xdial::goal
