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

#include "xdial/template_nlg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "xdial/schema.hpp"
#include "xdial/text.hpp"

namespace xdial::nlg {

namespace {

constexpr const char* kEnglishTemplates =
#include "nlg_en.inc"
    ;

bool has_value(const DialogueAct& a) { return a.value != acts::kNone; }

std::string placeholder_base(std::string_view slot) {
  std::string out = "$";
  for (char c : slot) {
    const auto u = static_cast<unsigned char>(c);
    out += std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_';
  }
  return out;
}

/// Indices of `acts` in canonical order.
std::vector<std::size_t> canonical_order(const ActList& acts) {
  std::vector<std::size_t> idx(acts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = acts[a];
    const auto& y = acts[b];
    return std::tie(x.intent, x.domain, x.slot) < std::tie(y.intent, y.domain, y.slot);
  });
  return idx;
}

/// Placeholder of each act, indexed like `acts`.
std::vector<std::string> placeholders(const ActList& acts) {
  std::vector<std::string> out(acts.size());
  std::map<std::string, int> seen;
  for (std::size_t i : canonical_order(acts)) {
    if (!has_value(acts[i])) continue;
    const std::string base = placeholder_base(acts[i].slot);
    const int n = ++seen[base];
    out[i] = n == 1 ? base : base + "_" + std::to_string(n);
  }
  return out;
}

bool placeholder_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_';
}

/// Replaces each $token found in `values`; unknown tokens stay as they are.
std::string fill(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] != '$') {
      out += tmpl[i++];
      continue;
    }
    std::size_t j = i + 1;
    while (j < tmpl.size() && placeholder_char(tmpl[j])) ++j;
    const std::string token(tmpl.substr(i, j - i));
    auto it = values.find(token);
    out += it == values.end() ? token : it->second;
    i = j;
  }
  return out;
}

std::vector<std::string> tokens_of(std::string_view tmpl) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != '$') continue;
    std::size_t j = i + 1;
    while (j < tmpl.size() && placeholder_char(tmpl[j])) ++j;
    out.emplace_back(tmpl.substr(i, j - i));
    i = j - 1;
  }
  return out;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) {
    s.replace(p, from.size(), to);
  }
  return s;
}

std::string single_part(const DialogueAct& a) {
  return std::string(to_string(a.intent)) + "-" + a.domain + "-" + a.slot;
}

bool is_service(const DialogueAct& a) {
  const auto d = parse_domain(a.domain);
  if (!d) return false;
  const SlotSpec* spec = find_slot(*d, a.slot);
  return spec && spec->kind == SlotKind::Service;
}

/// Renders one act from its single-act templates.
std::optional<std::string> generate_single(const TemplateStore& store, Role role,
                                           const DialogueAct& a, Rng& rng) {
  const std::string prefix = std::string(to_string(role)) + ":" + std::string(to_string(a.intent));
  std::vector<std::string> keys = {prefix + "-" + a.domain + "-" + a.slot, prefix + "-*-" + a.slot};
  if (is_service(a)) {
    keys.push_back(prefix + "-" + a.domain + "-@service");
    keys.push_back(prefix + "-*-@service");
  }
  const std::string ph = placeholder_base(a.slot);
  for (const auto& key : keys) {
    const auto* list = store.find(key);
    if (!list) continue;
    std::vector<const std::string*> usable;
    for (const auto& t : *list) {
      const auto toks = tokens_of(t);
      const bool carries = !has_value(a) || (a.value == "yes" && is_service(a)) || std::find(toks.begin(), toks.end(), "$value") != toks.end() ||
                           std::find(toks.begin(), toks.end(), ph) != toks.end();
      if (carries) usable.push_back(&t);
    }
    if (usable.empty()) continue;
    std::string out = *usable[rng.uniform(usable.size())];
    const auto d = parse_domain(a.domain);
    out = replace_all(std::move(out), "{domain}", d ? domain_noun(*d) : std::string_view(a.domain));
    out = replace_all(std::move(out), "{slot}", a.slot);
    return fill(out, {{"$value", a.value}, {ph, a.value}});
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Role r) { return r == Role::User ? "usr" : "sys"; }

Role role_from_string(std::string_view s) {
  if (s == "usr" || s == "user") return Role::User;
  if (s == "sys" || s == "system" || s == "wizard") return Role::System;
  throw std::invalid_argument("unknown role '" + std::string(s) + "'");
}

std::vector<DelexAct> delex_acts(const ActList& acts) {
  const auto ph = placeholders(acts);
  std::vector<DelexAct> out;
  for (std::size_t i : canonical_order(acts)) {
    out.push_back({acts[i].intent, acts[i].domain, acts[i].slot, ph[i]});
  }
  return out;
}

std::string delex_key(Role role, const ActList& acts) {
  std::string key = std::string(to_string(role)) + ":";
  bool first = true;
  for (std::size_t i : canonical_order(acts)) {
    if (!first) key += "+";
    key += single_part(acts[i]);
    first = false;
  }
  return key;
}

Delexicalized delexicalize(const ActList& acts, std::string_view utterance) {
  const auto ph = placeholders(acts);
  std::vector<std::size_t> order;
  for (std::size_t i : canonical_order(acts)) {
    if (has_value(acts[i]) && !acts[i].value.empty()) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return acts[a].value.size() > acts[b].value.size();
  });
  struct Span {
    std::size_t pos, len;
    const std::string* ph;
  };
  std::vector<Span> spans;
  std::vector<bool> used(utterance.size(), false);
  for (std::size_t i : order) {
    const std::string& v = acts[i].value;
    for (std::size_t p = utterance.find(v); p != std::string_view::npos; p = utterance.find(v, p + 1)) {
      if (std::any_of(used.begin() + static_cast<std::ptrdiff_t>(p),
                      used.begin() + static_cast<std::ptrdiff_t>(p + v.size()), [](bool b) { return b; })) {
        continue;
      }
      std::fill(used.begin() + static_cast<std::ptrdiff_t>(p),
                used.begin() + static_cast<std::ptrdiff_t>(p + v.size()), true);
      spans.push_back({p, v.size(), &ph[i]});
      break;
    }
  }
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.pos < b.pos; });
  Delexicalized out;
  out.acts = delex_acts(acts);
  std::size_t at = 0;
  for (const Span& s : spans) {
    out.text.append(utterance.substr(at, s.pos - at));
    out.text += *s.ph;
    at = s.pos + s.len;
  }
  out.text.append(utterance.substr(at));
  return out;
}

std::string lexicalize(std::string_view tmpl, const ActList& acts) {
  const auto ph = placeholders(acts);
  std::map<std::string, std::string> values;
  for (std::size_t i = 0; i < acts.size(); ++i) {
    if (!ph[i].empty()) values[ph[i]] = acts[i].value;
  }
  return fill(tmpl, values);
}

// ---------------------------------------------------------------------------
// Store

void TemplateStore::add(const std::string& key, std::string tmpl) {
  auto& list = templates_[key];
  if (std::find(list.begin(), list.end(), tmpl) == list.end()) list.push_back(std::move(tmpl));
}

const std::vector<std::string>* TemplateStore::find(const std::string& key) const {
  auto it = templates_.find(key);
  return it == templates_.end() ? nullptr : &it->second;
}

void TemplateStore::merge(const TemplateStore& other) {
  for (const auto& [k, list] : other.templates_) {
    for (const auto& t : list) add(k, t);
  }
}

TemplateStore TemplateStore::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("template store must be a JSON object");
  TemplateStore s;
  for (const auto& [k, list] : j.items()) {
    for (const auto& t : list) s.add(k, t.get<std::string>());
  }
  return s;
}

nlohmann::json TemplateStore::to_json() const { return templates_; }

const TemplateStore& TemplateStore::english() {
  static const TemplateStore s = from_json(nlohmann::json::parse(kEnglishTemplates));
  return s;
}

void extract(TemplateStore& store, Role role, const ActList& acts, std::string_view utterance) {
  if (acts.empty() || text::trim(utterance).empty()) return;
  store.add(delex_key(role, acts), delexicalize(acts, utterance).text);
}

std::string generate(const TemplateStore& store, Role role, const ActList& acts, Rng& rng) {
  if (acts.empty()) return {};
  const auto ph = placeholders(acts);
  if (const auto* list = store.find(delex_key(role, acts))) {
    std::vector<const std::string*> usable;
    for (const auto& t : *list) {
      const auto toks = tokens_of(t);
      const bool complete = std::all_of(ph.begin(), ph.end(), [&](const std::string& p) {
        return p.empty() || std::find(toks.begin(), toks.end(), p) != toks.end();
      });
      if (complete) usable.push_back(&t);
    }
    if (!usable.empty()) return lexicalize(*usable[rng.uniform(usable.size())], acts);
  }
  std::vector<std::string> parts;
  for (const auto& a : acts) {
    auto part = generate_single(store, role, a, rng);
    if (!part) throw NoTemplate("no template for " + delex_key(role, {a}));
    parts.push_back(std::move(*part));
  }
  return text::join(parts, " ");
}

// ---------------------------------------------------------------------------
// BLEU

double corpus_bleu(std::span<const std::string> hypotheses,
                   std::span<const std::vector<std::string>> references) {
  if (hypotheses.size() != references.size()) {
    throw std::invalid_argument("corpus_bleu: " + std::to_string(hypotheses.size()) +
                                " hypotheses vs " + std::to_string(references.size()) +
                                " reference groups");
  }
  constexpr int kOrder = 4;
  std::array<double, kOrder> matched{}, total{};
  double hyp_len = 0, ref_len = 0;
  using Gram = std::vector<std::string>;
  auto counts = [](const std::vector<std::string>& toks, int n) {
    std::map<Gram, int> out;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= toks.size(); ++i) {
      ++out[Gram(toks.begin() + static_cast<std::ptrdiff_t>(i),
                 toks.begin() + static_cast<std::ptrdiff_t>(i) + n)];
    }
    return out;
  };
  for (std::size_t h = 0; h < hypotheses.size(); ++h) {
    if (references[h].empty()) throw std::invalid_argument("corpus_bleu: empty reference group");
    const auto hyp = text::tokenize(hypotheses[h]);
    std::vector<std::vector<std::string>> refs;
    for (const auto& r : references[h]) refs.push_back(text::tokenize(r));
    hyp_len += static_cast<double>(hyp.size());
    // Closest reference length; ties go to the shorter one.
    std::size_t best = refs.front().size();
    for (const auto& r : refs) {
      const auto diff = [&](std::size_t len) {
        return len > hyp.size() ? len - hyp.size() : hyp.size() - len;
      };
      if (diff(r.size()) < diff(best) || (diff(r.size()) == diff(best) && r.size() < best)) {
        best = r.size();
      }
    }
    ref_len += static_cast<double>(best);
    for (int n = 1; n <= kOrder; ++n) {
      const auto hc = counts(hyp, n);
      std::map<Gram, int> max_ref;
      for (const auto& r : refs) {
        for (const auto& [g, c] : counts(r, n)) max_ref[g] = std::max(max_ref[g], c);
      }
      for (const auto& [g, c] : hc) {
        auto it = max_ref.find(g);
        matched[n - 1] += std::min(c, it == max_ref.end() ? 0 : it->second);
        total[n - 1] += c;
      }
    }
  }
  double log_sum = 0;
  int orders = 0;
  for (int n = 0; n < kOrder; ++n) {
    if (total[n] == 0) continue;
    if (matched[n] == 0) return 0.0;
    log_sum += std::log(matched[n] / total[n]);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double bp = hyp_len >= ref_len ? 1.0 : std::exp(1.0 - ref_len / hyp_len);
  return bp * std::exp(log_sum / orders);
}

}  // namespace xdial::nlg
