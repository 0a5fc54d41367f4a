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

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xdial/dialogue_act.hpp"
#include "xdial/rng.hpp"

namespace xdial::nlg {

enum class Role { User, System };

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);

/// An act with its value replaced by a placeholder.
struct DelexAct {
  Intent intent = Intent::General;
  std::string domain;
  std::string slot;
  /// "$slot", "$slot_2", ... or empty when the act has no value.
  std::string placeholder;

  bool operator==(const DelexAct&) const = default;
};

/// Acts in canonical order (intent, domain, slot, then original order) with
/// placeholders numbered per slot name.
std::vector<DelexAct> delex_acts(const ActList& acts);

/// Canonical "role:Intent-Domain-slot+..." key; ignores act order and values.
std::string delex_key(Role role, const ActList& acts);

struct Delexicalized {
  std::vector<DelexAct> acts;
  std::string text;
};

/// Replaces act values in the utterance, longest value first; among equal
/// values, the leftmost free span goes to the act that comes first. Values
/// that do not occur leave the text unchanged.
Delexicalized delexicalize(const ActList& acts, std::string_view utterance);

/// Fills placeholders of a template written for `acts`.
std::string lexicalize(std::string_view tmpl, const ActList& acts);

class NoTemplate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Templates keyed by delex_key. Single-act fallback keys may use "*" for
/// the domain and "@service" for any hotel service; their text may contain
/// {domain}, {slot} and $value.
class TemplateStore {
 public:
  void add(const std::string& key, std::string tmpl);
  const std::vector<std::string>* find(const std::string& key) const;
  std::size_t size() const { return templates_.size(); }
  const std::map<std::string, std::vector<std::string>>& all() const { return templates_; }

  /// Adds every template of `other` that is not already present.
  void merge(const TemplateStore& other);

  static TemplateStore from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// The bundled English set: single-act templates for both roles.
  static const TemplateStore& english();

 private:
  std::map<std::string, std::vector<std::string>> templates_;
};

/// Adds one delexicalized template per turn to the store.
void extract(TemplateStore& store, Role role, const ActList& acts, std::string_view utterance);

/// A template for the whole act set, else one per act joined in act order.
/// Throws NoTemplate when some act has none.
std::string generate(const TemplateStore& store, Role role, const ActList& acts, Rng& rng);

/// Corpus BLEU-4 with brevity penalty; `references[i]` holds the references
/// of `hypotheses[i]`. Orders with no hypothesis n-grams are left out of
/// the geometric mean. Throws std::invalid_argument on an empty group or a
/// size mismatch.
double corpus_bleu(std::span<const std::string> hypotheses,
                   std::span<const std::vector<std::string>> references);

}  // namespace xdial::nlg
