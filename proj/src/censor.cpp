// Copyright 2026 The ReasonEval Authors
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

#include "reasoneval/censor.hpp"

#include <algorithm>

#include "assets.hpp"
#include "io_util.hpp"
#include "reasoneval/error.hpp"
#include "text_util.hpp"

namespace reasoneval {

using nlohmann::json;

namespace {

// Finds the next whole-word occurrence of `term` (already lower case and
// space-collapsed) in `low`, starting at `from`. Word boundaries are only
// required where the term itself begins or ends with a word character.
std::size_t find_term(const std::string& low, const std::string& term, std::size_t from) {
  if (term.empty()) return std::string::npos;
  const bool word_start = detail::is_word_char(term.front());
  const bool word_end = detail::is_word_char(term.back());
  for (std::size_t pos = low.find(term, from); pos != std::string::npos; pos = low.find(term, pos + 1)) {
    const std::size_t end = pos + term.size();
    if (word_start && pos > 0 && detail::is_word_char(low[pos - 1])) continue;
    if (word_end && end < low.size() && detail::is_word_char(low[end])) continue;
    return pos;
  }
  return std::string::npos;
}

std::string normalize_term(std::string_view t) { return detail::collapse_spaces(detail::to_lower(detail::trim(t))); }

}  // namespace

SynonymTable SynonymTable::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("synonym table: expected a JSON object keyed by label");
  SynonymTable t;
  try {
    for (const auto& [label, syns] : j.items()) {
      auto& v = t.table_[normalize_term(label)];
      for (const auto& s : syns) v.push_back(s.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synonym table: ") + e.what());
  }
  return t;
}

SynonymTable SynonymTable::load(const std::string& path) {
  try {
    return from_json(detail::read_json_file(path));
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
}

const SynonymTable& SynonymTable::builtin() {
  static const SynonymTable t = from_json(detail::asset_json("synonyms.json"));
  return t;
}

std::vector<std::string> SynonymTable::lookup(std::string_view label) const {
  auto it = table_.find(normalize_term(label));
  return it == table_.end() ? std::vector<std::string>{} : it->second;
}

bool contains_term(std::string_view text, std::string_view term) {
  const std::string low = detail::collapse_spaces(detail::to_lower(text));
  return find_term(low, normalize_term(term), 0) != std::string::npos;
}

std::string censor_label(std::string_view trace, std::string_view label, const std::vector<std::string>& synonyms) {
  std::vector<std::string> terms;
  if (!normalize_term(label).empty()) terms.push_back(normalize_term(label));
  for (const auto& s : synonyms) {
    if (!normalize_term(s).empty()) terms.push_back(normalize_term(s));
  }
  // Longer terms first so "atrial fibrillation" goes before "af".
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });

  std::string text = detail::collapse_spaces(trace);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& term : terms) {
      std::string low = detail::to_lower(text);
      std::string kept;
      std::size_t cursor = 0;
      for (std::size_t pos = find_term(low, term, 0); pos != std::string::npos;
           pos = find_term(low, term, pos + term.size())) {
        kept.append(text, cursor, pos - cursor);
        cursor = pos + term.size();
        changed = true;
      }
      if (cursor == 0) continue;
      kept.append(text, cursor, std::string::npos);
      text = detail::collapse_spaces(kept);
    }
  }
  return text;
}

}  // namespace reasoneval
