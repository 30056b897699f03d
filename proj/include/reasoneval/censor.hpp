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

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace reasoneval {

// Label -> synonyms and abbreviations removed along with the label.
class SynonymTable {
 public:
  static SynonymTable from_json(const nlohmann::json& j);
  static SynonymTable load(const std::string& path);
  static const SynonymTable& builtin();

  // Synonyms for a label, matched case-insensitively; empty when unknown.
  std::vector<std::string> lookup(std::string_view label) const;

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

// Removes every case-insensitive whole-word occurrence of the label and its
// synonyms, then collapses whitespace. Repeats until nothing matches, so
// removals that bring fragments together cannot leave a new occurrence.
std::string censor_label(std::string_view trace, std::string_view label, const std::vector<std::string>& synonyms);

// Whole-word, case-insensitive containment used by censor_label.
bool contains_term(std::string_view text, std::string_view term);

}  // namespace reasoneval
