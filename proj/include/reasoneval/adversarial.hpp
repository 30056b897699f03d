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

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "reasoneval/finding.hpp"

namespace reasoneval {

// Descriptor antonyms and the rhythm classes that replace one another.
struct AntonymMap {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<std::string> rhythm_classes;
  std::map<std::string, std::string> rhythm_aliases;  // alias -> class

  // Throws ConfigError when a word appears in more than one pair, which would
  // break the involution, or when fewer than two rhythm classes are given.
  static AntonymMap from_json(const nlohmann::json& j);
  static AntonymMap load(const std::string& path);
  static const AntonymMap& builtin();

  // Case-insensitive lookup of a single word; result is lower case.
  std::optional<std::string> antonym(std::string_view word) const;
  // Canonical class for a class name or alias, lower case.
  std::optional<std::string> rhythm_class(std::string_view phrase) const;
  // A class other than `cls`, uniform over the remaining ones.
  std::string other_rhythm_class(const std::string& cls, std::mt19937_64& rng) const;
};

enum class FlipMode { kAll, kOne };

struct AppliedFlip {
  std::string from;
  std::string to;
  std::size_t index = 0;  // character offset for text, position for findings
};

struct TextMutation {
  std::string text;
  std::vector<AppliedFlip> flips;
};

struct FindingsMutation {
  std::vector<Finding> findings;
  std::vector<AppliedFlip> flips;
};

// Flips one finding. Comparators, normal/abnormal, presence and polarity flip
// to their complement with the lead quantifier swapped; axis, voltage and
// rhythm findings flip to the antonym. Returns nullopt when nothing flips.
std::optional<Finding> flip_finding(const Finding& f, const AntonymMap& map, std::mt19937_64& rng);

FindingsMutation mutate_findings(const std::vector<Finding>& findings, const AntonymMap& map, std::uint64_t seed,
                                 FlipMode mode = FlipMode::kAll);

// Whole-word replacement of antonym words and rhythm class phrases in free
// text, preserving the case pattern of each replaced word.
TextMutation mutate_text(std::string_view text, const AntonymMap& map, std::uint64_t seed,
                         FlipMode mode = FlipMode::kAll);

std::optional<FlipMode> parse_flip_mode(std::string_view s);

}  // namespace reasoneval
