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

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "reasoneval/finding.hpp"
#include "reasoneval/leads.hpp"
#include "reasoneval/limits.hpp"

namespace reasoneval {

// One pattern of the extraction lexicon. Entries of kind "LeadGroup" carry a
// lead expansion ("inferior leads" -> II, III, aVF) instead of a finding.
struct LexiconEntry {
  std::string pattern;
  std::regex re;
  bool lead_group = false;
  std::vector<Lead> expansion;

  FindingKind kind = FindingKind::kInterval;
  Feature feature = Feature::kQRS;
  // nullopt means "cmp": the operator and value must come from the text.
  std::optional<Direction> direction;
  std::optional<Threshold> default_value;
  std::string default_limit;  // NormalLimits key, resolved at extraction time
  // Entry only yields a finding under explicit negation ("no P waves").
  bool negation_only = false;
};

class Lexicon {
 public:
  // Throws ConfigError on malformed entries or invalid regular expressions.
  static Lexicon from_json(const nlohmann::json& j);
  static Lexicon load(const std::string& path);
  // The lexicon compiled into the library.
  static const Lexicon& builtin();

  const std::vector<LexiconEntry>& entries() const { return entries_; }

 private:
  std::vector<LexiconEntry> entries_;
};

struct ExtractionResult {
  std::vector<Finding> findings;
  // Sentences that produced no finding, including excluded ones.
  std::vector<std::string> residual;
};

// Splits a trace into sentences and extracts every lexicon finding. Artifact
// and pacemaker sentences and bare diagnosis names contribute no findings.
ExtractionResult extract_findings(std::string_view trace, const Lexicon& lexicon = Lexicon::builtin(),
                                  const NormalLimits& limits = {});

// Parses one claim: the canonical template first, then the lexicon.
ParseResult parse_finding(std::string_view text, const Lexicon& lexicon = Lexicon::builtin(),
                          const NormalLimits& limits = {});

// True for sentences the extractor ignores (artifact, noise, pacing).
bool is_excluded_sentence(std::string_view sentence);

}  // namespace reasoneval
