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

#include "reasoneval/leads.hpp"

#include <cctype>

#include "reasoneval/error.hpp"

namespace reasoneval {

namespace {
constexpr std::array<std::string_view, kNumLeads> kNames = {
    "I", "II", "III", "aVR", "aVF", "aVL", "V1", "V2", "V3", "V4", "V5", "V6"};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}
}  // namespace

std::string_view lead_name(Lead l) { return kNames[static_cast<size_t>(lead_index(l))]; }

std::optional<Lead> parse_lead(std::string_view name) {
  for (size_t i = 0; i < kNames.size(); ++i) {
    if (iequals(name, kNames[i])) return static_cast<Lead>(i);
  }
  return std::nullopt;
}

Lead require_lead(std::string_view name) {
  auto l = parse_lead(name);
  if (!l) throw FormatError("unknown lead: " + std::string(name));
  return *l;
}

}  // namespace reasoneval
