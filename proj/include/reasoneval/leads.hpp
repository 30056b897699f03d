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

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace reasoneval {

// The twelve standard leads. Enumerator order is the canonical order used for
// storage and serialization: I, II, III, aVR, aVF, aVL, V1..V6.
enum class Lead : int { I = 0, II, III, aVR, aVF, aVL, V1, V2, V3, V4, V5, V6 };

inline constexpr int kNumLeads = 12;

inline constexpr std::array<Lead, kNumLeads> kAllLeads = {
    Lead::I,  Lead::II, Lead::III, Lead::aVR, Lead::aVF, Lead::aVL,
    Lead::V1, Lead::V2, Lead::V3,  Lead::V4,  Lead::V5,  Lead::V6};

inline constexpr std::array<Lead, 6> kLimbLeads = {Lead::I,   Lead::II,  Lead::III,
                                                   Lead::aVR, Lead::aVF, Lead::aVL};
inline constexpr std::array<Lead, 6> kPrecordialLeads = {Lead::V1, Lead::V2, Lead::V3,
                                                         Lead::V4, Lead::V5, Lead::V6};

constexpr int lead_index(Lead l) { return static_cast<int>(l); }

std::string_view lead_name(Lead l);

// Case-insensitive ("avf" -> aVF). Returns nullopt for anything else.
std::optional<Lead> parse_lead(std::string_view name);

// Like parse_lead but throws FormatError("unknown lead: ...").
Lead require_lead(std::string_view name);

inline bool is_limb(Lead l) { return lead_index(l) < 6; }

}  // namespace reasoneval
