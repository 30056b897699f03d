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
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "reasoneval/leads.hpp"

namespace reasoneval {

enum class FindingKind { kInterval, kAmplitude, kRate, kRhythm, kPolarity, kPresence, kAxis, kVoltage, kEctopicBeat };

enum class Feature {
  // Interval
  kPR, kQRS, kQT, kQTc, kRR, kSTSegment,
  // Amplitude (kP and kT also serve Polarity and Presence)
  kP, kR, kT, kSTDeviation,
  kHeartRate,
  kFrontal,
  kQrsVoltage,
  // Rhythm
  kRegular, kIrregular, kIrregularlyIrregular, kRhythmClass,
  kPrematureComplex,
};

enum class Direction {
  kGT, kGE, kLT, kLE,
  kWithinNormal, kOutsideNormal, kAboveNormal, kBelowNormal,
  kInverted, kUpright,
  kAbsent, kPresent,
  kLeft, kRight,
};

enum class Unit { kMs, kS, kMv, kMm, kBpm, kDeg };

// A number as written in the source, plus its value in the unit the verifier
// compares in (ms, mV, bpm or deg).
struct Threshold {
  double value = 0.0;
  Unit unit = Unit::kMs;

  double canonical_value() const;
  bool operator==(const Threshold&) const = default;
};

enum class Quantifier { kAll, kAny };

// Empty `leads` means every lead available in the record.
struct LeadScope {
  Quantifier quantifier = Quantifier::kAny;
  std::set<Lead> leads;

  bool operator==(const LeadScope&) const = default;
};

struct Finding {
  std::string finding_id;
  FindingKind kind = FindingKind::kInterval;
  Feature feature = Feature::kQRS;
  std::string rhythm_class;  // canonical class name when feature == kRhythmClass
  Direction direction = Direction::kGT;
  std::optional<Threshold> threshold;
  LeadScope scope;
  std::vector<std::string> quotes;
};

// Same clinical claim: everything except id and quotes.
bool equivalent(const Finding& a, const Finding& b);

bool is_comparator(Direction d);
// GT <-> LE, GE <-> LT.
Direction negate(Direction d);
// GT <-> LT, GE <-> LE.
Direction mirror(Direction d);

// Throws InvalidArgument describing the first inconsistency: feature not in
// kind, direction not applicable, missing or unit-mismatched threshold.
void validate_finding(const Finding& f);

// Resolves a comparator written with a descriptor word ("Elevated", "Narrow").
// `up` is the descriptor's direction. For ST deviation a downward descriptor
// describes the magnitude below baseline, so the operator is mirrored and the
// value negated; elsewhere a contradicting operator yields to the descriptor.
Direction apply_descriptor(Feature f, bool up, Direction op, double& value);

// Logical negation ("no ST elevation"), with the quantifier swapped.
// Returns nullopt when the negation has no representation in the grammar.
std::optional<Finding> negate_finding(const Finding& f);

// Unit a threshold takes when the text gives a bare number.
Unit default_unit(FindingKind k);

// The six rhythm classes, in canonical lowercase form.
const std::vector<std::string>& rhythm_classes();
// "Atrial fibrillation" -> "atrial fibrillation"; also accepts a few
// aliases such as "normal sinus rhythm". nullopt if unknown.
std::optional<std::string> normalize_rhythm_class(std::string_view name);

// "[Feature] is [Morphology] [Operator] [Value][Unit] in leads [Leads]".
std::string canonicalize(const Finding& f);

struct Unverifiable {
  std::string reason;
};

using ParseResult = std::variant<Finding, Unverifiable>;

// Parses the controlled-vocabulary template. Returns nullopt when the text
// does not follow it (free text goes through the lexicon instead).
std::optional<Finding> parse_template(std::string_view text);

std::string to_string(FindingKind k);
std::string to_string(Feature f);
std::string to_string(Direction d);
std::string to_string(Unit u);
std::string format_number(double v);

std::optional<FindingKind> parse_kind(std::string_view s);
std::optional<Feature> parse_feature(std::string_view s);
std::optional<Direction> parse_direction(std::string_view s);
std::optional<Unit> parse_unit(std::string_view s);

nlohmann::json finding_to_json(const Finding& f);
Finding finding_from_json(const nlohmann::json& j);

}  // namespace reasoneval
