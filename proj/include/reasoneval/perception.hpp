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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reasoneval/adversarial.hpp"
#include "reasoneval/extract.hpp"
#include "reasoneval/features.hpp"
#include "reasoneval/finding.hpp"
#include "reasoneval/hash.hpp"
#include "reasoneval/limits.hpp"
#include "reasoneval/record.hpp"

namespace reasoneval {

enum class Status { kVerified, kRefuted, kUnverifiable };

struct Measurement {
  double value = 0.0;
  std::string unit;
  std::optional<Lead> lead;  // absent for record-level quantities
};

struct VerificationResult {
  std::string finding_id;
  Status status = Status::kUnverifiable;
  std::optional<Measurement> measured;  // the witness behind the verdict
  std::string rule_id;
  std::string reason;  // why a finding is unverifiable
  std::string quote;
};

struct TraceEvaluation {
  std::string trace_id;
  std::vector<VerificationResult> results;
  int n_verifiable = 0;
  int n_verified = 0;
  std::optional<double> verified_fraction;  // absent when nothing is verifiable
  bool zero_verifiable() const { return n_verifiable == 0; }
};

// A metric that may be undefined (empty denominator).
struct MetricValue {
  std::optional<double> value;
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  std::size_t excluded = 0;  // traces left out, e.g. zero verifiable findings
};

// The lead whose beats define record-level rate and rhythm: II when it has at
// least two R peaks, else the lead with the most R peaks.
std::optional<Lead> rhythm_lead(const FeatureTable& ft);

VerificationResult verify_finding(const Finding& f, const FeatureTable& ft, const EcgRecord& rec,
                                  const NormalLimits& limits);

TraceEvaluation verify_trace(const std::string& trace_id, const std::vector<Finding>& findings,
                             const FeatureTable& ft, const EcgRecord& rec, const NormalLimits& limits);

// Share of traces with verified_fraction >= p / 100. Zero-verifiable traces
// are excluded from the denominator. Throws InvalidArgument unless 0 < p <= 100.
MetricValue metric_acc_at_threshold(const std::vector<TraceEvaluation>& evals, double p);
// Pooled: sum of verified over sum of verifiable findings.
MetricValue metric_global_accuracy(const std::vector<TraceEvaluation>& evals);
// Mean of per-trace verified fractions over traces with a verifiable finding.
MetricValue metric_macro_accuracy(const std::vector<TraceEvaluation>& evals);

struct PerceptionMetrics {
  MetricValue acc_at_50;
  MetricValue acc_at_100;
  MetricValue global_pooled;
  MetricValue global_macro;
};

PerceptionMetrics perception_metrics(const std::vector<TraceEvaluation>& evals);

// One record with its expert note, ready for assessment.
struct AssessmentItem {
  std::string trace_id;
  const EcgRecord* record = nullptr;
  const FeatureTable* features = nullptr;
  std::string note;
};

struct AssessmentReport {
  std::string mode;  // "supporting" or "adversarial"
  std::vector<TraceEvaluation> traces;
  std::vector<std::vector<AppliedFlip>> flips;  // adversarial only, per trace
  std::vector<std::pair<std::string, std::string>> failures;  // trace_id, message
  PerceptionMetrics metrics;
};

struct AssessmentOptions {
  NormalLimits limits;
  const Lexicon* lexicon = nullptr;  // builtin when null
  int workers = 1;
};

// Extracts findings from each note and verifies them against its record.
AssessmentReport run_supporting_assessment(const std::vector<AssessmentItem>& items, const AssessmentOptions& opt);

// As above, but the extracted findings are flipped first. Each trace draws
// its flips from a seed derived from `seed` and the trace id, so results do
// not depend on item order or worker count.
AssessmentReport run_adversarial_assessment(const std::vector<AssessmentItem>& items, const AntonymMap& map,
                                            std::uint64_t seed, FlipMode mode, const AssessmentOptions& opt);

std::string to_string(Status s);
nlohmann::json verification_to_json(const VerificationResult& r);
nlohmann::json trace_evaluation_to_json(const TraceEvaluation& t);
nlohmann::json metric_to_json(const MetricValue& m);
nlohmann::json assessment_to_json(const AssessmentReport& r, const NormalLimits& limits);

}  // namespace reasoneval
