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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reasoneval/delineation.hpp"
#include "reasoneval/record.hpp"

namespace reasoneval {

// Per-lead summary of a delineated strip. Every scalar is optional: a value
// that cannot be measured (no P waves, a single beat) is absent, never zero.
struct LeadFeatures {
  std::optional<double> pr_ms;
  std::optional<double> qrs_ms;
  std::optional<double> qt_ms;
  std::optional<double> qtc_ms;
  std::optional<double> rr_ms;
  std::optional<double> heart_rate_bpm;
  std::optional<double> st_segment_ms;
  std::optional<double> p_amp_mv;
  std::optional<double> qrs_amp_mv;
  std::optional<double> t_amp_mv;
  std::optional<double> st_deviation_mv;
  std::vector<double> rr_intervals_ms;

  // Not part of the agent-facing dictionary but needed by the verifier.
  int n_qrs = 0;
  double p_wave_fraction = 0.0;  // share of QRS complexes preceded by a P wave
  std::optional<double> qrs_peak_to_peak_mv;
  // Largest positive and negative QRS deflections from baseline, both >= 0.
  std::optional<double> r_wave_mv;
  std::optional<double> s_wave_mv;
  std::optional<double> qrs_net_area;  // mV*ms, used for the frontal axis

  LeadDelineation delineation;
};

struct FeatureTable {
  std::string record_id;
  double fs_hz = 0.0;
  QtcFormula qtc = QtcFormula::kBazett;
  std::map<Lead, LeadFeatures> leads;
  std::optional<double> frontal_axis_deg;  // needs leads I and aVF
};

// ST deviation is sampled from J + 40 ms up to T onset and referenced to the
// TP segment (falling back to the PR segment, then the lead median). Per-beat
// values are averaged after dropping the first and last beat when there are
// at least three.
FeatureTable compute_features(const EcgRecord& rec, const Delineation& delin,
                              QtcFormula qtc = QtcFormula::kBazett);

// Keys follow the agent feature dictionary, e.g. "avg_PR_interval_(msec)";
// absent values are null.
nlohmann::json features_to_json(const FeatureTable& ft);

// Record-level value of a per-lead feature: the median across leads where it
// is defined.
std::optional<double> record_median(const FeatureTable& ft, std::optional<double> LeadFeatures::*field);

}  // namespace reasoneval
