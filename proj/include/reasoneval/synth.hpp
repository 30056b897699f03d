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
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "reasoneval/delineation.hpp"
#include "reasoneval/record.hpp"

namespace reasoneval {

enum class RrPattern {
  kNone,             // constant RR
  kRandom,           // i.i.d. uniform jitter, the atrial fibrillation look
  kBigeminy,         // alternating short/long
  kSinusArrhythmia,  // slow sinusoidal modulation
};

// Parameters of a synthetic 12-lead strip. Waves are piecewise-linear (QRS)
// and half-sine (P, T) with compact support, so the returned ground truth
// delineation is exact.
struct SynthSpec {
  std::string record_id = "synthetic";
  double hr_bpm = 60.0;
  RrPattern rr_pattern = RrPattern::kNone;
  double rr_jitter = 0.0;  // fraction of the mean RR
  double qrs_width_ms = 90.0;
  double pr_ms = 160.0;    // P onset to QRS onset
  double qt_ms = 400.0;    // QRS onset to T offset
  std::map<Lead, double> st_offset_mv;
  bool p_present = true;
  double t_polarity = 1.0;  // +1 upright, -1 inverted in every lead
  std::set<Lead> t_inverted_leads;
  double axis_deg = 60.0;   // frontal QRS axis
  double duration_s = 10.0;
  double fs_hz = 500.0;
  double noise_mv = 0.002;
  uint64_t seed = 1;
  std::vector<Lead> leads{kAllLeads.begin(), kAllLeads.end()};
};

struct SynthResult {
  EcgRecord record;
  Delineation truth;
  std::vector<double> rr_ms;  // ground-truth RR intervals
};

// Deterministic for a fixed spec (including seed). Throws InvalidArgument for
// non-physiologic or infeasible specs, e.g. PR + QT not fitting in the
// shortest RR interval.
SynthResult synthesize_ecg(const SynthSpec& spec);

// Keys mirror the struct fields; rr_pattern is one of none, random, bigeminy,
// sinus_arrhythmia. Missing keys keep defaults, unknown keys throw ConfigError.
SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json synth_spec_to_json(const SynthSpec& s);

}  // namespace reasoneval
