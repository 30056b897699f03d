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
#include <string>
#include <string_view>

#include "json.hpp"

namespace reasoneval {

// Clinical reference limits used by default thresholds and by the verifier.
// Every report echoes the limits it was produced with.
struct NormalLimits {
  double pr_min_ms = 120.0;
  double pr_max_ms = 200.0;
  double qrs_wide_ms = 120.0;
  double qtc_prolonged_ms = 460.0;  // sex-agnostic; the male cutoff is 450
  double rate_brady_bpm = 60.0;
  double rate_tachy_bpm = 100.0;
  double st_elev_mv = 0.1;
  double st_depr_mv = -0.05;
  double low_qrs_voltage_limb_mv = 0.5;
  double low_qrs_voltage_precordial_mv = 1.0;
  double axis_left_deg = -30.0;
  double axis_right_deg = 90.0;
  double rr_irregular_cv = 0.10;
  double irregularly_irregular_cv = 0.15;
  double premature_beat_ratio = 0.80;
  double rr_autocorr_max = 0.5;
  double p_present_fraction = 0.5;
  double sokolow_lyon_mv = 3.5;
  double p_tall_mv = 0.25;
  double t_peaked_mv = 1.0;
  double t_flat_mv = 0.1;

  // Throws ConfigError on non-finite values or inconsistent orderings.
  void validate() const;

  // Looks a limit up by its JSON key, e.g. "qrs_wide_ms".
  std::optional<double> by_name(std::string_view key) const;
};

nlohmann::json limits_to_json(const NormalLimits& l);
// Missing keys keep their defaults; unknown keys are a ConfigError.
NormalLimits limits_from_json(const nlohmann::json& j);

}  // namespace reasoneval
