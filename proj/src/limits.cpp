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

#include "reasoneval/limits.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "reasoneval/error.hpp"

namespace reasoneval {

namespace {

using Field = std::pair<const char*, double NormalLimits::*>;

constexpr std::array<Field, 21> kFields = {{
    {"pr_min_ms", &NormalLimits::pr_min_ms},
    {"pr_max_ms", &NormalLimits::pr_max_ms},
    {"qrs_wide_ms", &NormalLimits::qrs_wide_ms},
    {"qtc_prolonged_ms", &NormalLimits::qtc_prolonged_ms},
    {"rate_brady_bpm", &NormalLimits::rate_brady_bpm},
    {"rate_tachy_bpm", &NormalLimits::rate_tachy_bpm},
    {"st_elev_mv", &NormalLimits::st_elev_mv},
    {"st_depr_mv", &NormalLimits::st_depr_mv},
    {"low_qrs_voltage_limb_mv", &NormalLimits::low_qrs_voltage_limb_mv},
    {"low_qrs_voltage_precordial_mv", &NormalLimits::low_qrs_voltage_precordial_mv},
    {"axis_left_deg", &NormalLimits::axis_left_deg},
    {"axis_right_deg", &NormalLimits::axis_right_deg},
    {"rr_irregular_cv", &NormalLimits::rr_irregular_cv},
    {"irregularly_irregular_cv", &NormalLimits::irregularly_irregular_cv},
    {"premature_beat_ratio", &NormalLimits::premature_beat_ratio},
    {"rr_autocorr_max", &NormalLimits::rr_autocorr_max},
    {"p_present_fraction", &NormalLimits::p_present_fraction},
    {"sokolow_lyon_mv", &NormalLimits::sokolow_lyon_mv},
    {"p_tall_mv", &NormalLimits::p_tall_mv},
    {"t_peaked_mv", &NormalLimits::t_peaked_mv},
    {"t_flat_mv", &NormalLimits::t_flat_mv},
}};

}  // namespace

void NormalLimits::validate() const {
  for (const auto& [key, member] : kFields) {
    if (!std::isfinite(this->*member)) throw ConfigError(std::string("limits: ") + key + " is not finite");
  }
  if (!(rate_brady_bpm < rate_tachy_bpm)) throw ConfigError("limits: rate_brady_bpm must be below rate_tachy_bpm");
  if (!(axis_left_deg < axis_right_deg)) throw ConfigError("limits: axis_left_deg must be below axis_right_deg");
  if (!(pr_min_ms < pr_max_ms)) throw ConfigError("limits: pr_min_ms must be below pr_max_ms");
  if (!(st_depr_mv < st_elev_mv)) throw ConfigError("limits: st_depr_mv must be below st_elev_mv");
  if (!(rr_irregular_cv <= irregularly_irregular_cv))
    throw ConfigError("limits: rr_irregular_cv must not exceed irregularly_irregular_cv");
  if (!(premature_beat_ratio > 0.0 && premature_beat_ratio < 1.0))
    throw ConfigError("limits: premature_beat_ratio must be in (0, 1)");
}

std::optional<double> NormalLimits::by_name(std::string_view key) const {
  for (const auto& [name, member] : kFields) {
    if (key == name) return this->*member;
  }
  return std::nullopt;
}

nlohmann::json limits_to_json(const NormalLimits& l) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, member] : kFields) j[key] = l.*member;
  return j;
}

NormalLimits limits_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("limits: expected a JSON object");
  NormalLimits l;
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& [name, member] : kFields) {
      if (key != name) continue;
      if (!value.is_number()) throw ConfigError("limits: " + key + " must be a number");
      l.*member = value.get<double>();
      known = true;
    }
    if (!known) throw ConfigError("limits: unknown key " + key);
  }
  l.validate();
  return l;
}

}  // namespace reasoneval
