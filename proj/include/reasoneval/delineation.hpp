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

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "reasoneval/leads.hpp"
#include "reasoneval/record.hpp"

namespace reasoneval {

// Sample indices of wave landmarks for one lead. On/off arrays are paired:
// p_on[i] < p_off[i] < p_on[i + 1], and likewise for QRS and T.
struct LeadDelineation {
  std::vector<int> r_peaks;
  std::vector<int> p_on, p_off;
  std::vector<int> qrs_on, qrs_off;
  std::vector<int> t_on, t_off;

  bool operator==(const LeadDelineation&) const = default;
};

struct Delineation {
  std::string record_id;
  double fs_hz = 0.0;
  std::map<Lead, LeadDelineation> leads;

  bool operator==(const Delineation&) const = default;
};

// Throws FormatError describing the first violated invariant: unsorted or
// out-of-range indices, unmatched or inverted on/off pairs, overlapping waves,
// or a QRS window that does not contain exactly one R peak.
void validate_delineation(const Delineation& d, size_t n_samples);

nlohmann::json delineation_to_json(const Delineation& d);
Delineation delineation_from_json(const nlohmann::json& j);

void save_delineation(const Delineation& d, const std::filesystem::path& path);

// Loads an externally produced segmentation (for example from a neural
// delineator) and checks it against the record it describes.
Delineation import_delineation(const std::filesystem::path& path, const EcgRecord& rec);

enum class QtcFormula { kBazett, kFridericia };

struct DelineatorConfig {
  double bandpass_low_hz = 5.0;
  double bandpass_high_hz = 15.0;
  double integration_window_ms = 150.0;
  double refractory_ms = 200.0;
  // Weight kept by the running signal/noise peak estimates on each update.
  double threshold_decay = 0.875;
  bool search_back = true;
  QtcFormula qtc = QtcFormula::kBazett;

  // Throws InvalidArgument unless 0 < low < high < fs/2, refractory >= 120 ms
  // and decay is in (0, 1).
  void validate(double fs_hz) const;
};

// Pan-Tompkins style QRS detector: zero-phase band-pass, derivative, squaring,
// moving-window integration and adaptive dual thresholds. Returns R-peak sample
// indices, strictly increasing and at least refractory_ms apart. Requires two
// seconds of signal; a flat signal yields an empty result.
std::vector<int> detect_r_peaks(std::span<const float> samples, double fs_hz,
                                const DelineatorConfig& cfg);

// Detects beats on the most energetic lead, then snaps each beat to the
// dominant deflection of every lead.
std::map<Lead, std::vector<int>> locate_r_peaks(const EcgRecord& rec, const DelineatorConfig& cfg);

// Rule-based P/QRS/T boundary search around the given R peaks. Waves that
// cannot be found are omitted rather than guessed.
Delineation delineate_waves(const EcgRecord& rec, const std::map<Lead, std::vector<int>>& r_peaks);

inline Delineation delineate(const EcgRecord& rec, const DelineatorConfig& cfg) {
  return delineate_waves(rec, locate_r_peaks(rec, cfg));
}

}  // namespace reasoneval
