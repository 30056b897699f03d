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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

#include "reasoneval/synth.hpp"

namespace reasoneval::testing {

// Randomized synthetic spec covering HR 40-180 and QRS 70-160 ms, with and
// without P waves. Timing is shrunk where the beat would not fit.
inline SynthSpec sweep_spec(int index) {
  std::mt19937_64 g(1000 + static_cast<unsigned>(index));
  std::uniform_real_distribution<double> u(0, 1);
  SynthSpec sp;
  sp.record_id = "sweep" + std::to_string(index);
  sp.seed = static_cast<uint64_t>(index) + 1;
  sp.hr_bpm = 40 + 140 * u(g);
  sp.qrs_width_ms = 70 + 90 * u(g);
  sp.p_present = u(g) < 0.6;
  const double rr = 60000 / sp.hr_bpm;
  sp.pr_ms = 120 + 80 * u(g);
  sp.qt_ms = std::min(0.42 * std::sqrt(rr / 1000) * 1000, rr - 40 - (sp.p_present ? sp.pr_ms : 0) - 5);
  if (sp.qt_ms < sp.qrs_width_ms + 80) {
    sp.p_present = false;
    sp.qt_ms = std::min(sp.qrs_width_ms + 100, rr - 45);
  }
  if (sp.qt_ms < sp.qrs_width_ms + 80) sp.qrs_width_ms = sp.qt_ms - 80;
  sp.axis_deg = -30 + 120 * u(g);
  return sp;
}

struct MatchCounts {
  long tp = 0, fp = 0, fn = 0;
  double precision() const { return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0; }
  double recall() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0; }
};

// Greedy one-to-one matching of detections to truth within +-tol samples.
inline MatchCounts match_peaks(const std::vector<int>& truth, const std::vector<int>& found, int tol) {
  MatchCounts c;
  std::vector<bool> used(found.size(), false);
  for (int t : truth) {
    bool hit = false;
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (!used[i] && std::abs(found[i] - t) <= tol) {
        used[i] = true;
        hit = true;
        break;
      }
    }
    hit ? ++c.tp : ++c.fn;
  }
  c.fp = static_cast<long>(std::count(used.begin(), used.end(), false));
  return c;
}

}  // namespace reasoneval::testing
