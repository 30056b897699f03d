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

#include "reasoneval/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "signal_util.hpp"

namespace reasoneval {

using nlohmann::json;

namespace {

// Index of the first wave whose onset is > lo and offset < hi, or -1.
int find_wave_between(const std::vector<int>& on, const std::vector<int>& off, int lo, int hi) {
  auto it = std::upper_bound(on.begin(), on.end(), lo);
  if (it == on.end()) return -1;
  const auto k = static_cast<size_t>(it - on.begin());
  return off[k] < hi ? static_cast<int>(k) : -1;
}

std::optional<double> segment_mean(std::span<const float> x, int lo, int hi, int min_len) {
  lo = std::max(lo, 0);
  hi = std::min(hi, static_cast<int>(x.size()) - 1);
  if (hi - lo + 1 < min_len) return std::nullopt;
  double s = 0.0;
  for (int i = lo; i <= hi; ++i) s += x[static_cast<size_t>(i)];
  return s / (hi - lo + 1);
}

// Mean of the flattest (smallest range) window of length w inside [lo, hi].
// Guards the TP reference against P waves the delineator did not report.
std::optional<double> flattest_mean(std::span<const float> x, int lo, int hi, int w) {
  lo = std::max(lo, 0);
  hi = std::min(hi, static_cast<int>(x.size()) - 1);
  if (hi - lo + 1 < w) return std::nullopt;
  int best = lo;
  double best_range = INFINITY;
  for (int s = lo; s + w - 1 <= hi; ++s) {
    const auto [mn, mx] = std::minmax_element(x.begin() + s, x.begin() + s + w);
    if (*mx - *mn < best_range) {
      best_range = *mx - *mn;
      best = s;
    }
  }
  return segment_mean(x, best, best + w - 1, w);
}

// Signed extremum of x - base over [lo, hi].
double signed_extremum(std::span<const float> x, int lo, int hi, double base) {
  double best = 0.0;
  for (int i = lo; i <= hi; ++i) {
    const double v = x[static_cast<size_t>(i)] - base;
    if (std::abs(v) > std::abs(best)) best = v;
  }
  return best;
}

// Mean over beats, dropping the first and last beat when there are >= 3.
std::optional<double> trimmed_mean(const std::vector<std::optional<double>>& per_beat) {
  size_t lo = 0, hi = per_beat.size();
  if (per_beat.size() >= 3) {
    lo = 1;
    hi = per_beat.size() - 1;
  }
  double s = 0.0;
  int n = 0;
  for (size_t i = lo; i < hi; ++i) {
    if (per_beat[i]) {
      s += *per_beat[i];
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return s / n;
}

LeadFeatures lead_features(std::span<const float> x, double fs, const LeadDelineation& ld, QtcFormula qtc) {
  LeadFeatures f;
  f.delineation = ld;
  const auto to_ms = [fs](double samples) { return samples * 1000.0 / fs; };
  const int n = static_cast<int>(x.size());
  const int min_seg = std::max(3, static_cast<int>(std::lround(0.01 * fs)));
  const int j_offset = static_cast<int>(std::lround(0.04 * fs));

  for (size_t i = 1; i < ld.r_peaks.size(); ++i) f.rr_intervals_ms.push_back(to_ms(ld.r_peaks[i] - ld.r_peaks[i - 1]));
  if (!f.rr_intervals_ms.empty()) {
    f.rr_ms = detail::mean(f.rr_intervals_ms);
    f.heart_rate_bpm = 60000.0 / *f.rr_ms;
  }

  std::vector<double> lead_v(x.begin(), x.end());
  const double lead_median = detail::median(lead_v);

  const size_t nq = ld.qrs_on.size();
  f.n_qrs = static_cast<int>(nq);
  std::vector<std::optional<double>> pr(nq), qrs(nq), qt(nq), st_seg(nq), p_amp(nq), qrs_amp(nq), t_amp(nq),
      st_dev(nq), p2p(nq), r_wave(nq), s_wave(nq), area(nq);
  int with_p = 0;
  int prev_t_off = -1;
  for (size_t b = 0; b < nq; ++b) {
    const int qon = ld.qrs_on[b], qoff = ld.qrs_off[b];
    const int prev_qoff = b > 0 ? ld.qrs_off[b - 1] : -1;
    const int next_qon = b + 1 < nq ? ld.qrs_on[b + 1] : n;
    const int pk = find_wave_between(ld.p_on, ld.p_off, prev_qoff, qon);
    const int tk = find_wave_between(ld.t_on, ld.t_off, qoff, next_qon);

    // Isoelectric reference: TP, then PR, then the lead median.
    std::optional<double> base;
    if (prev_t_off >= 0)
      base = flattest_mean(x, prev_t_off + 1, (pk >= 0 ? ld.p_on[static_cast<size_t>(pk)] : qon) - 1, 2 * min_seg);
    if (!base && pk >= 0) base = segment_mean(x, ld.p_off[static_cast<size_t>(pk)] + 1, qon - 1, min_seg);
    const double ref = base.value_or(lead_median);

    if (pk >= 0) {
      const auto k = static_cast<size_t>(pk);
      ++with_p;
      pr[b] = to_ms(qon - ld.p_on[k]);
      p_amp[b] = signed_extremum(x, ld.p_on[k], ld.p_off[k], ref);
    }
    qrs[b] = to_ms(qoff - qon);
    auto r = std::lower_bound(ld.r_peaks.begin(), ld.r_peaks.end(), qon);
    if (r != ld.r_peaks.end() && *r <= qoff) qrs_amp[b] = x[static_cast<size_t>(*r)] - ref;
    double lo = 0.0, hi = 0.0, sum = 0.0;
    for (int i = qon; i <= qoff; ++i) {
      const double v = x[static_cast<size_t>(i)] - ref;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    p2p[b] = hi - lo;
    r_wave[b] = hi;
    s_wave[b] = -lo;
    area[b] = sum * 1000.0 / fs;

    if (tk >= 0) {
      const auto k = static_cast<size_t>(tk);
      const int ton = ld.t_on[k], toff = ld.t_off[k];
      qt[b] = to_ms(toff - qon);
      st_seg[b] = to_ms(ton - qoff);
      t_amp[b] = signed_extremum(x, ton, toff, ref);
      auto m = segment_mean(x, qoff + j_offset, ton - 1, 1);
      if (!m) m = x[static_cast<size_t>((qoff + ton) / 2)];
      st_dev[b] = *m - ref;
      prev_t_off = toff;
    } else {
      const int end = std::min(qoff + j_offset + j_offset / 2, next_qon - 1);
      auto m = segment_mean(x, qoff + j_offset, end, 1);
      if (m) st_dev[b] = *m - ref;
      prev_t_off = -1;
    }
  }

  f.p_wave_fraction = nq > 0 ? static_cast<double>(with_p) / static_cast<double>(nq) : 0.0;
  f.pr_ms = trimmed_mean(pr);
  f.qrs_ms = trimmed_mean(qrs);
  f.qt_ms = trimmed_mean(qt);
  f.st_segment_ms = trimmed_mean(st_seg);
  f.p_amp_mv = trimmed_mean(p_amp);
  f.qrs_amp_mv = trimmed_mean(qrs_amp);
  f.t_amp_mv = trimmed_mean(t_amp);
  f.st_deviation_mv = trimmed_mean(st_dev);
  f.qrs_peak_to_peak_mv = trimmed_mean(p2p);
  f.r_wave_mv = trimmed_mean(r_wave);
  f.s_wave_mv = trimmed_mean(s_wave);
  f.qrs_net_area = trimmed_mean(area);
  if (f.qt_ms && f.rr_ms) {
    const double rr_s = *f.rr_ms / 1000.0;
    f.qtc_ms = qtc == QtcFormula::kBazett ? *f.qt_ms / std::sqrt(rr_s) : *f.qt_ms / std::cbrt(rr_s);
  }
  return f;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

FeatureTable compute_features(const EcgRecord& rec, const Delineation& delin, QtcFormula qtc) {
  FeatureTable ft;
  ft.record_id = rec.record_id();
  ft.fs_hz = rec.sampling_rate_hz();
  ft.qtc = qtc;
  for (const auto& [lead, ld] : delin.leads) {
    if (!rec.has_lead(lead)) continue;
    ft.leads.emplace(lead, lead_features(rec.lead(lead), rec.sampling_rate_hz(), ld, qtc));
  }
  auto i = ft.leads.find(Lead::I), avf = ft.leads.find(Lead::aVF);
  if (i != ft.leads.end() && avf != ft.leads.end() && i->second.qrs_net_area && avf->second.qrs_net_area &&
      (*i->second.qrs_net_area != 0.0 || *avf->second.qrs_net_area != 0.0)) {
    ft.frontal_axis_deg =
        std::atan2(*avf->second.qrs_net_area, *i->second.qrs_net_area) * 180.0 / std::numbers::pi;
  }
  return ft;
}

json features_to_json(const FeatureTable& ft) {
  json leads = json::object();
  for (const auto& [lead, f] : ft.leads) {
    const LeadDelineation& d = f.delineation;
    leads[std::string(lead_name(lead))] = {
        {"avg_PR_interval_(msec)", opt(f.pr_ms)},
        {"avg_QRS_interval_(msec)", opt(f.qrs_ms)},
        {"avg_QT_interval_(msec)", opt(f.qt_ms)},
        {"avg_QTc_interval_(msec)", opt(f.qtc_ms)},
        {"avg_RR_interval_(msec)", opt(f.rr_ms)},
        {"avg_heart_rate_(bpm)", opt(f.heart_rate_bpm)},
        {"avg_ST_segment_(msec)", opt(f.st_segment_ms)},
        {"avg_P_peak_amp_(mv)", opt(f.p_amp_mv)},
        {"avg_QRS_peak_amp_(mv)", opt(f.qrs_amp_mv)},
        {"avg_T_peak_amp_(mv)", opt(f.t_amp_mv)},
        {"avg_ST_deviation_(mv)", opt(f.st_deviation_mv)},
        {"RR_intervals_(msec)", f.rr_intervals_ms},
        {"R_peak_idxs", d.r_peaks},
        {"P_on_idxs", d.p_on},
        {"P_off_idxs", d.p_off},
        {"QRS_on_idxs", d.qrs_on},
        {"QRS_off_idxs", d.qrs_off},
        {"T_on_idxs", d.t_on},
        {"T_off_idxs", d.t_off},
    };
  }
  return {{"record_id", ft.record_id},
          {"fs_hz", ft.fs_hz},
          {"qtc_formula", ft.qtc == QtcFormula::kBazett ? "bazett" : "fridericia"},
          {"frontal_axis_deg", opt(ft.frontal_axis_deg)},
          {"leads", std::move(leads)}};
}

std::optional<double> record_median(const FeatureTable& ft, std::optional<double> LeadFeatures::*field) {
  std::vector<double> v;
  for (const auto& [lead, f] : ft.leads) {
    if (f.*field) v.push_back(*(f.*field));
  }
  if (v.empty()) return std::nullopt;
  return detail::median(v);
}

}  // namespace reasoneval
