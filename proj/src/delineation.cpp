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

#include "reasoneval/delineation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>

#include "io_util.hpp"
#include "reasoneval/error.hpp"
#include "signal_util.hpp"

namespace reasoneval {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Validation and JSON

namespace {

void check_increasing(const std::vector<int>& v, size_t n, const std::string& what) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0 || static_cast<size_t>(v[i]) >= n)
      throw FormatError(what + ": index " + std::to_string(v[i]) + " out of range [0, " +
                        std::to_string(n) + ")");
    if (i > 0 && v[i] <= v[i - 1]) throw FormatError(what + ": indices not strictly increasing");
  }
}

void check_pairs(const std::vector<int>& on, const std::vector<int>& off, const std::string& what) {
  if (on.size() != off.size())
    throw FormatError(what + ": " + std::to_string(on.size()) + " onsets vs " +
                      std::to_string(off.size()) + " offsets");
  for (size_t i = 0; i < on.size(); ++i) {
    if (off[i] <= on[i])
      throw FormatError(what + ": inverted boundary (offset " + std::to_string(off[i]) +
                        " <= onset " + std::to_string(on[i]) + ")");
    if (i + 1 < on.size() && off[i] >= on[i + 1])
      throw FormatError(what + ": wave " + std::to_string(i) + " overlaps the next one");
  }
}

const std::array<std::pair<const char*, std::vector<int> LeadDelineation::*>, 7> kFields = {{
    {"r_peak_idxs", &LeadDelineation::r_peaks},
    {"p_on_idxs", &LeadDelineation::p_on},
    {"p_off_idxs", &LeadDelineation::p_off},
    {"qrs_on_idxs", &LeadDelineation::qrs_on},
    {"qrs_off_idxs", &LeadDelineation::qrs_off},
    {"t_on_idxs", &LeadDelineation::t_on},
    {"t_off_idxs", &LeadDelineation::t_off},
}};

}  // namespace

void validate_delineation(const Delineation& d, size_t n_samples) {
  for (const auto& [lead, ld] : d.leads) {
    const std::string name(lead_name(lead));
    for (const auto& [key, member] : kFields) check_increasing(ld.*member, n_samples, name + "." + key);
    check_pairs(ld.p_on, ld.p_off, name + ".P");
    check_pairs(ld.qrs_on, ld.qrs_off, name + ".QRS");
    check_pairs(ld.t_on, ld.t_off, name + ".T");
    for (size_t i = 0; i < ld.qrs_on.size(); ++i) {
      auto lo = std::lower_bound(ld.r_peaks.begin(), ld.r_peaks.end(), ld.qrs_on[i]);
      auto hi = std::upper_bound(ld.r_peaks.begin(), ld.r_peaks.end(), ld.qrs_off[i]);
      if (hi - lo != 1)
        throw FormatError(name + ".QRS: window " + std::to_string(i) + " contains " +
                          std::to_string(hi - lo) + " R peaks, expected 1");
    }
  }
}

json delineation_to_json(const Delineation& d) {
  json leads = json::object();
  for (const auto& [lead, ld] : d.leads) {
    json entry = json::object();
    for (const auto& [key, member] : kFields) entry[key] = ld.*member;
    leads[std::string(lead_name(lead))] = std::move(entry);
  }
  return {{"record_id", d.record_id}, {"fs_hz", d.fs_hz}, {"leads", std::move(leads)}};
}

Delineation delineation_from_json(const json& j) {
  Delineation d;
  try {
    d.record_id = j.at("record_id").get<std::string>();
    d.fs_hz = j.at("fs_hz").get<double>();
    for (const auto& [name, entry] : j.at("leads").items()) {
      Lead lead = require_lead(name);
      LeadDelineation ld;
      for (const auto& [key, member] : kFields) {
        if (entry.contains(key)) ld.*member = entry.at(key).get<std::vector<int>>();
      }
      d.leads.emplace(lead, std::move(ld));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("delineation JSON: ") + e.what());
  }
  return d;
}

void save_delineation(const Delineation& d, const std::filesystem::path& path) {
  detail::write_text_file(path, delineation_to_json(d).dump() + "\n");
}

Delineation import_delineation(const std::filesystem::path& path, const EcgRecord& rec) {
  Delineation d = delineation_from_json(detail::read_json_file(path));
  if (std::abs(d.fs_hz - rec.sampling_rate_hz()) > 1e-9)
    throw FormatError(path.string() + ": fs_hz " + std::to_string(d.fs_hz) +
                      " does not match record rate " + std::to_string(rec.sampling_rate_hz()));
  for (const auto& [lead, ld] : d.leads) {
    if (!rec.has_lead(lead))
      throw FormatError(path.string() + ": lead " + std::string(lead_name(lead)) +
                        " not present in record " + rec.record_id());
  }
  try {
    validate_delineation(d, rec.n_samples());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return d;
}

void DelineatorConfig::validate(double fs_hz) const {
  if (!(bandpass_low_hz > 0.0 && bandpass_low_hz < bandpass_high_hz && bandpass_high_hz < fs_hz / 2.0))
    throw InvalidArgument("delineator: need 0 < bandpass_low < bandpass_high < fs/2");
  if (!(refractory_ms >= 120.0)) throw InvalidArgument("delineator: refractory_ms must be >= 120");
  if (!(threshold_decay > 0.0 && threshold_decay < 1.0))
    throw InvalidArgument("delineator: threshold_decay must be in (0, 1)");
  if (!(integration_window_ms > 0.0)) throw InvalidArgument("delineator: integration_window_ms must be positive");
}

// ---------------------------------------------------------------------------
// R-peak detection

std::vector<int> detect_r_peaks(std::span<const float> samples, double fs, const DelineatorConfig& cfg) {
  cfg.validate(fs);
  const auto n = static_cast<int>(samples.size());
  if (n < static_cast<int>(2.0 * fs)) throw InvalidArgument("detect_r_peaks: need at least 2 s of signal");

  std::vector<double> x(samples.begin(), samples.end());
  const double med = detail::median(x);
  for (double& v : x) v -= med;

  std::vector<double> bp = detail::bandpass(x, fs, cfg.bandpass_low_hz, cfg.bandpass_high_hz);

  std::vector<double> deriv(static_cast<size_t>(n), 0.0);
  for (int i = 2; i + 2 < n; ++i) {
    const auto u = static_cast<size_t>(i);
    deriv[u] = (2.0 * bp[u + 2] + bp[u + 1] - bp[u - 1] - 2.0 * bp[u - 2]) * fs / 8.0;
  }
  std::vector<double> sq(deriv.size());
  std::transform(deriv.begin(), deriv.end(), sq.begin(), [](double v) { return v * v; });
  const int win = std::max(1, static_cast<int>(std::lround(cfg.integration_window_ms * fs / 1000.0)));
  std::vector<double> integ = detail::centered_moving_average(sq, win);

  const double peak_all = *std::max_element(integ.begin(), integ.end());
  if (!(peak_all > 1e-12)) return {};

  const int refractory = static_cast<int>(std::lround(cfg.refractory_ms * fs / 1000.0));
  const int twave_window = static_cast<int>(std::lround(0.36 * fs));
  const int half = std::max(1, win / 2);

  // Candidate peaks: local maxima that dominate a half-window neighborhood.
  std::vector<int> cand;
  for (int i = 1; i + 1 < n; ++i) {
    const auto u = static_cast<size_t>(i);
    if (!(integ[u] > 0.0 && integ[u] >= integ[u - 1] && integ[u] > integ[u + 1])) continue;
    const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
    bool dominant = true;
    for (int k = lo; k <= hi && dominant; ++k) {
      if (integ[static_cast<size_t>(k)] > integ[u]) dominant = false;
    }
    if (dominant) cand.push_back(i);
  }

  auto slope_at = [&](int c) {
    double m = 0.0;
    for (int k = std::max(0, c - half); k <= std::min(n - 1, c + half); ++k)
      m = std::max(m, std::abs(deriv[static_cast<size_t>(k)]));
    return m;
  };

  const int learn = std::min(n, static_cast<int>(2.0 * fs));
  double spk = 0.25 * *std::max_element(integ.begin(), integ.begin() + learn);
  double npk = 0.5 * std::accumulate(integ.begin(), integ.begin() + learn, 0.0) / learn;
  const double a = cfg.threshold_decay;
  auto thr1 = [&] { return npk + 0.25 * (spk - npk); };

  std::vector<int> qrs;
  std::vector<double> qrs_slope;
  std::deque<int> rr_hist;
  std::vector<int> skipped;

  auto accept = [&](int c, double weight) {
    if (!qrs.empty()) {
      rr_hist.push_back(c - qrs.back());
      if (rr_hist.size() > 8) rr_hist.pop_front();
    }
    spk = (1.0 - weight) * spk + weight * integ[static_cast<size_t>(c)];
    qrs.push_back(c);
    qrs_slope.push_back(slope_at(c));
    skipped.clear();
  };

  for (int c : cand) {
    const double v = integ[static_cast<size_t>(c)];
    if (cfg.search_back && !qrs.empty() && rr_hist.size() >= 2) {
      const double rr_avg = std::accumulate(rr_hist.begin(), rr_hist.end(), 0.0) / rr_hist.size();
      if (c - qrs.back() > 1.66 * rr_avg) {
        int best = -1;
        for (int s : skipped) {
          if (s - qrs.back() < refractory || c - s < refractory) continue;
          if (integ[static_cast<size_t>(s)] > 0.5 * thr1() &&
              (best < 0 || integ[static_cast<size_t>(s)] > integ[static_cast<size_t>(best)]))
            best = s;
        }
        if (best >= 0) accept(best, 0.25);
      }
    }
    if (!qrs.empty() && c - qrs.back() < refractory) continue;
    bool is_qrs = v > thr1();
    if (is_qrs && !qrs.empty() && c - qrs.back() < twave_window && slope_at(c) < 0.5 * qrs_slope.back())
      is_qrs = false;  // probably a T wave
    if (is_qrs) {
      accept(c, 1.0 - a);
    } else {
      npk = a * npk + (1.0 - a) * v;
      skipped.push_back(c);
    }
  }

  // Snap to the dominant deflection of the raw signal.
  const int snap = std::max(1, static_cast<int>(std::lround(0.6 * win)));
  std::vector<int> peaks;
  for (int c : qrs) {
    int best = c;
    for (int k = std::max(0, c - snap); k <= std::min(n - 1, c + snap); ++k) {
      if (std::abs(x[static_cast<size_t>(k)]) > std::abs(x[static_cast<size_t>(best)])) best = k;
    }
    if (!peaks.empty() && best - peaks.back() < refractory) {
      if (std::abs(x[static_cast<size_t>(best)]) > std::abs(x[static_cast<size_t>(peaks.back())]))
        peaks.back() = best;
      continue;
    }
    peaks.push_back(best);
  }
  return peaks;
}

std::map<Lead, std::vector<int>> locate_r_peaks(const EcgRecord& rec, const DelineatorConfig& cfg) {
  // Reference lead: largest robust amplitude range.
  Lead ref = rec.lead_names().front();
  double best_range = -1.0;
  for (const auto& [lead, samples] : rec.leads()) {
    std::vector<double> v(samples.begin(), samples.end());
    const double range = detail::quantile(v, 0.995) - detail::quantile(v, 0.005);
    if (range > best_range) {
      best_range = range;
      ref = lead;
    }
  }
  const double fs = rec.sampling_rate_hz();
  const std::vector<int> beats = detect_r_peaks(rec.lead(ref), fs, cfg);
  const auto n = static_cast<int>(rec.n_samples());
  const int reach = static_cast<int>(std::lround(0.09 * fs));

  std::map<Lead, std::vector<int>> out;
  for (const auto& [lead, samples] : rec.leads()) {
    std::vector<double> v(samples.begin(), samples.end());
    const double med = detail::median(v);
    std::vector<int> peaks;
    for (size_t b = 0; b < beats.size(); ++b) {
      int lo = std::max(0, beats[b] - reach), hi = std::min(n - 1, beats[b] + reach);
      if (b > 0) lo = std::max(lo, (beats[b - 1] + beats[b]) / 2 + 1);
      if (b + 1 < beats.size()) hi = std::min(hi, (beats[b] + beats[b + 1]) / 2);
      int best = beats[b];
      for (int k = lo; k <= hi; ++k) {
        if (std::abs(v[static_cast<size_t>(k)] - med) > std::abs(v[static_cast<size_t>(best)] - med)) best = k;
      }
      if (peaks.empty() || best > peaks.back()) peaks.push_back(best);
    }
    out.emplace(lead, std::move(peaks));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wave boundaries

namespace {

// Smoothing half-width and derivative half-span, in samples.
constexpr int kSmoothHalf = 2;
constexpr int kDerivHalf = 2;
// Boundary slope thresholds relative to the wave's steepest slope.
constexpr double kPRelThreshold = 0.15;
constexpr double kTRelThreshold = 0.06;

struct LeadContext {
  std::vector<double> xs;     // smoothed signal
  std::vector<double> d;      // slope, mV/s
  double base = 0.0;          // lead median
  double noise = 0.0;         // sample noise sigma, mV
  double noise_slope = 0.0;   // robust slope noise level, mV/s
  double fs = 0.0;
  int n = 0;

  int ms(double v) const { return static_cast<int>(std::lround(v * fs / 1000.0)); }
  double abs_d(int i) const { return std::abs(d[static_cast<size_t>(i)]); }
  double x(int i) const { return xs[static_cast<size_t>(i)]; }
};

LeadContext make_context(std::span<const float> samples, double fs) {
  LeadContext c;
  c.fs = fs;
  c.n = static_cast<int>(samples.size());
  std::vector<double> raw(samples.begin(), samples.end());
  c.base = detail::median(raw);
  c.xs = detail::centered_moving_average(raw, 2 * kSmoothHalf + 1);
  c.d.assign(raw.size(), 0.0);
  for (int i = kDerivHalf; i + kDerivHalf < c.n; ++i) {
    const auto u = static_cast<size_t>(i);
    c.d[u] = (c.xs[u + kDerivHalf] - c.xs[u - kDerivHalf]) * fs / (2.0 * kDerivHalf);
  }
  // Second differences vanish on piecewise-linear and slow waves, so their
  // spread is dominated by sample noise.
  std::vector<double> dd;
  dd.reserve(raw.size());
  for (size_t i = 1; i + 1 < raw.size(); ++i) dd.push_back(std::abs(raw[i + 1] - 2.0 * raw[i] + raw[i - 1]));
  c.noise = 1.4826 * detail::median(dd) / std::sqrt(6.0);
  // Slope noise after 5-point smoothing and a 4-sample central difference.
  c.noise_slope = c.noise * std::sqrt(8.0) / 5.0 * fs / (2.0 * kDerivHalf);
  return c;
}

int argmax_abs_slope(const LeadContext& c, int lo, int hi) {
  int best = lo;
  for (int i = lo; i <= hi; ++i) {
    if (c.abs_d(i) > c.abs_d(best)) best = i;
  }
  return best;
}

// Walks from `from` in direction `step` (+1/-1) until `run` consecutive
// samples have |slope| below `thr`. Returns the first sample of that flat run
// (the one adjacent to the active region), or -1 if `limit` is reached first.
int walk_to_flat(const LeadContext& c, int from, int step, int limit, double thr, int run) {
  int count = 0;
  int first = -1;
  for (int i = from; step > 0 ? i <= limit : i >= limit; i += step) {
    if (i < 0 || i >= c.n) break;
    if (c.abs_d(i) < thr) {
      if (count == 0) first = i;
      if (++count >= run) return first;
    } else {
      count = 0;
    }
  }
  return -1;
}

struct Wave {
  int on = -1;
  int off = -1;
  bool ok() const { return on >= 0 && off > on; }
};

Wave find_qrs(const LeadContext& c, int r, int lo, int hi) {
  const int span = c.ms(150.0);
  const int left = std::max(lo, r - span), right = std::min(hi, r + span);
  if (right - left < c.ms(20.0)) return {};
  double max_slope = 0.0;
  for (int i = left; i <= right; ++i) max_slope = std::max(max_slope, c.abs_d(i));
  const double thr = std::max(0.04 * max_slope, 5.0 * c.noise_slope);
  const int run = std::max(2, c.ms(10.0));

  const int steep_left = argmax_abs_slope(c, left, r);
  const int steep_right = argmax_abs_slope(c, r, right);
  int on = walk_to_flat(c, steep_left, -1, left, thr, run);
  int off = walk_to_flat(c, steep_right, +1, right, thr, run);
  if (on < 0 || off < 0) return {};
  // The smoothed slope leaks a couple of samples past a sharp corner.
  on = std::min(on + kSmoothHalf, r);
  off = std::max(off - kSmoothHalf, r);
  if (off <= on) return {};
  double amp = 0.0;
  for (int i = on; i <= off; ++i) amp = std::max(amp, std::abs(c.x(i) - c.base));
  if (amp < std::max(0.05, 5.0 * c.noise)) return {};
  return {on, off};
}

// Locates a smooth wave (P or T) whose extremum lies in [lo, hi], measured
// against a reference line running from ref_lo at lo to ref_hi at hi.
Wave find_smooth_wave(const LeadContext& c, int lo, int hi, double ref_lo, double ref_hi, double min_amp,
                      int walk_lo, int walk_hi, int min_width, double rel_thr, bool knee_onset) {
  if (hi - lo < c.ms(20.0)) return {};
  auto ref = [&](int i) { return ref_lo + (ref_hi - ref_lo) * (i - lo) / std::max(1, hi - lo); };
  int peak = lo;
  double best = -1.0;
  for (int i = lo; i <= hi; ++i) {
    const double dev = std::abs(c.x(i) - ref(i));
    if (dev > best) {
      best = dev;
      peak = i;
    }
  }
  if (best < std::max(min_amp, 6.0 * c.noise)) return {};
  if (peak <= walk_lo || peak >= walk_hi) return {};

  const int steep_left = argmax_abs_slope(c, std::max(walk_lo, peak - c.ms(150.0)), peak);
  const int steep_right = argmax_abs_slope(c, peak, std::min(walk_hi, peak + c.ms(150.0)));
  const double max_slope = std::max(c.abs_d(steep_left), c.abs_d(steep_right));
  const double thr = std::max(rel_thr * max_slope, 5.0 * c.noise_slope);
  const int run = std::max(2, c.ms(10.0));
  int on = walk_to_flat(c, steep_left, -1, walk_lo, thr, run);
  int off = walk_to_flat(c, steep_right, +1, walk_hi, thr, run);
  if (knee_onset) {
    // Onset as the knee between the segment start and the peak: the sample
    // lying furthest on the outer side of the chord joining them.
    const int a = std::min(walk_lo + c.ms(10.0), peak - 1);
    const double sign = c.x(peak) >= c.x(a) ? 1.0 : -1.0;
    double best_gap = 0.0;
    int knee = -1;
    for (int i = a + 1; i < peak; ++i) {
      const double chord = c.x(a) + (c.x(peak) - c.x(a)) * (i - a) / (peak - a);
      const double gap = sign * (chord - c.x(i));
      if (gap > best_gap) {
        best_gap = gap;
        knee = i;
      }
    }
    if (knee >= 0) on = knee - kSmoothHalf;
  }
  if (on < 0 || off < 0) return {};
  on = std::min(on + kSmoothHalf, peak);
  off = std::max(off - kSmoothHalf, peak);
  if (off - on < min_width) return {};
  return {on, off};
}

LeadDelineation delineate_lead(std::span<const float> samples, double fs, const std::vector<int>& r_peaks) {
  LeadDelineation out;
  out.r_peaks = r_peaks;
  const LeadContext c = make_context(samples, fs);
  const int nb = static_cast<int>(r_peaks.size());
  if (nb == 0) return out;

  std::vector<Wave> qrs(static_cast<size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    const int r = r_peaks[static_cast<size_t>(b)];
    const int lo = b > 0 ? (r_peaks[static_cast<size_t>(b - 1)] + r) / 2 + 1 : 0;
    const int hi = b + 1 < nb ? (r + r_peaks[static_cast<size_t>(b + 1)]) / 2 : c.n - 1;
    qrs[static_cast<size_t>(b)] = find_qrs(c, r, lo, hi);
  }

  auto rr_around = [&](int b) {
    if (b + 1 < nb) return r_peaks[static_cast<size_t>(b + 1)] - r_peaks[static_cast<size_t>(b)];
    if (b > 0) return r_peaks[static_cast<size_t>(b)] - r_peaks[static_cast<size_t>(b - 1)];
    return c.ms(1000.0);
  };

  // T waves.
  std::vector<Wave> twave(static_cast<size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    const Wave& q = qrs[static_cast<size_t>(b)];
    if (!q.ok()) continue;
    const int rr = rr_around(b);
    const double rr_s = rr / fs;
    int end = q.on + std::max(c.ms(650.0 * std::sqrt(rr_s)), q.off - q.on + c.ms(120.0));
    int next_on = c.n - 1;
    if (b + 1 < nb) {
      const Wave& nq = qrs[static_cast<size_t>(b + 1)];
      next_on = nq.ok() ? nq.on : r_peaks[static_cast<size_t>(b + 1)] - c.ms(60.0);
    }
    end = std::min({end, next_on - c.ms(20.0), q.on + static_cast<int>(0.6 * rr), c.n - 1});
    const int start = q.off + c.ms(20.0);
    if (end - start < c.ms(60.0)) continue;
    const double j_level = c.x(std::min(q.off + 1, c.n - 1));
    twave[static_cast<size_t>(b)] =
        find_smooth_wave(c, start, end, j_level, c.base, 0.05, q.off + 1, std::min(next_on - 1, c.n - 1),
                         c.ms(40.0), kTRelThreshold, true);
  }

  // P waves.
  std::vector<Wave> pwave(static_cast<size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    const Wave& q = qrs[static_cast<size_t>(b)];
    if (!q.ok()) continue;
    int lo = std::max(0, q.on - c.ms(400.0));
    if (b > 0) {
      const Wave& pt = twave[static_cast<size_t>(b - 1)];
      const Wave& pq = qrs[static_cast<size_t>(b - 1)];
      if (pt.ok()) lo = std::max(lo, pt.off + 1);
      else if (pq.ok()) lo = std::max(lo, pq.off + c.ms(200.0));
      else lo = std::max(lo, r_peaks[static_cast<size_t>(b - 1)] + c.ms(250.0));
    }
    const int hi = q.on - c.ms(8.0);
    if (hi - lo < c.ms(40.0)) continue;
    double pr_level = 0.0;
    int cnt = 0;
    for (int i = std::max(0, q.on - 5); i <= std::max(0, q.on - 2); ++i, ++cnt) pr_level += c.x(i);
    pr_level /= std::max(1, cnt);
    pwave[static_cast<size_t>(b)] =
        find_smooth_wave(c, lo, hi, pr_level, pr_level, 0.04, lo, q.on - 1, c.ms(30.0), kPRelThreshold, false);
  }

  // Assemble while keeping every array ordered and non-overlapping.
  int last = -1;
  for (int b = 0; b < nb; ++b) {
    const Wave& p = pwave[static_cast<size_t>(b)];
    const Wave& q = qrs[static_cast<size_t>(b)];
    const Wave& t = twave[static_cast<size_t>(b)];
    if (!q.ok()) continue;
    if (q.on <= last) continue;
    if (p.ok() && p.on > last && p.off < q.on) {
      out.p_on.push_back(p.on);
      out.p_off.push_back(p.off);
    }
    out.qrs_on.push_back(q.on);
    out.qrs_off.push_back(q.off);
    last = q.off;
    const int next_r = b + 1 < nb ? r_peaks[static_cast<size_t>(b + 1)] : c.n;
    if (t.ok() && t.on > last && t.off < next_r) {
      out.t_on.push_back(t.on);
      out.t_off.push_back(t.off);
      last = t.off;
    }
  }
  return out;
}

}  // namespace

Delineation delineate_waves(const EcgRecord& rec, const std::map<Lead, std::vector<int>>& r_peaks) {
  Delineation d;
  d.record_id = rec.record_id();
  d.fs_hz = rec.sampling_rate_hz();
  for (const auto& [lead, peaks] : r_peaks) {
    d.leads.emplace(lead, delineate_lead(rec.lead(lead), rec.sampling_rate_hz(), peaks));
  }
  validate_delineation(d, rec.n_samples());
  return d;
}

}  // namespace reasoneval
