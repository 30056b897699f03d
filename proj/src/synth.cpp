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

#include "reasoneval/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "reasoneval/error.hpp"

namespace reasoneval {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinGapMs = 40.0;  // T offset to next P (or QRS) onset

// Hexaxial angle of each limb lead, degrees.
double limb_angle(Lead l) {
  switch (l) {
    case Lead::I: return 0.0;
    case Lead::II: return 60.0;
    case Lead::III: return 120.0;
    case Lead::aVR: return -150.0;
    case Lead::aVF: return 90.0;
    case Lead::aVL: return -30.0;
    default: return 0.0;
  }
}

struct LeadMorphology {
  std::array<double, 3> qrs;  // knot values at 15%, 45%, 75% of the QRS
  double p_amp;
  double t_amp;
};

LeadMorphology morphology(Lead l, double axis_deg) {
  constexpr double kDeg = kPi / 180.0;
  if (is_limb(l)) {
    const double g = std::cos((axis_deg - limb_angle(l)) * kDeg);
    const double gp = std::cos((50.0 - limb_angle(l)) * kDeg);
    return {{-0.10 * g, 1.10 * g, -0.30 * g}, 0.15 * gp, 0.30 * g};
  }
  switch (l) {
    case Lead::V1: return {{0.08, 0.30, -1.00}, 0.08, 0.12};
    case Lead::V2: return {{0.08, 0.50, -1.20}, 0.10, 0.30};
    case Lead::V3: return {{-0.05, 0.80, -0.70}, 0.10, 0.40};
    case Lead::V4: return {{-0.08, 1.30, -0.50}, 0.10, 0.40};
    case Lead::V5: return {{-0.10, 1.40, -0.30}, 0.10, 0.35};
    default: return {{-0.10, 1.10, -0.20}, 0.10, 0.30};
  }
}

// Box-Muller on top of mt19937_64 so output does not depend on the standard
// library's distribution implementations.
class Gaussian {
 public:
  explicit Gaussian(uint64_t seed) : rng_(seed) {}
  double uniform() { return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53; }
  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

void check_spec(const SynthSpec& s) {
  auto bad = [](const std::string& msg) { throw InvalidArgument("synthesize_ecg: " + msg); };
  if (!(s.hr_bpm >= 20.0 && s.hr_bpm <= 300.0)) bad("hr_bpm must be within 20-300");
  if (!(s.fs_hz >= 100.0)) bad("fs_hz must be >= 100");
  if (!(s.duration_s > 0.0)) bad("duration_s must be positive");
  if (!(s.qrs_width_ms >= 40.0 && s.qrs_width_ms <= 250.0)) bad("qrs_width_ms must be within 40-250");
  if (!(s.rr_jitter >= 0.0 && s.rr_jitter < 0.5)) bad("rr_jitter must be in [0, 0.5)");
  if (!(s.noise_mv >= 0.0)) bad("noise_mv must be non-negative");
  if (s.leads.empty()) bad("at least one lead required");
  const double rr_min = 60000.0 / s.hr_bpm * (1.0 - s.rr_jitter);
  const double qt_span = s.qt_ms - s.qrs_width_ms;
  if (!(qt_span >= 80.0)) bad("qt_ms must exceed qrs_width_ms by at least 80 ms");
  if (s.p_present && !(s.pr_ms >= 80.0)) bad("pr_ms must be >= 80 when P waves are present");
  const double needed = (s.p_present ? s.pr_ms : 0.0) + s.qt_ms + kMinGapMs;
  if (needed > rr_min)
    bad("infeasible timing: PR + QT + gap = " + std::to_string(needed) + " ms exceeds shortest RR " +
        std::to_string(rr_min) + " ms");
}

}  // namespace

SynthResult synthesize_ecg(const SynthSpec& spec) {
  check_spec(spec);
  const double fs = spec.fs_hz;
  const auto n = static_cast<int>(std::llround(spec.duration_s * fs));
  const auto ms = [fs](double v) { return static_cast<int>(std::llround(v * fs / 1000.0)); };

  const int qw = ms(spec.qrs_width_ms);
  const int qt = ms(spec.qt_ms);
  const int stw = ms(0.3 * (spec.qt_ms - spec.qrs_width_ms));
  const int pr = ms(spec.pr_ms);
  const int pw = ms(std::clamp(0.55 * spec.pr_ms, 60.0, 110.0));

  // Beat onsets.
  Gaussian rng(spec.seed);
  const double rr_mean = 60000.0 / spec.hr_bpm;
  std::vector<int> onsets;
  double t = std::max(0.5 * rr_mean, (spec.p_present ? spec.pr_ms : 0.0) + 50.0);
  for (int k = 0;; ++k) {
    const int on = ms(t);
    if (on + qw >= n) break;
    onsets.push_back(on);
    double factor = 1.0;
    switch (spec.rr_pattern) {
      case RrPattern::kNone: break;
      case RrPattern::kRandom: factor = 1.0 + spec.rr_jitter * (2.0 * rng.uniform() - 1.0); break;
      case RrPattern::kBigeminy: factor = (k % 2 == 0) ? 1.0 - spec.rr_jitter : 1.0 + spec.rr_jitter; break;
      case RrPattern::kSinusArrhythmia:
        factor = 1.0 + spec.rr_jitter * std::sin(2.0 * kPi * k / 5.0);
        break;
    }
    t += rr_mean * factor;
  }

  Delineation truth;
  truth.record_id = spec.record_id;
  truth.fs_hz = fs;
  LeadSamples leads;

  for (Lead lead : spec.leads) {
    if (leads.count(lead)) throw InvalidArgument("synthesize_ecg: duplicate lead");
    const LeadMorphology m = morphology(lead, spec.axis_deg);
    const double st = spec.st_offset_mv.count(lead) ? spec.st_offset_mv.at(lead) : 0.0;
    double t_amp = m.t_amp * spec.t_polarity;
    if (spec.t_inverted_leads.count(lead)) t_amp = -std::abs(t_amp);

    std::vector<double> x(static_cast<size_t>(n), 0.0);
    LeadDelineation& gt = truth.leads[lead];

    const std::array<double, 5> frac = {0.0, 0.15, 0.45, 0.75, 1.0};
    const std::array<double, 5> val = {0.0, m.qrs[0], m.qrs[1], m.qrs[2], st};
    int r_knot = 1;
    for (int k = 2; k <= 3; ++k) {
      if (std::abs(val[static_cast<size_t>(k)]) > std::abs(val[static_cast<size_t>(r_knot)])) r_knot = k;
    }

    for (int q0 : onsets) {
      // P wave.
      if (spec.p_present) {
        const int pon = q0 - pr, poff = pon + pw;
        for (int i = std::max(pon, 0); i <= poff && i < n; ++i)
          x[static_cast<size_t>(i)] += m.p_amp * std::sin(kPi * (i - pon) / (poff - pon));
        if (pon >= 0 && poff < n) {
          gt.p_on.push_back(pon);
          gt.p_off.push_back(poff);
        }
      }
      // QRS: piecewise linear through the knots.
      std::array<int, 5> knot{};
      for (size_t k = 0; k < 5; ++k) knot[k] = q0 + static_cast<int>(std::lround(frac[k] * qw));
      for (size_t k = 0; k + 1 < 5; ++k) {
        for (int i = knot[k]; i < knot[k + 1] && i < n; ++i) {
          const double u = static_cast<double>(i - knot[k]) / (knot[k + 1] - knot[k]);
          x[static_cast<size_t>(i)] += val[k] + u * (val[k + 1] - val[k]);
        }
      }
      const int qend = knot[4];
      gt.qrs_on.push_back(q0);
      gt.qrs_off.push_back(qend);
      gt.r_peaks.push_back(knot[static_cast<size_t>(r_knot)]);
      // ST segment then T wave riding a ramp back to baseline.
      const int ton = qend + stw, toff = q0 + qt;
      for (int i = qend; i < ton && i < n; ++i) x[static_cast<size_t>(i)] += st;
      for (int i = ton; i <= toff && i < n; ++i) {
        const double u = static_cast<double>(i - ton) / (toff - ton);
        x[static_cast<size_t>(i)] += st * (1.0 - u) + t_amp * std::sin(kPi * u);
      }
      if (toff < n) {
        gt.t_on.push_back(ton);
        gt.t_off.push_back(toff);
      }
    }

    std::vector<float> samples(static_cast<size_t>(n));
    for (size_t i = 0; i < samples.size(); ++i)
      samples[i] = static_cast<float>(x[i] + spec.noise_mv * rng.next());
    leads.emplace(lead, std::move(samples));
  }

  SynthResult out{EcgRecord(spec.record_id, fs, std::move(leads)), std::move(truth), {}};
  for (size_t i = 1; i < onsets.size(); ++i)
    out.rr_ms.push_back((onsets[i] - onsets[i - 1]) * 1000.0 / fs);
  return out;
}

}  // namespace reasoneval

namespace reasoneval {

namespace {

const std::array<std::pair<RrPattern, const char*>, 4> kPatterns{{{RrPattern::kNone, "none"},
                                                                  {RrPattern::kRandom, "random"},
                                                                  {RrPattern::kBigeminy, "bigeminy"},
                                                                  {RrPattern::kSinusArrhythmia, "sinus_arrhythmia"}}};

Lead config_lead(const nlohmann::json& v) {
  if (!v.is_string()) throw ConfigError("synth spec: lead names must be strings");
  auto l = parse_lead(v.get<std::string>());
  if (!l) throw ConfigError("synth spec: unknown lead '" + v.get<std::string>() + "'");
  return *l;
}

}  // namespace

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("synth spec: expected an object");
  SynthSpec s;
  for (const auto& [key, v] : j.items()) {
    auto num = [&]() {
      if (!v.is_number()) throw ConfigError("synth spec: " + key + " must be a number");
      return v.get<double>();
    };
    if (key == "record_id") {
      if (!v.is_string()) throw ConfigError("synth spec: record_id must be a string");
      s.record_id = v.get<std::string>();
    } else if (key == "hr_bpm") {
      s.hr_bpm = num();
    } else if (key == "rr_pattern") {
      const auto it = std::find_if(kPatterns.begin(), kPatterns.end(),
                                   [&](const auto& p) { return v.is_string() && v.get<std::string>() == p.second; });
      if (it == kPatterns.end()) throw ConfigError("synth spec: unknown rr_pattern");
      s.rr_pattern = it->first;
    } else if (key == "rr_jitter") {
      s.rr_jitter = num();
    } else if (key == "qrs_width_ms") {
      s.qrs_width_ms = num();
    } else if (key == "pr_ms") {
      s.pr_ms = num();
    } else if (key == "qt_ms") {
      s.qt_ms = num();
    } else if (key == "st_offset_mv") {
      if (!v.is_object()) throw ConfigError("synth spec: st_offset_mv must map leads to mV");
      for (const auto& [lead, mv] : v.items()) {
        if (!mv.is_number()) throw ConfigError("synth spec: st_offset_mv values must be numbers");
        s.st_offset_mv[config_lead(lead)] = mv.get<double>();
      }
    } else if (key == "p_present") {
      if (!v.is_boolean()) throw ConfigError("synth spec: p_present must be a boolean");
      s.p_present = v.get<bool>();
    } else if (key == "t_polarity") {
      s.t_polarity = num();
    } else if (key == "t_inverted_leads") {
      if (!v.is_array()) throw ConfigError("synth spec: t_inverted_leads must be an array");
      for (const auto& l : v) s.t_inverted_leads.insert(config_lead(l));
    } else if (key == "axis_deg") {
      s.axis_deg = num();
    } else if (key == "duration_s") {
      s.duration_s = num();
    } else if (key == "fs_hz") {
      s.fs_hz = num();
    } else if (key == "noise_mv") {
      s.noise_mv = num();
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError("synth spec: seed must be a non-negative integer");
      s.seed = v.get<uint64_t>();
    } else if (key == "leads") {
      if (!v.is_array()) throw ConfigError("synth spec: leads must be an array");
      s.leads.clear();
      for (const auto& l : v) s.leads.push_back(config_lead(l));
    } else {
      throw ConfigError("synth spec: unknown key '" + key + "'");
    }
  }
  return s;
}

nlohmann::json synth_spec_to_json(const SynthSpec& s) {
  nlohmann::json st = nlohmann::json::object();
  for (const auto& [l, mv] : s.st_offset_mv) st[std::string(lead_name(l))] = mv;
  nlohmann::json inv = nlohmann::json::array();
  for (auto l : s.t_inverted_leads) inv.push_back(std::string(lead_name(l)));
  nlohmann::json leads = nlohmann::json::array();
  for (auto l : s.leads) leads.push_back(std::string(lead_name(l)));
  const char* pattern = "none";
  for (const auto& [p, name] : kPatterns) {
    if (p == s.rr_pattern) pattern = name;
  }
  return {{"record_id", s.record_id}, {"hr_bpm", s.hr_bpm},          {"rr_pattern", pattern},
          {"rr_jitter", s.rr_jitter}, {"qrs_width_ms", s.qrs_width_ms}, {"pr_ms", s.pr_ms},
          {"qt_ms", s.qt_ms},         {"st_offset_mv", st},            {"p_present", s.p_present},
          {"t_polarity", s.t_polarity}, {"t_inverted_leads", inv},     {"axis_deg", s.axis_deg},
          {"duration_s", s.duration_s}, {"fs_hz", s.fs_hz},            {"noise_mv", s.noise_mv},
          {"seed", s.seed},           {"leads", leads}};
}

}  // namespace reasoneval
