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

#include "reasoneval/perception.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "parallel.hpp"
#include "signal_util.hpp"
#include "reasoneval/error.hpp"

namespace reasoneval {

using nlohmann::json;

namespace {

using Getter = std::function<std::optional<double>(const LeadFeatures&)>;

Getter field(std::optional<double> LeadFeatures::*m) {
  return [m](const LeadFeatures& lf) { return lf.*m; };
}

Getter lead_getter(Feature f) {
  switch (f) {
    case Feature::kPR: return field(&LeadFeatures::pr_ms);
    case Feature::kQRS: return field(&LeadFeatures::qrs_ms);
    case Feature::kQT: return field(&LeadFeatures::qt_ms);
    case Feature::kQTc: return field(&LeadFeatures::qtc_ms);
    case Feature::kRR: return field(&LeadFeatures::rr_ms);
    case Feature::kSTSegment: return field(&LeadFeatures::st_segment_ms);
    case Feature::kP: return field(&LeadFeatures::p_amp_mv);
    case Feature::kR: return field(&LeadFeatures::r_wave_mv);
    case Feature::kT: return field(&LeadFeatures::t_amp_mv);
    case Feature::kSTDeviation: return field(&LeadFeatures::st_deviation_mv);
    case Feature::kQrsVoltage: return field(&LeadFeatures::qrs_peak_to_peak_mv);
    default: return [](const LeadFeatures&) { return std::optional<double>(); };
  }
}

const char* feature_unit(FindingKind k) {
  switch (k) {
    case FindingKind::kInterval: return "ms";
    case FindingKind::kAmplitude:
    case FindingKind::kVoltage: return "mV";
    case FindingKind::kRate: return "bpm";
    case FindingKind::kAxis: return "deg";
    default: return "";
  }
}

bool compare(double v, Direction d, double t) {
  switch (d) {
    case Direction::kGT: return v > t;
    case Direction::kGE: return v >= t;
    case Direction::kLT: return v < t;
    case Direction::kLE: return v <= t;
    default: return false;
  }
}

std::string rule_name(const Finding& f) {
  std::string s = to_string(f.kind) + "." + to_string(f.feature);
  if (f.feature == Feature::kRhythmClass) s += "." + f.rhythm_class;
  return s + "." + to_string(f.direction);
}

struct LeadValues {
  std::vector<std::pair<Lead, double>> values;
  std::string missing;  // non-empty when the finding cannot be checked
};

LeadValues collect(const Finding& f, const FeatureTable& ft, const EcgRecord& rec, const Getter& get) {
  LeadValues out;
  if (!f.scope.leads.empty()) {
    for (Lead l : f.scope.leads) {
      auto it = ft.leads.find(l);
      if (!rec.has_lead(l) || it == ft.leads.end()) {
        out.missing = "lead " + std::string(lead_name(l)) + " missing from record";
        return out;
      }
      auto v = get(it->second);
      if (!v) {
        out.missing = "feature undefined in lead " + std::string(lead_name(l));
        return out;
      }
      out.values.emplace_back(l, *v);
    }
    return out;
  }
  for (const auto& [l, lf] : ft.leads) {
    if (!rec.has_lead(l)) continue;
    if (auto v = get(lf)) out.values.emplace_back(l, *v);
  }
  if (out.values.empty()) out.missing = "feature undefined in every lead";
  return out;
}

VerificationResult unverifiable(const Finding& f, std::string reason) {
  VerificationResult r;
  r.finding_id = f.finding_id;
  r.status = Status::kUnverifiable;
  r.rule_id = rule_name(f);
  r.reason = std::move(reason);
  if (!f.quotes.empty()) r.quote = f.quotes.front();
  return r;
}

VerificationResult verdict(const Finding& f, bool ok, Measurement m) {
  VerificationResult r;
  r.finding_id = f.finding_id;
  r.status = ok ? Status::kVerified : Status::kRefuted;
  r.measured = std::move(m);
  r.rule_id = rule_name(f);
  if (!f.quotes.empty()) r.quote = f.quotes.front();
  return r;
}

// Any: some lead satisfies; All: every lead does. The witness is the first
// satisfying lead (Any) or the first failing lead (All).
VerificationResult per_lead(const Finding& f, const FeatureTable& ft, const EcgRecord& rec, const Getter& get,
                            const std::function<bool(Lead, double)>& pred, const std::string& unit) {
  const LeadValues lv = collect(f, ft, rec, get);
  if (!lv.missing.empty()) return unverifiable(f, lv.missing);
  const bool any = f.scope.quantifier == Quantifier::kAny;
  for (const auto& [l, v] : lv.values) {
    const bool ok = pred(l, v);
    if (any && ok) return verdict(f, true, {v, unit, l});
    if (!any && !ok) return verdict(f, false, {v, unit, l});
  }
  const auto& [l0, v0] = lv.values.front();
  return verdict(f, !any, {v0, unit, l0});
}

struct RhythmInfo {
  Lead lead;
  std::vector<double> rr;
  std::optional<double> hr;
  double p_fraction = 0.0;
};

std::optional<RhythmInfo> rhythm_info(const FeatureTable& ft) {
  auto l = rhythm_lead(ft);
  if (!l) return std::nullopt;
  const LeadFeatures& lf = ft.leads.at(*l);
  return RhythmInfo{*l, lf.rr_intervals_ms, lf.heart_rate_bpm, lf.p_wave_fraction};
}

double rr_cv(const std::vector<double>& rr) {
  const double m = std::accumulate(rr.begin(), rr.end(), 0.0) / static_cast<double>(rr.size());
  double ss = 0.0;
  for (double x : rr) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(rr.size())) / m;
}

// Largest signed autocorrelation of the RR sequence over lags 1..3.
double rr_max_autocorr(const std::vector<double>& rr) {
  const std::size_t n = rr.size();
  const double m = std::accumulate(rr.begin(), rr.end(), 0.0) / static_cast<double>(n);
  double den = 0.0;
  for (double x : rr) den += (x - m) * (x - m);
  double best = -1.0;
  for (std::size_t k = 1; k <= 3 && k < n; ++k) {
    double num = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) num += (rr[i] - m) * (rr[i + k] - m);
    best = std::max(best, den > 0.0 ? num / den : 0.0);
  }
  return best;
}

constexpr std::size_t kMinRhythmIntervals = 3;

bool in_normal_range(Feature f, double v, const NormalLimits& lim) {
  switch (f) {
    case Feature::kPR: return v >= lim.pr_min_ms && v <= lim.pr_max_ms;
    case Feature::kQRS: return v < lim.qrs_wide_ms;
    case Feature::kQT:
    case Feature::kQTc: return v < lim.qtc_prolonged_ms;
    case Feature::kRR: return v >= 60000.0 / lim.rate_tachy_bpm && v <= 60000.0 / lim.rate_brady_bpm;
    case Feature::kSTDeviation: return v > lim.st_depr_mv && v < lim.st_elev_mv;
    case Feature::kHeartRate: return v >= lim.rate_brady_bpm && v <= lim.rate_tachy_bpm;
    case Feature::kFrontal: return v >= lim.axis_left_deg && v <= lim.axis_right_deg;
    default: return false;
  }
}

VerificationResult verify_rhythm(const Finding& f, const FeatureTable& ft, const NormalLimits& lim) {
  auto ri = rhythm_info(ft);
  if (!ri || ri->rr.size() < kMinRhythmIntervals) return unverifiable(f, "too few beats for a rhythm judgement");
  const double cv = rr_cv(ri->rr);
  const Measurement cv_m{cv, "cv", ri->lead};
  switch (f.feature) {
    case Feature::kRegular: return verdict(f, cv <= lim.rr_irregular_cv, cv_m);
    case Feature::kIrregular: return verdict(f, cv > lim.rr_irregular_cv, cv_m);
    case Feature::kIrregularlyIrregular:
      return verdict(f, cv > lim.irregularly_irregular_cv && rr_max_autocorr(ri->rr) < lim.rr_autocorr_max, cv_m);
    default: break;
  }
  if (!ri->hr) return unverifiable(f, "heart rate undefined");
  const double hr = *ri->hr;
  const bool p = ri->p_fraction >= lim.p_present_fraction;
  const bool regular = cv <= lim.rr_irregular_cv;
  const bool irr_irr = cv > lim.irregularly_irregular_cv && rr_max_autocorr(ri->rr) < lim.rr_autocorr_max;
  bool ok = false;
  const std::string& c = f.rhythm_class;
  if (c == "sinus rhythm") {
    ok = p && hr >= lim.rate_brady_bpm && hr <= lim.rate_tachy_bpm;
  } else if (c == "sinus bradycardia") {
    ok = p && hr < lim.rate_brady_bpm;
  } else if (c == "sinus tachycardia") {
    ok = p && hr > lim.rate_tachy_bpm;
  } else if (c == "atrial fibrillation") {
    ok = !p && irr_irr;
  } else if (c == "atrial flutter") {
    ok = !p && regular && hr > lim.rate_tachy_bpm;
  } else if (c == "junctional rhythm") {
    ok = !p && regular && hr <= lim.rate_tachy_bpm;
  } else {
    return unverifiable(f, "no rule for rhythm class '" + c + "'");
  }
  return verdict(f, ok, {hr, "bpm", ri->lead});
}

VerificationResult verify_voltage(const Finding& f, const FeatureTable& ft, const EcgRecord& rec,
                                  const NormalLimits& lim) {
  const Getter p2p = field(&LeadFeatures::qrs_peak_to_peak_mv);
  if (is_comparator(f.direction)) {
    const double t = f.threshold->canonical_value();
    return per_lead(f, ft, rec, p2p, [&](Lead, double v) { return compare(v, f.direction, t); }, "mV");
  }
  auto group_low = [&](const auto& group, double limit) -> std::optional<std::pair<bool, Measurement>> {
    double worst = -1.0;
    Lead at = group.front();
    int n = 0;
    for (Lead l : group) {
      auto it = ft.leads.find(l);
      if (!rec.has_lead(l) || it == ft.leads.end() || !it->second.qrs_peak_to_peak_mv) continue;
      ++n;
      if (*it->second.qrs_peak_to_peak_mv > worst) {
        worst = *it->second.qrs_peak_to_peak_mv;
        at = l;
      }
    }
    if (n < 3) return std::nullopt;
    return std::make_pair(worst < limit, Measurement{worst, "mV", at});
  };
  auto low = [&]() -> std::optional<std::pair<bool, Measurement>> {
    auto limb = group_low(kLimbLeads, lim.low_qrs_voltage_limb_mv);
    auto pre = group_low(kPrecordialLeads, lim.low_qrs_voltage_precordial_mv);
    if (!limb && !pre) return std::nullopt;
    if (limb && limb->first) return limb;
    if (pre && pre->first) return pre;
    return limb ? limb : pre;
  };
  auto high = [&]() -> std::optional<std::pair<bool, Measurement>> {
    auto v1 = ft.leads.find(Lead::V1);
    if (v1 == ft.leads.end() || !v1->second.s_wave_mv) return std::nullopt;
    std::optional<double> r;
    for (Lead l : {Lead::V5, Lead::V6}) {
      auto it = ft.leads.find(l);
      if (it != ft.leads.end() && it->second.r_wave_mv) r = std::max(r.value_or(0.0), *it->second.r_wave_mv);
    }
    if (!r) return std::nullopt;
    const double sl = *v1->second.s_wave_mv + *r;
    return std::make_pair(sl >= lim.sokolow_lyon_mv, Measurement{sl, "mV", std::nullopt});
  };
  switch (f.direction) {
    case Direction::kBelowNormal: {
      if (!f.scope.leads.empty()) {
        return per_lead(
            f, ft, rec, p2p,
            [&](Lead l, double v) {
              return v < (is_limb(l) ? lim.low_qrs_voltage_limb_mv : lim.low_qrs_voltage_precordial_mv);
            },
            "mV");
      }
      auto r = low();
      if (!r) return unverifiable(f, "too few leads for a voltage judgement");
      return verdict(f, r->first, r->second);
    }
    case Direction::kAboveNormal: {
      auto r = high();
      if (!r) return unverifiable(f, "Sokolow-Lyon needs V1 and V5 or V6");
      return verdict(f, r->first, r->second);
    }
    case Direction::kWithinNormal:
    case Direction::kOutsideNormal: {
      auto lo = low();
      auto hi = high();
      if (!lo || !hi) return unverifiable(f, "voltage criteria need limb, precordial, V1 and V5/V6 leads");
      const bool abnormal = lo->first || hi->first;
      return verdict(f, (f.direction == Direction::kOutsideNormal) == abnormal, hi->second);
    }
    default: return unverifiable(f, "direction not applicable to voltage");
  }
}

}  // namespace

std::optional<Lead> rhythm_lead(const FeatureTable& ft) {
  auto ii = ft.leads.find(Lead::II);
  if (ii != ft.leads.end() && ii->second.delineation.r_peaks.size() >= 2) return Lead::II;
  std::optional<Lead> best;
  std::size_t most = 0;
  for (const auto& [l, lf] : ft.leads) {
    if (lf.delineation.r_peaks.size() > most) {
      most = lf.delineation.r_peaks.size();
      best = l;
    }
  }
  if (most < 2) return std::nullopt;
  return best;
}

VerificationResult verify_finding(const Finding& f, const FeatureTable& ft, const EcgRecord& rec,
                                  const NormalLimits& lim) {
  try {
    validate_finding(f);
  } catch (const InvalidArgument& e) {
    return unverifiable(f, e.what());
  }
  switch (f.kind) {
    case FindingKind::kInterval:
    case FindingKind::kAmplitude: {
      const Getter get = lead_getter(f.feature);
      const std::string unit = feature_unit(f.kind);
      if (is_comparator(f.direction)) {
        const double t = f.threshold->canonical_value();
        return per_lead(f, ft, rec, get, [&](Lead, double v) { return compare(v, f.direction, t); }, unit);
      }
      // QT has no rate-independent normal range; judge it through QTc.
      const Feature range_feature = f.feature == Feature::kQT ? Feature::kQTc : f.feature;
      const Getter range_get = lead_getter(range_feature);
      const bool want = f.direction == Direction::kWithinNormal;
      return per_lead(f, ft, rec, range_get,
                      [&](Lead, double v) { return in_normal_range(range_feature, v, lim) == want; }, unit);
    }
    case FindingKind::kRate: {
      auto ri = rhythm_info(ft);
      if (!ri || !ri->hr) return unverifiable(f, "heart rate undefined");
      const Measurement m{*ri->hr, "bpm", ri->lead};
      if (is_comparator(f.direction)) return verdict(f, compare(*ri->hr, f.direction, f.threshold->value), m);
      const bool normal = in_normal_range(Feature::kHeartRate, *ri->hr, lim);
      return verdict(f, (f.direction == Direction::kWithinNormal) == normal, m);
    }
    case FindingKind::kAxis: {
      if (!ft.frontal_axis_deg) return unverifiable(f, "frontal axis undefined (needs leads I and aVF)");
      const double a = *ft.frontal_axis_deg;
      const Measurement m{a, "deg", std::nullopt};
      switch (f.direction) {
        case Direction::kLeft: return verdict(f, a < lim.axis_left_deg, m);
        case Direction::kRight: return verdict(f, a > lim.axis_right_deg, m);
        case Direction::kWithinNormal: return verdict(f, in_normal_range(Feature::kFrontal, a, lim), m);
        case Direction::kOutsideNormal: return verdict(f, !in_normal_range(Feature::kFrontal, a, lim), m);
        default: return verdict(f, compare(a, f.direction, f.threshold->value), m);
      }
    }
    case FindingKind::kVoltage: return verify_voltage(f, ft, rec, lim);
    case FindingKind::kRhythm: return verify_rhythm(f, ft, lim);
    case FindingKind::kPolarity: {
      const Getter get = lead_getter(f.feature);
      const bool upright = f.direction == Direction::kUpright;
      return per_lead(f, ft, rec, get, [&](Lead, double v) { return upright ? v > 0.0 : v < 0.0; }, "mV");
    }
    case FindingKind::kPresence: {
      Getter get;
      std::string unit;
      std::function<bool(double)> present;
      if (f.feature == Feature::kP) {
        get = [](const LeadFeatures& lf) {
          return lf.n_qrs > 0 ? std::optional<double>(lf.p_wave_fraction) : std::nullopt;
        };
        unit = "fraction";
        present = [&](double v) { return v >= lim.p_present_fraction; };
      } else {
        get = [](const LeadFeatures& lf) {
          if (lf.n_qrs == 0) return std::optional<double>();
          return std::optional<double>(static_cast<double>(lf.delineation.t_on.size()) / lf.n_qrs);
        };
        unit = "fraction";
        present = [](double v) { return v >= 0.5; };
      }
      const bool want = f.direction == Direction::kPresent;
      return per_lead(f, ft, rec, get, [&](Lead, double v) { return present(v) == want; }, unit);
    }
    case FindingKind::kEctopicBeat: {
      auto ri = rhythm_info(ft);
      if (!ri || ri->rr.size() < kMinRhythmIntervals) return unverifiable(f, "too few beats to judge ectopy");
      // Each interval against the one before it; a median reference fails
      // once ectopic beats make up half the rhythm, as in bigeminy.
      double ratio = 1.0;
      for (std::size_t i = 1; i < ri->rr.size(); ++i) ratio = std::min(ratio, ri->rr[i] / ri->rr[i - 1]);
      const bool premature = ratio < lim.premature_beat_ratio;
      return verdict(f, premature == (f.direction == Direction::kPresent), {ratio, "ratio", ri->lead});
    }
  }
  return unverifiable(f, "unsupported finding");
}

TraceEvaluation verify_trace(const std::string& trace_id, const std::vector<Finding>& findings,
                             const FeatureTable& ft, const EcgRecord& rec, const NormalLimits& limits) {
  TraceEvaluation t;
  t.trace_id = trace_id;
  for (const Finding& f : findings) {
    t.results.push_back(verify_finding(f, ft, rec, limits));
    const Status s = t.results.back().status;
    if (s != Status::kUnverifiable) ++t.n_verifiable;
    if (s == Status::kVerified) ++t.n_verified;
  }
  if (t.n_verifiable > 0) t.verified_fraction = static_cast<double>(t.n_verified) / t.n_verifiable;
  return t;
}

MetricValue metric_acc_at_threshold(const std::vector<TraceEvaluation>& evals, double p) {
  if (!(p > 0.0 && p <= 100.0)) throw InvalidArgument("threshold percent must be in (0, 100]");
  MetricValue m;
  for (const auto& t : evals) {
    if (!t.verified_fraction) {
      ++m.excluded;
      continue;
    }
    ++m.denominator;
    if (*t.verified_fraction >= p / 100.0) ++m.numerator;
  }
  if (m.denominator > 0) m.value = static_cast<double>(m.numerator) / static_cast<double>(m.denominator);
  return m;
}

MetricValue metric_global_accuracy(const std::vector<TraceEvaluation>& evals) {
  MetricValue m;
  for (const auto& t : evals) {
    m.numerator += static_cast<std::size_t>(t.n_verified);
    m.denominator += static_cast<std::size_t>(t.n_verifiable);
    if (t.zero_verifiable()) ++m.excluded;
  }
  if (m.denominator > 0) m.value = static_cast<double>(m.numerator) / static_cast<double>(m.denominator);
  return m;
}

MetricValue metric_macro_accuracy(const std::vector<TraceEvaluation>& evals) {
  MetricValue m;
  double sum = 0.0;
  for (const auto& t : evals) {
    if (!t.verified_fraction) {
      ++m.excluded;
      continue;
    }
    ++m.denominator;
    sum += *t.verified_fraction;
  }
  m.numerator = m.denominator;
  if (m.denominator > 0) m.value = sum / static_cast<double>(m.denominator);
  return m;
}

PerceptionMetrics perception_metrics(const std::vector<TraceEvaluation>& evals) {
  return {metric_acc_at_threshold(evals, 50.0), metric_acc_at_threshold(evals, 100.0),
          metric_global_accuracy(evals), metric_macro_accuracy(evals)};
}

namespace {

AssessmentReport run_assessment(const std::vector<AssessmentItem>& items, const AssessmentOptions& opt,
                                 const AntonymMap* map, std::uint64_t seed, FlipMode mode) {
  const Lexicon& lex = opt.lexicon ? *opt.lexicon : Lexicon::builtin();
  struct Slot {
    TraceEvaluation eval;
    std::vector<AppliedFlip> flips;
    std::string error;
  };
  std::vector<Slot> slots(items.size());
  detail::parallel_for(items.size(), opt.workers, [&](std::size_t i) {
    const AssessmentItem& it = items[i];
    Slot& s = slots[i];
    try {
      if (!it.record || !it.features) throw InvalidArgument("item has no record or features");
      std::vector<Finding> findings = extract_findings(it.note, lex, opt.limits).findings;
      if (map) {
        FindingsMutation mut = mutate_findings(findings, *map, seed ^ stable_hash(it.trace_id), mode);
        findings = std::move(mut.findings);
        s.flips = std::move(mut.flips);
      }
      s.eval = verify_trace(it.trace_id, findings, *it.features, *it.record, opt.limits);
    } catch (const std::exception& e) {
      s.error = e.what();
    }
  });
  AssessmentReport r;
  r.mode = map ? "adversarial" : "supporting";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!slots[i].error.empty()) {
      r.failures.emplace_back(items[i].trace_id, slots[i].error);
      continue;
    }
    r.traces.push_back(std::move(slots[i].eval));
    if (map) r.flips.push_back(std::move(slots[i].flips));
  }
  r.metrics = perception_metrics(r.traces);
  return r;
}

}  // namespace

AssessmentReport run_supporting_assessment(const std::vector<AssessmentItem>& items, const AssessmentOptions& opt) {
  return run_assessment(items, opt, nullptr, 0, FlipMode::kAll);
}

AssessmentReport run_adversarial_assessment(const std::vector<AssessmentItem>& items, const AntonymMap& map,
                                            std::uint64_t seed, FlipMode mode, const AssessmentOptions& opt) {
  return run_assessment(items, opt, &map, seed, mode);
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kVerified: return "Verified";
    case Status::kRefuted: return "Refuted";
    case Status::kUnverifiable: return "Unverifiable";
  }
  return "?";
}

json verification_to_json(const VerificationResult& r) {
  json j = {{"finding_id", r.finding_id}, {"status", to_string(r.status)}, {"rule_id", r.rule_id},
            {"quote", r.quote}};
  if (r.measured) {
    j["measured"] = {{"value", r.measured->value},
                     {"unit", r.measured->unit},
                     {"lead", r.measured->lead ? json(std::string(lead_name(*r.measured->lead))) : json(nullptr)}};
  } else {
    j["measured"] = nullptr;
  }
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

json trace_evaluation_to_json(const TraceEvaluation& t) {
  json results = json::array();
  for (const auto& r : t.results) results.push_back(verification_to_json(r));
  return {{"trace_id", t.trace_id},
          {"results", results},
          {"n_verifiable", t.n_verifiable},
          {"n_verified", t.n_verified},
          {"verified_fraction", t.verified_fraction ? json(*t.verified_fraction) : json(nullptr)},
          {"zero_verifiable", t.zero_verifiable()}};
}

json metric_to_json(const MetricValue& m) {
  return {{"value", m.value ? json(*m.value) : json(nullptr)},
          {"numerator", m.numerator},
          {"denominator", m.denominator},
          {"excluded", m.excluded}};
}

json assessment_to_json(const AssessmentReport& r, const NormalLimits& limits) {
  json traces = json::array();
  for (std::size_t i = 0; i < r.traces.size(); ++i) {
    json t = trace_evaluation_to_json(r.traces[i]);
    if (i < r.flips.size()) {
      json flips = json::array();
      for (const auto& f : r.flips[i]) flips.push_back({{"from", f.from}, {"to", f.to}, {"index", f.index}});
      t["flips"] = flips;
    }
    traces.push_back(std::move(t));
  }
  json failures = json::array();
  for (const auto& [id, msg] : r.failures) failures.push_back({{"trace_id", id}, {"error", msg}});
  return {{"mode", r.mode},
          {"limits", limits_to_json(limits)},
          {"metrics",
           {{"acc_at_thresh_50", metric_to_json(r.metrics.acc_at_50)},
            {"acc_at_thresh_100", metric_to_json(r.metrics.acc_at_100)},
            {"global_accuracy_micro", metric_to_json(r.metrics.global_pooled)},
            {"global_accuracy_macro", metric_to_json(r.metrics.global_macro)}}},
          {"traces", traces},
          {"failures", failures}};
}

}  // namespace reasoneval
