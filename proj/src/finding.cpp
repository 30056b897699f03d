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

#include "reasoneval/finding.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <regex>

#include "reasoneval/error.hpp"
#include "text_util.hpp"

namespace reasoneval {

using nlohmann::json;

namespace {

struct FeatureInfo {
  Feature feature;
  const char* id;
  const char* upper;  // comparator descriptor for GT/GE
  const char* lower;  // comparator descriptor for LT/LE
  bool signed_scale;  // "Depressed > 1mm" means below -1mm
};

constexpr std::array<FeatureInfo, 18> kFeatures = {{
    {Feature::kPR, "PR", "Prolonged", "Shortened", false},
    {Feature::kQRS, "QRS", "Wide", "Narrow", false},
    {Feature::kQT, "QT", "Prolonged", "Shortened", false},
    {Feature::kQTc, "QTc", "Prolonged", "Shortened", false},
    {Feature::kRR, "RR", "Prolonged", "Shortened", false},
    {Feature::kSTSegment, "ST_SEGMENT", "Prolonged", "Shortened", false},
    {Feature::kP, "P", "High", "Low", false},
    {Feature::kR, "R", "High", "Low", false},
    {Feature::kT, "T", "Peaked", "Flat", false},
    {Feature::kSTDeviation, "ST_DEVIATION", "Elevated", "Depressed", true},
    {Feature::kHeartRate, "HEART_RATE", "Fast", "Slow", false},
    {Feature::kFrontal, "FRONTAL", "Rightward", "Leftward", false},
    {Feature::kQrsVoltage, "QRS_VOLTAGE", "High", "Low", false},
    {Feature::kRegular, "REGULAR", "", "", false},
    {Feature::kIrregular, "IRREGULAR", "", "", false},
    {Feature::kIrregularlyIrregular, "IRREGULARLY_IRREGULAR", "", "", false},
    {Feature::kRhythmClass, "RHYTHM_CLASS", "", "", false},
    {Feature::kPrematureComplex, "PREMATURE_COMPLEX", "", "", false},
}};

const FeatureInfo& info(Feature f) {
  for (const auto& fi : kFeatures) {
    if (fi.feature == f) return fi;
  }
  throw InvalidArgument("unknown feature");
}

// Display name used in the template, per kind.
std::string display_name(FindingKind k, Feature f) {
  switch (f) {
    case Feature::kPR: return "PR Interval";
    case Feature::kQRS: return "QRS";
    case Feature::kQT: return "QT Interval";
    case Feature::kQTc: return "QTc Interval";
    case Feature::kRR: return "RR Interval";
    case Feature::kSTSegment: return "ST Segment Duration";
    case Feature::kP: return k == FindingKind::kAmplitude ? "P Wave Amplitude" : "P Wave";
    case Feature::kR: return "R Wave Amplitude";
    case Feature::kT: return k == FindingKind::kAmplitude ? "T Wave Amplitude" : "T Wave";
    case Feature::kSTDeviation: return "ST Segment";
    case Feature::kHeartRate: return "Heart Rate";
    case Feature::kFrontal: return "Axis";
    case Feature::kQrsVoltage: return "QRS Voltage";
    case Feature::kPrematureComplex: return "Premature Complex";
    default: return "Rhythm";
  }
}

struct NameEntry {
  const char* name;
  FindingKind kind;
  Feature feature;
};

// Accepted spellings of the template's [Feature] slot. Kinds listed for
// "p wave"/"t wave" are provisional; the morphology decides.
const std::vector<NameEntry>& feature_names() {
  static const std::vector<NameEntry> v = {
      {"pr interval", FindingKind::kInterval, Feature::kPR},
      {"pr", FindingKind::kInterval, Feature::kPR},
      {"qrs", FindingKind::kInterval, Feature::kQRS},
      {"qrs duration", FindingKind::kInterval, Feature::kQRS},
      {"qrs complex", FindingKind::kInterval, Feature::kQRS},
      {"qrs interval", FindingKind::kInterval, Feature::kQRS},
      {"qrs width", FindingKind::kInterval, Feature::kQRS},
      {"qt interval", FindingKind::kInterval, Feature::kQT},
      {"qt", FindingKind::kInterval, Feature::kQT},
      {"qtc interval", FindingKind::kInterval, Feature::kQTc},
      {"qtc", FindingKind::kInterval, Feature::kQTc},
      {"rr interval", FindingKind::kInterval, Feature::kRR},
      {"rr", FindingKind::kInterval, Feature::kRR},
      {"st segment duration", FindingKind::kInterval, Feature::kSTSegment},
      {"p wave amplitude", FindingKind::kAmplitude, Feature::kP},
      {"r wave amplitude", FindingKind::kAmplitude, Feature::kR},
      {"r wave", FindingKind::kAmplitude, Feature::kR},
      {"t wave amplitude", FindingKind::kAmplitude, Feature::kT},
      {"st segment", FindingKind::kAmplitude, Feature::kSTDeviation},
      {"st", FindingKind::kAmplitude, Feature::kSTDeviation},
      {"st deviation", FindingKind::kAmplitude, Feature::kSTDeviation},
      {"heart rate", FindingKind::kRate, Feature::kHeartRate},
      {"rate", FindingKind::kRate, Feature::kHeartRate},
      {"ventricular rate", FindingKind::kRate, Feature::kHeartRate},
      {"axis", FindingKind::kAxis, Feature::kFrontal},
      {"frontal axis", FindingKind::kAxis, Feature::kFrontal},
      {"qrs axis", FindingKind::kAxis, Feature::kFrontal},
      {"qrs voltage", FindingKind::kVoltage, Feature::kQrsVoltage},
      {"voltage", FindingKind::kVoltage, Feature::kQrsVoltage},
      {"p wave", FindingKind::kPresence, Feature::kP},
      {"p waves", FindingKind::kPresence, Feature::kP},
      {"t wave", FindingKind::kPolarity, Feature::kT},
      {"t waves", FindingKind::kPolarity, Feature::kT},
      {"premature complex", FindingKind::kEctopicBeat, Feature::kPrematureComplex},
      {"premature complexes", FindingKind::kEctopicBeat, Feature::kPrematureComplex},
      {"rhythm", FindingKind::kRhythm, Feature::kRegular},
  };
  return v;
}

// Qualitative morphology words.
struct QualWord {
  const char* word;
  Direction dir;
};

const std::vector<QualWord>& qual_words() {
  static const std::vector<QualWord> v = {
      {"normal", Direction::kWithinNormal},   {"within normal limits", Direction::kWithinNormal},
      {"abnormal", Direction::kOutsideNormal}, {"high", Direction::kAboveNormal},
      {"low", Direction::kBelowNormal},       {"inverted", Direction::kInverted},
      {"upright", Direction::kUpright},       {"absent", Direction::kAbsent},
      {"present", Direction::kPresent},       {"left deviated", Direction::kLeft},
      {"right deviated", Direction::kRight},
  };
  return v;
}

// Comparator descriptors and whether they point up (true) or down.
const std::vector<std::pair<const char*, bool>>& comparator_words() {
  static const std::vector<std::pair<const char*, bool>> v = {
      {"wide", true},      {"widened", true},    {"broad", true},    {"narrow", false},
      {"prolonged", true}, {"long", true},       {"shortened", false}, {"short", false},
      {"elevated", true},  {"elevation", true},  {"depressed", false}, {"depression", false},
      {"high", true},      {"tall", true},       {"low", false},     {"peaked", true},
      {"peak", true},      {"flat", false},      {"flattened", false}, {"fast", true},
      {"slow", false},     {"rightward", true},  {"right", true},    {"leftward", false},
      {"left", false},     {"increased", true},  {"decreased", false}, {"above", true},
      {"below", false},
  };
  return v;
}

bool points_up(Direction d) { return d == Direction::kGT || d == Direction::kGE; }

const char* op_text(Direction d) {
  switch (d) {
    case Direction::kGT: return ">";
    case Direction::kGE: return ">=";
    case Direction::kLT: return "<";
    default: return "<=";
  }
}

std::optional<Direction> parse_op(std::string_view s) {
  if (s == ">") return Direction::kGT;
  if (s == ">=" || s == "=>" || s == "≥") return Direction::kGE;
  if (s == "<") return Direction::kLT;
  if (s == "<=" || s == "=<" || s == "≤") return Direction::kLE;
  return std::nullopt;
}

std::optional<Unit> unit_from_text(std::string_view s) {
  const std::string u = detail::to_lower(s);
  if (u == "ms" || u == "msec") return Unit::kMs;
  if (u == "s" || u == "sec") return Unit::kS;
  if (u == "mv") return Unit::kMv;
  if (u == "mm") return Unit::kMm;
  if (u == "bpm") return Unit::kBpm;
  if (u == "deg" || u == "degrees" || u == "°") return Unit::kDeg;
  return std::nullopt;
}

bool unit_fits(FindingKind k, Unit u) {
  switch (k) {
    case FindingKind::kInterval: return u == Unit::kMs || u == Unit::kS;
    case FindingKind::kAmplitude:
    case FindingKind::kVoltage: return u == Unit::kMv || u == Unit::kMm;
    case FindingKind::kRate: return u == Unit::kBpm;
    case FindingKind::kAxis: return u == Unit::kDeg;
    default: return false;
  }
}

bool feature_in_kind(FindingKind k, Feature f) {
  switch (k) {
    case FindingKind::kInterval:
      return f == Feature::kPR || f == Feature::kQRS || f == Feature::kQT || f == Feature::kQTc ||
             f == Feature::kRR || f == Feature::kSTSegment;
    case FindingKind::kAmplitude:
      return f == Feature::kP || f == Feature::kR || f == Feature::kT || f == Feature::kSTDeviation;
    case FindingKind::kRate: return f == Feature::kHeartRate;
    case FindingKind::kRhythm:
      return f == Feature::kRegular || f == Feature::kIrregular || f == Feature::kIrregularlyIrregular ||
             f == Feature::kRhythmClass;
    case FindingKind::kPolarity:
    case FindingKind::kPresence: return f == Feature::kP || f == Feature::kT;
    case FindingKind::kAxis: return f == Feature::kFrontal;
    case FindingKind::kVoltage: return f == Feature::kQrsVoltage;
    case FindingKind::kEctopicBeat: return f == Feature::kPrematureComplex;
  }
  return false;
}

bool direction_fits(FindingKind k, Feature f, Direction d) {
  const bool cmp = is_comparator(d);
  const bool normal = d == Direction::kWithinNormal || d == Direction::kOutsideNormal;
  switch (k) {
    case FindingKind::kInterval: return cmp || (normal && f != Feature::kSTSegment);
    case FindingKind::kAmplitude: return cmp || (normal && f == Feature::kSTDeviation);
    case FindingKind::kRate: return cmp || normal;
    case FindingKind::kAxis: return cmp || normal || d == Direction::kLeft || d == Direction::kRight;
    case FindingKind::kVoltage:
      return cmp || normal || d == Direction::kAboveNormal || d == Direction::kBelowNormal;
    case FindingKind::kRhythm: return d == Direction::kPresent;
    case FindingKind::kPolarity: return d == Direction::kUpright || d == Direction::kInverted;
    case FindingKind::kPresence:
    case FindingKind::kEctopicBeat: return d == Direction::kPresent || d == Direction::kAbsent;
  }
  return false;
}

std::string title_case(std::string_view s) {
  std::string out(s);
  bool start = true;
  for (char& c : out) {
    if (start && std::isalpha(static_cast<unsigned char>(c))) c = static_cast<char>(std::toupper(c));
    start = c == ' ';
  }
  return out;
}

std::string qual_text(Direction d) {
  switch (d) {
    case Direction::kWithinNormal: return "Normal";
    case Direction::kOutsideNormal: return "Abnormal";
    case Direction::kAboveNormal: return "High";
    case Direction::kBelowNormal: return "Low";
    case Direction::kInverted: return "Inverted";
    case Direction::kUpright: return "Upright";
    case Direction::kAbsent: return "Absent";
    case Direction::kPresent: return "Present";
    case Direction::kLeft: return "Left Deviated";
    case Direction::kRight: return "Right Deviated";
    default: return "";
  }
}

std::string scope_text(const LeadScope& s) {
  if (s.leads.empty()) return s.quantifier == Quantifier::kAll ? "in leads all" : "in leads any";
  std::string list;
  for (Lead l : s.leads) {
    if (!list.empty()) list += ", ";
    list += lead_name(l);
  }
  return (s.quantifier == Quantifier::kAll ? "in leads " : "in any of leads ") + list;
}

std::optional<LeadScope> parse_scope(std::string_view text) {
  std::string t = detail::to_lower(detail::trim(text));
  LeadScope s;
  if (t == "leads any" || t == "any lead" || t == "any leads") return s;
  if (t == "leads all" || t == "all leads") {
    s.quantifier = Quantifier::kAll;
    return s;
  }
  std::string list;
  if (t.rfind("any of leads ", 0) == 0) {
    list = t.substr(13);
  } else if (t.rfind("leads ", 0) == 0) {
    s.quantifier = Quantifier::kAll;
    list = t.substr(6);
  } else if (t.rfind("lead ", 0) == 0) {
    s.quantifier = Quantifier::kAll;
    list = t.substr(5);
  } else {
    return std::nullopt;
  }
  for (const std::string& tok : detail::split_any(list, ", ")) {
    if (tok.empty() || tok == "and") continue;
    auto l = parse_lead(tok);
    if (!l) return std::nullopt;
    s.leads.insert(*l);
  }
  if (s.leads.empty()) return std::nullopt;
  return s;
}

}  // namespace

double Threshold::canonical_value() const {
  switch (unit) {
    case Unit::kS: return value * 1000.0;
    case Unit::kMm: return value * 0.1;
    default: return value;
  }
}

bool equivalent(const Finding& a, const Finding& b) {
  return a.kind == b.kind && a.feature == b.feature && a.rhythm_class == b.rhythm_class &&
         a.direction == b.direction && a.threshold == b.threshold && a.scope == b.scope;
}

bool is_comparator(Direction d) {
  return d == Direction::kGT || d == Direction::kGE || d == Direction::kLT || d == Direction::kLE;
}

Direction negate(Direction d) {
  switch (d) {
    case Direction::kGT: return Direction::kLE;
    case Direction::kGE: return Direction::kLT;
    case Direction::kLT: return Direction::kGE;
    case Direction::kLE: return Direction::kGT;
    default: return d;
  }
}

Direction mirror(Direction d) {
  switch (d) {
    case Direction::kGT: return Direction::kLT;
    case Direction::kGE: return Direction::kLE;
    case Direction::kLT: return Direction::kGT;
    case Direction::kLE: return Direction::kGE;
    default: return d;
  }
}

void validate_finding(const Finding& f) {
  if (!feature_in_kind(f.kind, f.feature))
    throw InvalidArgument("finding: feature " + to_string(f.feature) + " does not belong to kind " + to_string(f.kind));
  if (!direction_fits(f.kind, f.feature, f.direction))
    throw InvalidArgument("finding: direction " + to_string(f.direction) + " not applicable to " +
                          to_string(f.feature));
  if (is_comparator(f.direction)) {
    if (!f.threshold) throw InvalidArgument("finding: comparator without threshold");
    if (!unit_fits(f.kind, f.threshold->unit))
      throw InvalidArgument("finding: unit " + to_string(f.threshold->unit) + " does not fit " + to_string(f.kind));
    if (!std::isfinite(f.threshold->value)) throw InvalidArgument("finding: non-finite threshold");
  } else if (f.threshold) {
    throw InvalidArgument("finding: threshold given for a qualitative direction");
  }
  if (f.feature == Feature::kRhythmClass) {
    if (!normalize_rhythm_class(f.rhythm_class) || *normalize_rhythm_class(f.rhythm_class) != f.rhythm_class)
      throw InvalidArgument("finding: unknown rhythm class '" + f.rhythm_class + "'");
  } else if (!f.rhythm_class.empty()) {
    throw InvalidArgument("finding: rhythm_class set on a non-class finding");
  }
}

Direction apply_descriptor(Feature f, bool up, Direction op, double& value) {
  if (info(f).signed_scale && !up) {
    value = -value;
    return mirror(op);
  }
  return points_up(op) == up ? op : negate(op);
}

std::optional<Finding> negate_finding(const Finding& f) {
  Finding out = f;
  out.scope.quantifier = f.scope.quantifier == Quantifier::kAll ? Quantifier::kAny : Quantifier::kAll;
  if (is_comparator(f.direction)) {
    out.direction = negate(f.direction);
    return out;
  }
  switch (f.direction) {
    case Direction::kWithinNormal: out.direction = Direction::kOutsideNormal; return out;
    case Direction::kOutsideNormal: out.direction = Direction::kWithinNormal; return out;
    case Direction::kPresent:
      if (f.kind == FindingKind::kRhythm) {
        if (f.feature == Feature::kRegular) {
          out.feature = Feature::kIrregular;
        } else if (f.feature == Feature::kIrregular) {
          out.feature = Feature::kRegular;
        } else {
          return std::nullopt;
        }
        return out;
      }
      out.direction = Direction::kAbsent;
      return out;
    case Direction::kAbsent: out.direction = Direction::kPresent; return out;
    case Direction::kUpright: out.direction = Direction::kInverted; return out;
    case Direction::kInverted: out.direction = Direction::kUpright; return out;
    default: return std::nullopt;
  }
}

Unit default_unit(FindingKind k) {
  switch (k) {
    case FindingKind::kAmplitude:
    case FindingKind::kVoltage: return Unit::kMv;
    case FindingKind::kRate: return Unit::kBpm;
    case FindingKind::kAxis: return Unit::kDeg;
    default: return Unit::kMs;
  }
}

const std::vector<std::string>& rhythm_classes() {
  static const std::vector<std::string> v = {"sinus rhythm",        "sinus bradycardia", "sinus tachycardia",
                                             "atrial fibrillation", "atrial flutter",    "junctional rhythm"};
  return v;
}

std::optional<std::string> normalize_rhythm_class(std::string_view name) {
  static const std::map<std::string, std::string> aliases = {
      {"normal sinus rhythm", "sinus rhythm"},
      {"nsr", "sinus rhythm"},
      {"afib", "atrial fibrillation"},
      {"a-fib", "atrial fibrillation"},
      {"aflutter", "atrial flutter"},
      {"junctional", "junctional rhythm"},
  };
  std::string n = detail::collapse_spaces(detail::to_lower(detail::trim(name)));
  for (const auto& c : rhythm_classes()) {
    if (n == c) return c;
  }
  if (auto it = aliases.find(n); it != aliases.end()) return it->second;
  return std::nullopt;
}

std::string canonicalize(const Finding& f) {
  validate_finding(f);
  std::string out = display_name(f.kind, f.feature) + " is ";
  if (f.kind == FindingKind::kRhythm) {
    switch (f.feature) {
      case Feature::kRegular: out += "Regular"; break;
      case Feature::kIrregular: out += "Irregular"; break;
      case Feature::kIrregularlyIrregular: out += "Irregularly Irregular"; break;
      default: out += title_case(f.rhythm_class); break;
    }
  } else if (is_comparator(f.direction)) {
    const FeatureInfo& fi = info(f.feature);
    const bool up = points_up(f.direction);
    Direction op = f.direction;
    double value = f.threshold->value;
    if (fi.signed_scale && !up) {
      op = mirror(op);
      value = -value;
    }
    out += up ? fi.upper : fi.lower;
    out += " ";
    out += op_text(op);
    out += " ";
    out += format_number(value) + to_string(f.threshold->unit);
  } else {
    out += qual_text(f.direction);
  }
  return out + " " + scope_text(f.scope);
}

std::optional<Finding> parse_template(std::string_view raw) {
  std::string text = detail::collapse_spaces(detail::trim(raw));
  while (!text.empty() && (text.back() == '.' || text.back() == ';')) text.pop_back();
  const std::string lower = detail::to_lower(text);

  const auto is_pos = lower.find(" is ");
  if (is_pos == std::string::npos) return std::nullopt;
  const std::string feature_text = lower.substr(0, is_pos);
  std::string rest = lower.substr(is_pos + 4);

  LeadScope scope;
  const auto in_pos = rest.rfind(" in ");
  if (in_pos != std::string::npos) {
    auto s = parse_scope(rest.substr(in_pos + 4));
    if (!s) return std::nullopt;
    scope = *s;
    rest = rest.substr(0, in_pos);
  } else {
    return std::nullopt;
  }
  rest = std::string(detail::trim(rest));

  const NameEntry* entry = nullptr;
  for (const auto& e : feature_names()) {
    if (feature_text == e.name) entry = &e;
  }
  if (!entry) return std::nullopt;

  Finding f;
  f.kind = entry->kind;
  f.feature = entry->feature;
  f.scope = scope;

  if (f.kind == FindingKind::kRhythm) {
    f.direction = Direction::kPresent;
    if (rest == "regular") {
      f.feature = Feature::kRegular;
    } else if (rest == "irregular") {
      f.feature = Feature::kIrregular;
    } else if (rest == "irregularly irregular") {
      f.feature = Feature::kIrregularlyIrregular;
    } else if (auto c = normalize_rhythm_class(rest)) {
      f.feature = Feature::kRhythmClass;
      f.rhythm_class = *c;
    } else {
      return std::nullopt;
    }
    return f;
  }

  static const std::regex cmp_re(
      R"(^(.*?)\s*(>=|<=|=>|=<|>|<|≥|≤)\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:e[-+]?\d+)?)\s*(ms|msec|s|sec|mv|mm|bpm|deg|degrees)$)",
      std::regex::icase);
  std::smatch m;
  if (std::regex_match(rest, m, cmp_re)) {
    const std::string word = std::string(detail::trim(m[1].str()));
    auto op = parse_op(m[2].str());
    auto unit = unit_from_text(m[4].str());
    if (!op || !unit) return std::nullopt;
    double value = 0.0;
    const std::string num = m[3].str();
    const char* begin = num.data() + (num[0] == '+' ? 1 : 0);
    if (std::from_chars(begin, num.data() + num.size(), value).ec != std::errc()) return std::nullopt;
    if (f.kind == FindingKind::kPresence || f.kind == FindingKind::kPolarity) {
      if (f.feature == Feature::kP || f.feature == Feature::kT) f.kind = FindingKind::kAmplitude;
    }
    if (!unit_fits(f.kind, *unit)) return std::nullopt;
    Direction dir = *op;
    if (!word.empty()) {
      std::optional<bool> up;
      for (const auto& [w, u] : comparator_words()) {
        if (word == w) up = u;
      }
      if (!up) return std::nullopt;
      dir = apply_descriptor(f.feature, *up, dir, value);
    }
    f.direction = dir;
    f.threshold = Threshold{value, *unit};
  } else {
    std::optional<Direction> dir;
    for (const auto& q : qual_words()) {
      if (rest == q.word) dir = q.dir;
    }
    if (!dir) return std::nullopt;
    if (f.feature == Feature::kP || f.feature == Feature::kT) {
      if (*dir == Direction::kUpright || *dir == Direction::kInverted) f.kind = FindingKind::kPolarity;
      else if (*dir == Direction::kPresent || *dir == Direction::kAbsent) f.kind = FindingKind::kPresence;
    }
    f.direction = *dir;
  }
  if (!direction_fits(f.kind, f.feature, f.direction)) return std::nullopt;
  return f;
}

std::string to_string(FindingKind k) {
  switch (k) {
    case FindingKind::kInterval: return "Interval";
    case FindingKind::kAmplitude: return "Amplitude";
    case FindingKind::kRate: return "Rate";
    case FindingKind::kRhythm: return "Rhythm";
    case FindingKind::kPolarity: return "Polarity";
    case FindingKind::kPresence: return "Presence";
    case FindingKind::kAxis: return "Axis";
    case FindingKind::kVoltage: return "Voltage";
    case FindingKind::kEctopicBeat: return "EctopicBeat";
  }
  return "?";
}

std::string to_string(Feature f) { return info(f).id; }

std::string to_string(Direction d) {
  switch (d) {
    case Direction::kGT: return "GT";
    case Direction::kGE: return "GE";
    case Direction::kLT: return "LT";
    case Direction::kLE: return "LE";
    case Direction::kWithinNormal: return "WithinNormal";
    case Direction::kOutsideNormal: return "OutsideNormal";
    case Direction::kAboveNormal: return "AboveNormal";
    case Direction::kBelowNormal: return "BelowNormal";
    case Direction::kInverted: return "Inverted";
    case Direction::kUpright: return "Upright";
    case Direction::kAbsent: return "Absent";
    case Direction::kPresent: return "Present";
    case Direction::kLeft: return "Left";
    case Direction::kRight: return "Right";
  }
  return "?";
}

std::string to_string(Unit u) {
  switch (u) {
    case Unit::kMs: return "ms";
    case Unit::kS: return "s";
    case Unit::kMv: return "mV";
    case Unit::kMm: return "mm";
    case Unit::kBpm: return "bpm";
    case Unit::kDeg: return "deg";
  }
  return "?";
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::optional<Unit> parse_unit(std::string_view s) { return unit_from_text(s); }

std::optional<FindingKind> parse_kind(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(FindingKind::kEctopicBeat); ++i) {
    const auto k = static_cast<FindingKind>(i);
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<Feature> parse_feature(std::string_view s) {
  for (const auto& fi : kFeatures) {
    if (s == fi.id) return fi.feature;
  }
  return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(Direction::kRight); ++i) {
    const auto d = static_cast<Direction>(i);
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

json finding_to_json(const Finding& f) {
  json leads = json::array();
  for (Lead l : f.scope.leads) leads.push_back(std::string(lead_name(l)));
  json j = {
      {"finding_id", f.finding_id},
      {"kind", to_string(f.kind)},
      {"feature", to_string(f.feature)},
      {"direction", to_string(f.direction)},
      {"threshold", f.threshold ? json{{"value", f.threshold->value}, {"unit", to_string(f.threshold->unit)}}
                                : json(nullptr)},
      {"scope", {{"quantifier", f.scope.quantifier == Quantifier::kAll ? "all" : "any"}, {"leads", leads}}},
      {"quotes", f.quotes},
      {"canonical", canonicalize(f)},
  };
  if (f.feature == Feature::kRhythmClass) j["rhythm_class"] = f.rhythm_class;
  return j;
}

Finding finding_from_json(const json& j) {
  Finding f;
  try {
    f.finding_id = j.value("finding_id", "");
    const std::string kind = j.at("kind").get<std::string>();
    const std::string feat = j.at("feature").get<std::string>();
    const std::string dir = j.at("direction").get<std::string>();
    auto k = parse_kind(kind);
    auto fe = parse_feature(feat);
    auto d = parse_direction(dir);
    if (!k) throw FormatError("finding JSON: unknown kind '" + kind + "'");
    if (!fe) throw FormatError("finding JSON: unknown feature '" + feat + "'");
    if (!d) throw FormatError("finding JSON: unknown direction '" + dir + "'");
    f.kind = *k;
    f.feature = *fe;
    f.direction = *d;
    if (j.contains("threshold") && !j.at("threshold").is_null()) {
      const auto& t = j.at("threshold");
      auto unit = parse_unit(t.at("unit").get<std::string>());
      if (!unit) throw FormatError("finding JSON: unknown unit");
      f.threshold = Threshold{t.at("value").get<double>(), *unit};
    }
    if (j.contains("scope")) {
      const auto& s = j.at("scope");
      f.scope.quantifier = s.value("quantifier", "any") == "all" ? Quantifier::kAll : Quantifier::kAny;
      for (const auto& l : s.value("leads", json::array())) f.scope.leads.insert(require_lead(l.get<std::string>()));
    }
    f.rhythm_class = j.value("rhythm_class", "");
    f.quotes = j.value("quotes", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw FormatError(std::string("finding JSON: ") + e.what());
  }
  try {
    validate_finding(f);
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  return f;
}

}  // namespace reasoneval
