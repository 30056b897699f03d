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

#include "reasoneval/extract.hpp"

#include <algorithm>
#include <cmath>

#include "assets.hpp"
#include "io_util.hpp"
#include "reasoneval/error.hpp"
#include "text_util.hpp"

namespace reasoneval {

using nlohmann::json;

namespace {

constexpr auto kIcase = std::regex::ECMAScript | std::regex::icase;

std::optional<Unit> limit_unit(std::string_view key) {
  auto ends = [&](std::string_view suf) {
    return key.size() >= suf.size() && key.substr(key.size() - suf.size()) == suf;
  };
  if (ends("_ms")) return Unit::kMs;
  if (ends("_mv")) return Unit::kMv;
  if (ends("_bpm")) return Unit::kBpm;
  if (ends("_deg")) return Unit::kDeg;
  return std::nullopt;
}

LexiconEntry entry_from_json(const json& j, std::size_t index) {
  const std::string where = "lexicon entry " + std::to_string(index) + ": ";
  LexiconEntry e;
  try {
    e.pattern = j.at("pattern").get<std::string>();
    e.re = std::regex(e.pattern, kIcase);
  } catch (const std::regex_error& ex) {
    throw ConfigError(where + "bad pattern: " + ex.what());
  } catch (const json::exception& ex) {
    throw ConfigError(where + ex.what());
  }
  const std::string kind = j.value("kind", "");
  if (kind == "LeadGroup") {
    e.lead_group = true;
    if (!j.contains("lead_group_expansion") || !j["lead_group_expansion"].is_array())
      throw ConfigError(where + "LeadGroup without lead_group_expansion");
    for (const auto& l : j["lead_group_expansion"]) {
      auto lead = parse_lead(l.get<std::string>());
      if (!lead) throw ConfigError(where + "unknown lead '" + l.get<std::string>() + "'");
      e.expansion.push_back(*lead);
    }
    return e;
  }
  auto k = parse_kind(kind);
  auto f = parse_feature(j.value("feature", ""));
  if (!k) throw ConfigError(where + "unknown kind '" + kind + "'");
  if (!f) throw ConfigError(where + "unknown feature '" + j.value("feature", "") + "'");
  e.kind = *k;
  e.feature = *f;
  const std::string dir = j.value("direction", "");
  if (dir != "cmp") {
    e.direction = parse_direction(dir);
    if (!e.direction) throw ConfigError(where + "unknown direction '" + dir + "'");
  }
  if (j.contains("default_threshold")) {
    const auto& t = j["default_threshold"];
    if (t.contains("limit")) {
      e.default_limit = t["limit"].get<std::string>();
      if (!NormalLimits{}.by_name(e.default_limit) || !limit_unit(e.default_limit))
        throw ConfigError(where + "unknown limit '" + e.default_limit + "'");
    } else {
      auto unit = parse_unit(t.value("unit", ""));
      if (!unit || !t.contains("value") || !t["value"].is_number())
        throw ConfigError(where + "default_threshold needs a limit or a value and unit");
      e.default_value = Threshold{t["value"].get<double>(), *unit};
    }
  }
  if (e.direction && is_comparator(*e.direction) && e.default_limit.empty() && !e.default_value)
    throw ConfigError(where + "comparator direction without default_threshold");
  e.negation_only = j.value("negation_only", false);
  return e;
}

struct Sentence {
  std::size_t begin;
  std::size_t end;
};

// Sentence boundaries: . ! ? ; and newlines, except a period inside a number.
std::vector<Sentence> split_sentences(std::string_view t) {
  std::vector<Sentence> out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    if (end > start) out.push_back({start, end});
    start = end + 1;
  };
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char c = t[i];
    if (c == '.') {
      const bool digit_before = i > 0 && std::isdigit(static_cast<unsigned char>(t[i - 1]));
      const bool digit_after = i + 1 < t.size() && std::isdigit(static_cast<unsigned char>(t[i + 1]));
      const bool digit_start = i + 1 < t.size() && std::isdigit(static_cast<unsigned char>(t[i + 1])) &&
                               (i == 0 || !std::isalnum(static_cast<unsigned char>(t[i - 1])));
      if ((digit_before && digit_after) || digit_start) continue;
      flush(i);
    } else if (c == '!' || c == '?' || c == ';' || c == '\n') {
      flush(i);
    }
  }
  if (start < t.size()) out.push_back({start, t.size()});
  return out;
}

struct Match {
  std::size_t begin;
  std::size_t end;
  std::size_t entry;
  std::string capture;
};

std::optional<Unit> unit_word(std::string u) {
  u = detail::to_lower(u);
  if (u.empty()) return std::nullopt;
  if (u == "milliseconds" || u == "millisecond") return Unit::kMs;
  if (u == "seconds" || u == "second") return Unit::kS;
  if (u == "millivolts" || u == "millivolt") return Unit::kMv;
  if (u.rfind("beats", 0) == 0 || u == "/min") return Unit::kBpm;
  if (u == "degrees" || u == "\xc2\xb0") return Unit::kDeg;
  return parse_unit(u);
}

std::optional<Direction> op_word(std::string op) {
  op = detail::collapse_spaces(detail::to_lower(op));
  if (op == ">" || op == "more than" || op == "greater than" || op == "in excess of" || op == "exceeding" ||
      op == "exceeds" || op == "over" || op == "above")
    return Direction::kGT;
  if (op == ">=" || op == "=>" || op == "\xe2\x89\xa5" || op == "at least" || op == "no less than" ||
      op == "greater than or equal to")
    return Direction::kGE;
  if (op == "<" || op == "less than" || op == "fewer than" || op == "under" || op == "below")
    return Direction::kLT;
  if (op == "<=" || op == "=<" || op == "\xe2\x89\xa4" || op == "at most" || op == "no more than" ||
      op == "less than or equal to")
    return Direction::kLE;
  return std::nullopt;
}

const std::string kNumber = R"(([-+]?(?:\d+(?:\.\d+)?|\.\d+)))";
const std::string kUnit =
    R"((milliseconds?|msec|ms|seconds?|sec|s|millivolts?|mv|mm|bpm|beats\s+per\s+minute|/min|degrees|deg|°)(?![A-Za-z]))";

const std::regex& op_number_re() {
  static const std::regex re(
      R"((greater\s+than\s+or\s+equal\s+to|less\s+than\s+or\s+equal\s+to|no\s+less\s+than|no\s+more\s+than|at\s+least|at\s+most|more\s+than|greater\s+than|in\s+excess\s+of|exceeding|exceeds|over|above|less\s+than|fewer\s+than|under|below|>=|<=|=>|=<|≥|≤|>|<)\s*)" +
          kNumber + R"(\s*(?:)" + kUnit + ")?",
      kIcase);
  return re;
}

const std::regex& bare_number_re() {
  static const std::regex re(R"((?:^|[\s:=(]))" + kNumber + R"(\s*)" + kUnit, kIcase);
  return re;
}

const std::regex& negation_re() {
  static const std::regex re(R"((?:^|\W)(?:no|not|without|absence\s+of|negative\s+for|nor)\s+(?:[\w-]+\s+){0,2}$)",
                             kIcase);
  return re;
}

const std::regex& exclusion_re() {
  static const std::regex re(
      R"(\b(?:artifacts?|artefacts?|noise|noisy|pacemaker|paced|pacing|pacer|baseline\s+wander(?:ing)?|wandering\s+baseline|lead\s+reversal|misplaced\s+leads?)\b)",
      kIcase);
  return re;
}

struct LeadParse {
  std::set<Lead> leads;
  bool any = false;
  std::size_t last_end = 0;  // end offset of the last lead token within the span
};

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

LeadParse parse_leads(std::string_view span, const Lexicon& lex) {
  LeadParse out;
  // Lead group phrases first.
  std::string s(span);
  for (const auto& e : lex.entries()) {
    if (!e.lead_group) continue;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), e.re); it != std::sregex_iterator(); ++it) {
      out.leads.insert(e.expansion.begin(), e.expansion.end());
      out.last_end = std::max(out.last_end, static_cast<std::size_t>(it->position() + it->length()));
    }
  }
  struct Tok {
    std::string text;
    std::size_t begin, end;
    std::optional<Lead> lead;
  };
  std::vector<Tok> toks;
  for (std::size_t i = 0; i < s.size();) {
    if (!is_alnum(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_alnum(s[j])) ++j;
    toks.push_back({s.substr(i, j - i), i, j, std::nullopt});
    i = j;
  }
  auto lower = [](const std::string& t) { return detail::to_lower(t); };
  for (std::size_t k = 0; k < toks.size(); ++k) {
    Tok& t = toks[k];
    const std::string lt = lower(t.text);
    if (lt == "avr" || lt == "avl" || lt == "avf" ||
        (lt.size() == 2 && lt[0] == 'v' && lt[1] >= '1' && lt[1] <= '6')) {
      t.lead = parse_lead(t.text);
    } else if (t.text == "II" || t.text == "III") {
      t.lead = parse_lead(t.text);
    } else if (t.text == "I" && k > 0) {
      const std::string prev = lower(toks[k - 1].text);
      if (prev == "lead" || prev == "leads" || toks[k - 1].lead) t.lead = Lead::I;
    }
  }
  for (std::size_t k = 0; k < toks.size(); ++k) {
    const Tok& t = toks[k];
    if (!t.lead) continue;
    out.leads.insert(*t.lead);
    out.last_end = std::max(out.last_end, t.end);
    // Ranges such as V1-V4 or V2 to V5.
    std::size_t next = k + 1;
    bool range = false;
    if (next < toks.size()) {
      const std::string sep = s.substr(t.end, toks[next].begin - t.end);
      if (sep.find('-') != std::string::npos || sep.find("\xe2\x80\x93") != std::string::npos) {
        range = true;
      } else if ((lower(toks[next].text) == "to" || lower(toks[next].text) == "through") && next + 1 < toks.size()) {
        ++next;
        range = true;
      }
    }
    if (range && toks[next].lead) {
      const int a = lead_index(*t.lead);
      const int b = lead_index(*toks[next].lead);
      if (!is_limb(*t.lead) && !is_limb(*toks[next].lead) && a < b) {
        for (int x = a; x <= b; ++x) out.leads.insert(static_cast<Lead>(x));
      }
    }
    if (k > 0 && lower(toks[k - 1].text) == "or") out.any = true;
  }
  const std::string ls = lower(s);
  if (ls.find("any of") != std::string::npos || ls.find("either") != std::string::npos) out.any = true;
  return out;
}

}  // namespace

Lexicon Lexicon::from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("lexicon: expected a JSON array");
  Lexicon lex;
  for (std::size_t i = 0; i < j.size(); ++i) lex.entries_.push_back(entry_from_json(j[i], i));
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  json j;
  try {
    j = detail::read_json_file(path);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  return from_json(j);
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = from_json(detail::asset_json("lexicon.json"));
  return lex;
}

bool is_excluded_sentence(std::string_view sentence) {
  const std::string s(sentence);
  return std::regex_search(s, exclusion_re());
}

ExtractionResult extract_findings(std::string_view trace, const Lexicon& lexicon, const NormalLimits& limits) {
  ExtractionResult out;
  const auto& entries = lexicon.entries();
  for (const Sentence& sent : split_sentences(trace)) {
    const std::string_view raw = trace.substr(sent.begin, sent.end - sent.begin);
    const std::string_view trimmed = detail::trim(raw);
    if (trimmed.empty()) continue;
    const std::size_t base = sent.begin + static_cast<std::size_t>(trimmed.data() - raw.data());
    const std::string s(trimmed);
    if (is_excluded_sentence(s)) {
      out.residual.push_back(s);
      continue;
    }
    if (auto f = parse_template(s)) {
      f->quotes = {s};
      f->finding_id = "f" + std::to_string(out.findings.size() + 1);
      out.findings.push_back(std::move(*f));
      continue;
    }

    std::vector<Match> all;
    for (std::size_t e = 0; e < entries.size(); ++e) {
      if (entries[e].lead_group) continue;
      for (auto it = std::sregex_iterator(s.begin(), s.end(), entries[e].re); it != std::sregex_iterator(); ++it) {
        if (it->length() == 0) continue;
        Match m{static_cast<std::size_t>(it->position()), static_cast<std::size_t>(it->position() + it->length()), e,
                it->size() > 1 && (*it)[1].matched ? (*it)[1].str() : std::string()};
        all.push_back(std::move(m));
      }
    }
    std::sort(all.begin(), all.end(), [](const Match& a, const Match& b) {
      if (a.begin != b.begin) return a.begin < b.begin;
      if (a.end != b.end) return a.end > b.end;
      return a.entry < b.entry;
    });
    std::vector<Match> chosen;
    std::size_t covered = 0;
    for (auto& m : all) {
      if (!chosen.empty() && m.begin < covered) continue;
      covered = m.end;
      chosen.push_back(std::move(m));
    }

    const std::size_t before = out.findings.size();
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      const Match& m = chosen[i];
      const LexiconEntry& e = entries[m.entry];
      const std::size_t span_end = i + 1 < chosen.size() ? chosen[i + 1].begin : s.size();
      const std::string span = s.substr(m.end, span_end - m.end);
      const std::size_t prefix_begin = i > 0 ? chosen[i - 1].end : 0;
      const std::string prefix = s.substr(prefix_begin, m.begin - prefix_begin);
      std::smatch neg;
      const bool negated = std::regex_search(prefix, neg, negation_re());
      if (e.negation_only && !negated) continue;

      Finding f;
      f.kind = e.kind;
      f.feature = e.feature;
      std::size_t used_end = m.end;

      if (e.feature == Feature::kRhythmClass) {
        auto cls = normalize_rhythm_class(m.capture);
        if (!cls) continue;
        f.rhythm_class = *cls;
      }

      std::smatch nm;
      std::optional<Direction> text_op;
      std::optional<double> number;
      std::optional<Unit> unit;
      if (std::regex_search(span, nm, op_number_re())) {
        text_op = op_word(nm[1].str());
        number = std::stod(nm[2].str());
        unit = unit_word(nm[3].str());
        used_end = std::max(used_end, m.end + nm.position() + nm.length());
      } else if (std::regex_search(span, nm, bare_number_re())) {
        number = std::stod(nm[1].str());
        unit = unit_word(nm[2].str());
        used_end = std::max(used_end, m.end + nm.position() + nm.length());
      }

      if (!e.direction) {
        if (!text_op || !number) continue;
        f.direction = *text_op;
        f.threshold = Threshold{*number, unit.value_or(default_unit(f.kind))};
      } else if (is_comparator(*e.direction)) {
        const bool up = *e.direction == Direction::kGT || *e.direction == Direction::kGE;
        if (number) {
          double v = *number;
          if (text_op) {
            f.direction = apply_descriptor(f.feature, up, *text_op, v);
          } else {
            f.direction = *e.direction;
            if (f.feature == Feature::kSTDeviation && !up) v = -std::abs(v);
          }
          f.threshold = Threshold{v, unit.value_or(default_unit(f.kind))};
        } else {
          f.direction = *e.direction;
          if (e.default_value) {
            f.threshold = e.default_value;
          } else {
            f.threshold = Threshold{*limits.by_name(e.default_limit), *limit_unit(e.default_limit)};
          }
        }
      } else {
        f.direction = *e.direction;
      }

      if (f.kind != FindingKind::kRhythm && f.kind != FindingKind::kAxis && f.kind != FindingKind::kEctopicBeat &&
          f.kind != FindingKind::kRate) {
        const LeadParse lp = parse_leads(span, lexicon);
        if (!lp.leads.empty()) {
          f.scope.leads = lp.leads;
          f.scope.quantifier = lp.any ? Quantifier::kAny : Quantifier::kAll;
          used_end = std::max(used_end, m.end + lp.last_end);
        } else if (f.kind == FindingKind::kPresence && f.direction == Direction::kAbsent) {
          f.scope.quantifier = Quantifier::kAll;
        }
      }

      if (negated) {
        auto n = negate_finding(f);
        if (!n) continue;
        f = std::move(*n);
      }
      try {
        validate_finding(f);
      } catch (const InvalidArgument&) {
        continue;
      }
      std::size_t qb = m.begin;
      if (negated) {
        qb = prefix_begin + static_cast<std::size_t>(neg.position());
        while (qb < m.begin && !is_alnum(s[qb])) ++qb;
      }
      std::string_view quote = detail::trim(trace.substr(base + qb, used_end - qb));
      f.quotes = {std::string(quote)};
      f.finding_id = "f" + std::to_string(out.findings.size() + 1);
      out.findings.push_back(std::move(f));
    }
    if (out.findings.size() == before) out.residual.push_back(s);
  }
  return out;
}

ParseResult parse_finding(std::string_view text, const Lexicon& lexicon, const NormalLimits& limits) {
  const std::string_view t = detail::trim(text);
  if (auto f = parse_template(t)) {
    f->quotes = {std::string(t)};
    return *f;
  }
  if (is_excluded_sentence(t)) return Unverifiable{"non-specific: artifact or pacing content"};
  ExtractionResult r = extract_findings(t, lexicon, limits);
  if (r.findings.empty()) return Unverifiable{"non-specific: no verifiable feature claim"};
  if (r.findings.size() > 1) return Unverifiable{"compound: text holds more than one finding"};
  r.findings.front().finding_id.clear();
  return r.findings.front();
}

}  // namespace reasoneval
