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

#include "reasoneval/adversarial.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "assets.hpp"
#include "io_util.hpp"
#include "reasoneval/error.hpp"
#include "text_util.hpp"

namespace reasoneval {

using nlohmann::json;

namespace {

bool is_upper_word(std::string_view w) {
  bool any = false;
  for (char c : w) {
    if (std::islower(static_cast<unsigned char>(c))) return false;
    if (std::isupper(static_cast<unsigned char>(c))) any = true;
  }
  return any;
}

// Copies the case pattern of `orig` onto the lower-case `repl`.
std::string apply_case(std::string_view orig, std::string repl) {
  auto up = [](char& c) { c = static_cast<char>(std::toupper(static_cast<unsigned char>(c))); };
  if (orig.size() > 1 && is_upper_word(orig)) {
    for (char& c : repl) up(c);
    return repl;
  }
  const auto words = detail::split_any(orig, " ");
  const bool title = words.size() > 1 && std::all_of(words.begin(), words.end(), [](const std::string& w) {
                       return std::isupper(static_cast<unsigned char>(w[0])) != 0;
                     });
  if (title) {
    for (std::size_t i = 0; i < repl.size(); ++i) {
      if (i == 0 || repl[i - 1] == ' ') up(repl[i]);
    }
  } else if (!repl.empty() && std::isupper(static_cast<unsigned char>(orig[0]))) {
    up(repl[0]);
  }
  return repl;
}

bool complement_flip(Direction d) {
  return is_comparator(d) || d == Direction::kWithinNormal || d == Direction::kOutsideNormal ||
         d == Direction::kPresent || d == Direction::kAbsent || d == Direction::kUpright || d == Direction::kInverted;
}

}  // namespace

AntonymMap AntonymMap::from_json(const json& j) {
  AntonymMap m;
  try {
    std::set<std::string> seen;
    for (const auto& p : j.at("pairs")) {
      if (!p.is_array() || p.size() != 2) throw ConfigError("antonym map: each pair needs two words");
      std::string a = detail::to_lower(p[0].get<std::string>());
      std::string b = detail::to_lower(p[1].get<std::string>());
      if (a == b || !seen.insert(a).second || !seen.insert(b).second)
        throw ConfigError("antonym map: word '" + a + "' or '" + b + "' repeats");
      m.pairs.emplace_back(std::move(a), std::move(b));
    }
    for (const auto& c : j.at("rhythm_classes")) m.rhythm_classes.push_back(detail::to_lower(c.get<std::string>()));
    if (j.contains("rhythm_aliases")) {
      for (const auto& [alias, cls] : j["rhythm_aliases"].items()) {
        m.rhythm_aliases[detail::to_lower(alias)] = detail::to_lower(cls.get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("antonym map: ") + e.what());
  }
  if (m.rhythm_classes.size() < 2) throw ConfigError("antonym map: need at least two rhythm classes");
  for (const auto& [alias, cls] : m.rhythm_aliases) {
    if (std::find(m.rhythm_classes.begin(), m.rhythm_classes.end(), cls) == m.rhythm_classes.end())
      throw ConfigError("antonym map: alias '" + alias + "' names an unknown class");
  }
  return m;
}

AntonymMap AntonymMap::load(const std::string& path) {
  try {
    return from_json(detail::read_json_file(path));
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
}

const AntonymMap& AntonymMap::builtin() {
  static const AntonymMap m = from_json(detail::asset_json("antonyms.json"));
  return m;
}

std::optional<std::string> AntonymMap::antonym(std::string_view word) const {
  const std::string w = detail::to_lower(word);
  for (const auto& [a, b] : pairs) {
    if (w == a) return b;
    if (w == b) return a;
  }
  return std::nullopt;
}

std::optional<std::string> AntonymMap::rhythm_class(std::string_view phrase) const {
  const std::string p = detail::collapse_spaces(detail::to_lower(phrase));
  if (std::find(rhythm_classes.begin(), rhythm_classes.end(), p) != rhythm_classes.end()) return p;
  if (auto it = rhythm_aliases.find(p); it != rhythm_aliases.end()) return it->second;
  return std::nullopt;
}

std::string AntonymMap::other_rhythm_class(const std::string& cls, std::mt19937_64& rng) const {
  std::vector<std::string> others;
  for (const auto& c : rhythm_classes) {
    if (c != cls) others.push_back(c);
  }
  std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
  return others[pick(rng)];
}

std::optional<Finding> flip_finding(const Finding& f, const AntonymMap& map, std::mt19937_64& rng) {
  Finding out = f;
  if (f.kind == FindingKind::kRhythm) {
    switch (f.feature) {
      case Feature::kRegular: out.feature = Feature::kIrregular; break;
      case Feature::kIrregular: out.feature = Feature::kRegular; break;
      case Feature::kIrregularlyIrregular: out.feature = Feature::kRegular; break;
      default: {
        out.rhythm_class = map.other_rhythm_class(f.rhythm_class, rng);
        if (!normalize_rhythm_class(out.rhythm_class)) return std::nullopt;
        break;
      }
    }
    return out;
  }
  if (complement_flip(f.direction)) {
    return negate_finding(f);
  }
  switch (f.direction) {
    case Direction::kAboveNormal: out.direction = Direction::kBelowNormal; return out;
    case Direction::kBelowNormal: out.direction = Direction::kAboveNormal; return out;
    case Direction::kLeft: out.direction = Direction::kRight; return out;
    case Direction::kRight: out.direction = Direction::kLeft; return out;
    default: return std::nullopt;
  }
}

FindingsMutation mutate_findings(const std::vector<Finding>& findings, const AntonymMap& map, std::uint64_t seed,
                                 FlipMode mode) {
  std::mt19937_64 rng(seed);
  FindingsMutation out{findings, {}};
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < findings.size(); ++i) {
    std::mt19937_64 probe(0);
    if (flip_finding(findings[i], map, probe)) targets.push_back(i);
  }
  if (mode == FlipMode::kOne && !targets.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, targets.size() - 1);
    targets = {targets[pick(rng)]};
  }
  for (std::size_t i : targets) {
    auto flipped = flip_finding(findings[i], map, rng);
    out.flips.push_back({canonicalize(findings[i]), canonicalize(*flipped), i});
    out.findings[i] = std::move(*flipped);
  }
  return out;
}

TextMutation mutate_text(std::string_view text, const AntonymMap& map, std::uint64_t seed, FlipMode mode) {
  struct Candidate {
    std::size_t pos, len;
    std::string cls;  // set for rhythm phrases
  };
  std::vector<std::string> phrases = map.rhythm_classes;
  for (const auto& [alias, cls] : map.rhythm_aliases) phrases.push_back(alias);
  std::sort(phrases.begin(), phrases.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });

  const std::string low = detail::to_lower(text);
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < low.size();) {
    if ((i > 0 && detail::is_word_char(low[i - 1])) || !std::isalpha(static_cast<unsigned char>(low[i]))) {
      ++i;
      continue;
    }
    bool took = false;
    for (const auto& p : phrases) {
      const std::size_t e = i + p.size();
      if (low.compare(i, p.size(), p) == 0 && (e == low.size() || !detail::is_word_char(low[e]))) {
        cands.push_back({i, p.size(), *map.rhythm_class(p)});
        i = e;
        took = true;
        break;
      }
    }
    if (took) continue;
    std::size_t j = i;
    while (j < low.size() && detail::is_word_char(low[j])) ++j;
    if (map.antonym(low.substr(i, j - i))) cands.push_back({i, j - i, ""});
    i = j;
  }

  std::mt19937_64 rng(seed);
  if (mode == FlipMode::kOne && !cands.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
    cands = {cands[pick(rng)]};
  }
  TextMutation out;
  std::size_t cursor = 0;
  for (const auto& c : cands) {
    const std::string_view orig = text.substr(c.pos, c.len);
    const std::string repl =
        apply_case(orig, c.cls.empty() ? *map.antonym(orig) : map.other_rhythm_class(c.cls, rng));
    out.text.append(text.substr(cursor, c.pos - cursor));
    out.flips.push_back({std::string(orig), repl, out.text.size()});
    out.text += repl;
    cursor = c.pos + c.len;
  }
  out.text.append(text.substr(cursor));
  return out;
}

std::optional<FlipMode> parse_flip_mode(std::string_view s) {
  if (s == "all") return FlipMode::kAll;
  if (s == "one") return FlipMode::kOne;
  return std::nullopt;
}

}  // namespace reasoneval
