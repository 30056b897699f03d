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

#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "reasoneval/censor.hpp"
#include "support/generators.hpp"

namespace reasoneval {
namespace {

// Independent whole-word matcher built on std::regex.
bool regex_contains(const std::string& text, const std::string& term) {
  std::string esc;
  for (char c : term) {
    if (std::string("\\^$.|?*+()[]{}").find(c) != std::string::npos) esc += '\\';
    esc += c;
  }
  std::string pattern = esc;
  auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  if (word(term.front())) pattern = "(^|[^A-Za-z0-9_])" + pattern;
  if (word(term.back())) pattern += "([^A-Za-z0-9_]|$)";
  // Whitespace runs are insignificant.
  std::string collapsed;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!collapsed.empty() && collapsed.back() != ' ') collapsed += ' ';
    } else {
      collapsed += c;
    }
  }
  return std::regex_search(collapsed, std::regex(pattern, std::regex::icase));
}

TEST(Censor, RemovesLabel) {
  EXPECT_EQ(censor_label("findings consistent with atrial fibrillation.", "atrial fibrillation", {"AFib", "AF"}),
            "findings consistent with .");
}

TEST(Censor, RemovesSynonymsOnly) {
  const std::string out = censor_label("Irregular rhythm, likely AFib with RVR", "atrial fibrillation", {"AFib", "AF"});
  EXPECT_EQ(out, "Irregular rhythm, likely with RVR");
  EXPECT_FALSE(regex_contains(out, "AFib"));
}

TEST(Censor, LabelAbsentLeavesTraceUnchanged) {
  EXPECT_EQ(censor_label("Wide QRS in V1.", "atrial flutter", {"AFL"}), "Wide QRS in V1.");
}

TEST(Censor, WholeWordOnly) {
  EXPECT_EQ(censor_label("AFTER the AF episode", "atrial fibrillation", {"AF"}), "AFTER the episode");
}

TEST(Censor, RemovalThatJoinsFragmentsIsRepeated) {
  EXPECT_EQ(censor_label("atrial AF fibrillation", "atrial fibrillation", {"AF"}), "");
}

TEST(Censor, BuiltinSynonymTable) {
  const auto syn = SynonymTable::builtin().lookup("Atrial Fibrillation");
  EXPECT_FALSE(syn.empty());
  EXPECT_TRUE(SynonymTable::builtin().lookup("not a label").empty());
}

TEST(Censor, CompletenessOverGeneratedCases) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> filler = {"the", "rhythm", "shows", "QRS", "wide", "in", "V1", ",", ".",
                                           "with", "and", "P", "waves", "absent", "(", ")", "-", "likely"};
  const std::vector<std::string> labels = {"atrial fibrillation", "left bundle branch block", "sinus rhythm",
                                           "long qt-interval", "ventricular premature depolarization (pvcs)"};
  const std::vector<std::vector<std::string>> syns = {
      {"AF", "AFib", "a-fib"}, {"LBBB"}, {"NSR", "normal sinus rhythm"}, {"long QT", "LQT"}, {"PVC", "PVCs"}};
  for (int i = 0; i < 500; ++i) {
    const std::size_t li = static_cast<std::size_t>(testing::uniform_int(rng, 0, 4));
    std::string trace;
    const int n = testing::uniform_int(rng, 3, 25);
    for (int k = 0; k < n; ++k) {
      std::string tok;
      const int r = testing::uniform_int(rng, 0, 9);
      if (r == 0) {
        tok = labels[li];
      } else if (r == 1) {
        tok = testing::pick(rng, syns[li]);
      } else {
        tok = testing::pick(rng, filler);
      }
      if (testing::uniform_int(rng, 0, 3) == 0) {
        for (char& c : tok) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      trace += (testing::uniform_int(rng, 0, 4) == 0 ? "  " : " ") + tok;
    }
    const std::string out = censor_label(trace, labels[li], syns[li]);
    EXPECT_FALSE(regex_contains(out, labels[li])) << trace << " -> " << out;
    for (const auto& s : syns[li]) EXPECT_FALSE(regex_contains(out, s)) << trace << " -> " << out;
  }
}

}  // namespace
}  // namespace reasoneval
