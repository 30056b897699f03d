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
#include <set>

#include "reasoneval/adversarial.hpp"
#include "reasoneval/error.hpp"
#include "support/generators.hpp"

namespace reasoneval {
namespace {

const AntonymMap& amap() { return AntonymMap::builtin(); }

TEST(MutateText, StElevationBecomesDepression) {
  auto m = mutate_text("ST elevation in V1", amap(), 1);
  EXPECT_EQ(m.text, "ST depression in V1");
  ASSERT_EQ(m.flips.size(), 1u);
  EXPECT_EQ(m.flips[0].from, "elevation");
  EXPECT_EQ(m.flips[0].to, "depression");
}

TEST(MutateText, WideNarrowIsAnInvolution) {
  auto once = mutate_text("Wide QRS", amap(), 3);
  EXPECT_EQ(once.text, "Narrow QRS");
  EXPECT_EQ(mutate_text(once.text, amap(), 3).text, "Wide QRS");
}

TEST(MutateText, CasePatternIsKept) {
  EXPECT_EQ(mutate_text("REGULAR rhythm, Prolonged PR, absent P waves", amap(), 0).text,
            "IRREGULAR rhythm, Shortened PR, present P waves");
}

TEST(MutateText, WholeWordsOnly) {
  auto m = mutate_text("Highlights of the leftover trace", amap(), 0);
  EXPECT_EQ(m.text, "Highlights of the leftover trace");
  EXPECT_TRUE(m.flips.empty());
}

TEST(MutateText, RhythmClassChangesDeterministically) {
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto a = mutate_text("sinus rhythm", amap(), seed);
    auto b = mutate_text("sinus rhythm", amap(), seed);
    EXPECT_EQ(a.text, b.text);
    EXPECT_NE(a.text, "sinus rhythm");
    seen.insert(a.text);
  }
  // Uniform over the five other classes: all of them show up in 200 draws.
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_FALSE(seen.count("sinus rhythm"));
}

TEST(MutateText, AliasesAreReplacedAsAWhole) {
  auto m = mutate_text("Normal sinus rhythm at 72 bpm", amap(), 9);
  ASSERT_EQ(m.flips.size(), 1u);
  EXPECT_EQ(m.flips[0].from, "Normal sinus rhythm");
  EXPECT_NE(m.flips[0].to, "Sinus rhythm");
}

TEST(MutateText, NothingToFlipLeavesInputUnchanged) {
  auto m = mutate_text("Heart rate is >100 bpm", amap(), 5);
  EXPECT_EQ(m.text, "Heart rate is >100 bpm");
  EXPECT_TRUE(m.flips.empty());
}

TEST(MutateText, OneModeFlipsExactlyOne) {
  auto m = mutate_text("Wide QRS with ST elevation and inverted T waves", amap(), 11, FlipMode::kOne);
  EXPECT_EQ(m.flips.size(), 1u);
}

TEST(MutateText, BinaryPairsInvolutionOverGeneratedText) {
  std::mt19937_64 rng(42);
  const std::vector<std::string> words = {"Wide", "narrow", "QRS", "elevation", "in", "V1", "Regular",
                                          "irregular", "rhythm", "upright", "Inverted", "T", "waves",
                                          "prolonged", "PR", "left", "axis", "High", "low", "voltage",
                                          "poor", "progression", "absent", "Present", "flat", "peak",
                                          "fused", "distinct", "fusion", "capture", "with", "and"};
  for (int i = 0; i < 500; ++i) {
    std::string text;
    const int n = testing::uniform_int(rng, 1, 12);
    for (int k = 0; k < n; ++k) text += (k ? " " : "") + testing::pick(rng, words);
    const auto once = mutate_text(text, amap(), 0);
    EXPECT_EQ(mutate_text(once.text, amap(), 0).text, text);
  }
}

TEST(MutateFindings, ComparatorsFlipToComplement) {
  Finding f;
  f.kind = FindingKind::kInterval;
  f.feature = Feature::kQRS;
  f.direction = Direction::kGE;
  f.threshold = Threshold{120, Unit::kMs};
  f.scope.quantifier = Quantifier::kAll;
  f.scope.leads = {Lead::V1, Lead::V2};
  std::mt19937_64 rng(0);
  auto g = flip_finding(f, amap(), rng);
  ASSERT_TRUE(g);
  EXPECT_EQ(g->direction, Direction::kLT);
  EXPECT_EQ(g->scope.quantifier, Quantifier::kAny);
  EXPECT_EQ(canonicalize(*g), "QRS is Narrow < 120ms in any of leads V1, V2");
}

TEST(MutateFindings, RhythmClassNeverMapsToItself) {
  Finding f;
  f.kind = FindingKind::kRhythm;
  f.feature = Feature::kRhythmClass;
  f.direction = Direction::kPresent;
  for (const auto& cls : rhythm_classes()) {
    f.rhythm_class = cls;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      auto m = mutate_findings({f}, amap(), seed);
      ASSERT_EQ(m.flips.size(), 1u);
      EXPECT_NE(m.findings[0].rhythm_class, cls);
      EXPECT_TRUE(normalize_rhythm_class(m.findings[0].rhythm_class));
    }
  }
}

TEST(MutateFindings, ComplementFlipIsAnInvolution) {
  std::mt19937_64 gen(5);
  std::mt19937_64 rng(0);
  for (int i = 0; i < 1000; ++i) {
    const Finding f = testing::random_finding(gen);
    if (f.kind == FindingKind::kRhythm) continue;
    auto g = flip_finding(f, amap(), rng);
    ASSERT_TRUE(g) << canonicalize(f);
    auto h = flip_finding(*g, amap(), rng);
    ASSERT_TRUE(h);
    EXPECT_TRUE(equivalent(*h, f)) << canonicalize(f);
  }
}

TEST(MutateFindings, OneModePicksASingleFinding) {
  std::mt19937_64 gen(8);
  std::vector<Finding> fs;
  for (int i = 0; i < 6; ++i) fs.push_back(testing::random_finding(gen));
  auto m = mutate_findings(fs, amap(), 77, FlipMode::kOne);
  EXPECT_EQ(m.flips.size(), 1u);
  auto all = mutate_findings(fs, amap(), 77, FlipMode::kAll);
  EXPECT_EQ(all.flips.size(), fs.size());
}

TEST(AntonymMap, RejectsRepeatedWords) {
  nlohmann::json j = {{"pairs", {{"wide", "narrow"}, {"narrow", "thin"}}}, {"rhythm_classes", {"a", "b"}}};
  EXPECT_THROW(AntonymMap::from_json(j), ConfigError);
}

TEST(FlipMode, Parses) {
  EXPECT_EQ(parse_flip_mode("all"), FlipMode::kAll);
  EXPECT_EQ(parse_flip_mode("one"), FlipMode::kOne);
  EXPECT_FALSE(parse_flip_mode("some"));
}

}  // namespace
}  // namespace reasoneval
