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

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <stack>

#include "reasoneval/error.hpp"
#include "reasoneval/harness.hpp"
#include "support/corpus.hpp"
#include "support/eval_fixture.hpp"
#include "support/kb_fixture.hpp"

namespace reasoneval {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

TEST(HarnessConfig, DefaultsRoundTrip) {
  const HarnessConfig c;
  const json j = config_to_json(c);
  EXPECT_EQ(config_to_json(config_from_json(j)).dump(), j.dump());
  EXPECT_EQ(config_to_json(config_from_json(json::object())).dump(), j.dump());
}

TEST(HarnessConfig, OverridesAndValidation) {
  const auto c = config_from_json(json::parse(R"({"seed": 7, "workers": 3, "ks": [5, 1, 5], "flip_mode": "one",
      "limits": {"qrs_wide_ms": 110}, "strategies": ["exact_quote"], "embedder": {"dim": 256}})"));
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.workers, 3);
  EXPECT_EQ(c.ks, (std::vector<std::size_t>{1, 5}));
  EXPECT_EQ(c.flip_mode, FlipMode::kOne);
  EXPECT_EQ(c.limits.qrs_wide_ms, 110.0);
  EXPECT_EQ(c.strategies.size(), 1u);
  EXPECT_EQ(c.embedder.dim, 256);

  for (const char* bad : {R"({"sed": 1})", R"({"workers": 0})", R"({"ks": []})", R"({"ks": [0]})",
                          R"({"flip_mode": "some"})", R"({"seed": -1})", R"({"seed": "1"})",
                          R"({"limits": {"nope": 1}})", R"({"embedder": {"type": "magic"}})",
                          R"({"cleaners": [{"type": "http"}]})", R"({"retry": {"timeout_ms": 0}})",
                          R"({"delineator": {"bandpass_low_hz": 30, "bandpass_high_hz": 20}})", R"([1])"}) {
    EXPECT_THROW(config_from_json(json::parse(bad)), ConfigError) << bad;
  }
}

TEST(HarnessConfig, MissingFileIsConfigError) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

// -------------------------------------------------------------- manifest

ManifestRow simple_row(const std::string& id, const std::string& patient = "") {
  ManifestRow r;
  r.trace_id = id;
  r.record_path = "r.bin";
  r.gt_labels = {"atrial fibrillation"};
  r.reasoning_trace = "text";
  r.model_tag = "m";
  if (!patient.empty()) r.patient_id = patient;
  return r;
}

TEST(Manifest, RoundTripAndErrors) {
  const auto dir = testing::scratch_dir("manifest");
  std::vector<ManifestRow> rows{simple_row("a"), simple_row("b", "p1")};
  rows[1].predicted_label = "atrial flutter";
  rows[1].delineation_path = "d.json";
  rows[1].task = "rhythm";
  save_manifest(rows, dir / "m.jsonl");
  const Manifest m = load_manifest(dir / "m.jsonl");
  ASSERT_EQ(m.rows.size(), 2u);
  EXPECT_EQ(m.base_dir, dir);
  for (std::size_t i = 0; i < rows.size(); ++i)
    EXPECT_EQ(manifest_row_to_json(m.rows[i]).dump(), manifest_row_to_json(rows[i]).dump());

  const auto r = manifest_row_from_json(json::parse(
      R"({"trace_id": "x", "record_path": "p", "gt_label": "sinus rhythm", "reasoning_trace": "t"})"));
  EXPECT_EQ(r.gt_labels, std::vector<std::string>{"sinus rhythm"});

  auto write = [&](const std::string& text) {
    std::ofstream(dir / "bad.jsonl") << text;
    return dir / "bad.jsonl";
  };
  const std::string ok = R"({"trace_id": "a", "record_path": "p", "gt_labels": ["x"], "reasoning_trace": "t"})";
  EXPECT_THROW(load_manifest(write(ok + "\n" + ok + "\n")), FormatError);  // duplicate id
  EXPECT_THROW(load_manifest(write("{not json}\n")), FormatError);
  EXPECT_THROW(load_manifest(write(R"({"trace_id": "a", "record_path": "p", "reasoning_trace": "t"})")),
               FormatError);
  EXPECT_THROW(load_manifest(write(R"({"trace_id": "a", "record_path": "p", "gt_labels": ["x"],
      "reasoning_trace": "t", "extra": 1})")), FormatError);
  EXPECT_THROW(load_manifest(dir / "missing.jsonl"), IoError);
}

// ----------------------------------------------------------------- split

std::vector<ManifestRow> numbered_rows(int n) {
  std::vector<ManifestRow> rows;
  for (int i = 0; i < n; ++i) rows.push_back(simple_row("t" + std::to_string(i)));
  return rows;
}

std::set<std::string> ids(const std::vector<ManifestRow>& rows) {
  std::set<std::string> s;
  for (const auto& r : rows) s.insert(r.trace_id);
  return s;
}

TEST(SplitDataset, SizesAndDeterminism) {
  const auto rows = numbered_rows(1000);
  const auto [val, test] = split_dataset(rows, 0.10, 42);
  EXPECT_EQ(val.size(), 100u);
  EXPECT_EQ(test.size(), 900u);
  const auto again = split_dataset(rows, 0.10, 42);
  EXPECT_EQ(ids(again.first), ids(val));
  EXPECT_NE(ids(split_dataset(rows, 0.10, 43).first), ids(val));

  std::set<std::string> all = ids(val);
  for (const auto& id : ids(test)) EXPECT_TRUE(all.insert(id).second) << id;
  EXPECT_EQ(all.size(), 1000u);

  const auto nine = split_dataset(numbered_rows(9), 1.0 / 3.0, 1);
  EXPECT_EQ(nine.first.size(), 3u);
  EXPECT_EQ(nine.second.size(), 6u);

  EXPECT_THROW(split_dataset(rows, 0.0, 1), InvalidArgument);
  EXPECT_THROW(split_dataset(rows, 1.0, 1), InvalidArgument);
}

TEST(SplitDataset, PatientsNeverStraddle) {
  std::mt19937_64 rng(3);
  std::vector<ManifestRow> rows;
  for (int i = 0; i < 300; ++i)
    rows.push_back(simple_row("t" + std::to_string(i), "p" + std::to_string(rng() % 60)));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto [val, test] = split_dataset(rows, 1.0 / 3.0, seed);
    EXPECT_EQ(val.size() + test.size(), rows.size());
    std::set<std::string> pv;
    for (const auto& r : val) pv.insert(*r.patient_id);
    for (const auto& r : test) EXPECT_FALSE(pv.count(*r.patient_id)) << *r.patient_id;
    EXPECT_NEAR(static_cast<double>(val.size()), 100.0, 15.0);
  }
}

// --------------------------------------------------------------- pearson

// Single-pass raw-sum formula in long double, independent of the two-pass
// implementation.
std::optional<double> pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = static_cast<long double>(x.size()), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double vx = n * sxx - sx * sx, vy = n * syy - sy * sy;
  if (vx <= 0 || vy <= 0) return std::nullopt;
  return static_cast<double>((n * sxy - sx * sy) / std::sqrt(vx * vy));
}

TEST(PearsonR, Examples) {
  std::vector<double> x{1, 2, 3, 4, 5}, y;
  for (double v : x) y.push_back(2 * v + 3);
  EXPECT_NEAR(*pearson_r(x, y), 1.0, 1e-12);
  EXPECT_NEAR(*pearson_r({1, 2, 3}, {6, 4, 2}), -1.0, 1e-12);
  EXPECT_FALSE(pearson_r({1, 1, 1}, {1, 2, 3}).has_value());
  EXPECT_FALSE(pearson_r({1, 2, 3}, {4, 4, 4}).has_value());
  EXPECT_THROW(pearson_r({1}, {1}), InvalidArgument);
  EXPECT_THROW(pearson_r({1, 2}, {1, 2, 3}), InvalidArgument);
}

TEST(PearsonR, MatchesDirectFormula) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x(20), y(20);
    for (int i = 0; i < 20; ++i) {
      x[i] = nd(rng);
      y[i] = 0.5 * x[i] + nd(rng);
    }
    const auto r = pearson_r(x, y);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(*r, *pearson_oracle(x, y), 1e-9);
    EXPECT_LE(std::abs(*r), 1.0);
  }
}

TEST(FinalAnswer, NormalizedSetMatch) {
  EXPECT_TRUE(final_answer_correct("  Atrial   Fibrillation ", {"atrial fibrillation"}));
  EXPECT_TRUE(final_answer_correct("sinus rhythm; first degree AV block", {"first degree av block", "sinus rhythm"}));
  EXPECT_FALSE(final_answer_correct("sinus rhythm", {"first degree av block", "sinus rhythm"}));
  EXPECT_FALSE(final_answer_correct(std::nullopt, {"sinus rhythm"}));
  EXPECT_FALSE(final_answer_correct("", {"sinus rhythm"}));
}

// ------------------------------------------------------------- model eval

// A KB whose labels own disjoint pseudo-word vocabularies, and traces that
// pair a verifiable note with one label's vocabulary.
class EvalFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::scratch_dir("eval_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::mt19937_64 rng(21);
    const auto labels = LabelVocabulary::builtin().all_labels();
    std::vector<CriteriaEntry> entries;
    for (int li = 0; li < 10; ++li) {
      const std::string& label = labels[static_cast<std::size_t>(li)];
      std::vector<std::string> words;
      for (int i = 0; i < 12; ++i) words.push_back(testing::pseudo_word(rng));
      vocab_[label] = words;
      for (int e = 0; e < 3; ++e) {
        CriteriaEntry ce;
        ce.entry_id = static_cast<std::int64_t>(entries.size());
        ce.label = label;
        ce.cleaner_tag = "synthetic";
        ce.concept_label = "entry " + std::to_string(ce.entry_id);
        for (int c = 0; c < 3; ++c) {
          std::string s;
          for (int t = 0; t < 6; ++t) s += (t ? " " : "") + words[rng() % words.size()];
          ce.criteria.push_back(s);
        }
        ce.combined_text = combined_text(ce.concept_label, ce.criteria);
        entries.push_back(ce);
      }
    }
    kb_.emplace(build_index(entries, *res_.embedder));
  }

  ManifestRow perfect_row(int index, const std::string& model) {
    const auto cc = testing::corpus_case(index);
    const std::string name = "rec" + std::to_string(index) + ".bin";
    if (!fs::exists(dir_ / name)) save_record(synthesize_ecg(cc.spec).record, dir_ / name, RecordFormat::kRawBin);
    const auto labels = LabelVocabulary::builtin().all_labels();
    const std::string& label = labels[static_cast<std::size_t>(index % 10)];
    ManifestRow r;
    r.trace_id = model + "-" + std::to_string(index);
    r.record_path = name;
    r.gt_labels = {label};
    r.predicted_label = label;
    r.model_tag = model;
    r.task = "t";
    std::string words;
    for (const auto& w : vocab_[label]) words += " " + w;
    r.reasoning_trace = cc.note + "." + words + ". Therefore " + label + ".";
    return r;
  }

  HarnessConfig cfg_;
  Resources res_ = load_resources(cfg_);
  fs::path dir_;
  std::map<std::string, std::vector<std::string>> vocab_;
  std::optional<KnowledgeBase> kb_;
};

TEST_F(EvalFixture, PerfectTracesScoreOne) {
  Manifest m{dir_, {perfect_row(0, "m"), perfect_row(1, "m"), perfect_row(2, "m")}};
  const json rep = run_model_eval(m, *kb_, cfg_, res_);
  ASSERT_EQ(rep.at("failures").size(), 0u);
  const json& o = rep.at("aggregates").at("overall");
  EXPECT_EQ(o.at("perception").at("global_accuracy_micro").at("value").get<double>(), 1.0);
  EXPECT_EQ(o.at("perception").at("acc_at_thresh_100").at("value").get<double>(), 1.0);
  EXPECT_EQ(o.at("deduction").at("precision_at").at("1").get<double>(), 1.0);
  EXPECT_EQ(o.at("final_accuracy").at("value").get<double>(), 1.0);
  EXPECT_GT(o.at("perception").at("global_accuracy_micro").at("denominator").get<int>(), 9);
  // Censoring removed the label from every query.
  for (const auto& t : rep.at("traces")) EXPECT_EQ(t.at("deduction").at("precision_at").at("1"), 1.0);
}

TEST_F(EvalFixture, FailuresAreIsolated) {
  Manifest base{dir_, {perfect_row(0, "m"), perfect_row(1, "m"), perfect_row(2, "m")}};
  Manifest broken = base;
  ManifestRow bad = perfect_row(3, "m");
  bad.trace_id = "broken";
  bad.record_path = "missing.bin";
  broken.rows.insert(broken.rows.begin() + 1, bad);
  const json a = run_model_eval(base, *kb_, cfg_, res_);
  const json b = run_model_eval(broken, *kb_, cfg_, res_);
  EXPECT_EQ(b.at("traces").dump(), a.at("traces").dump());
  ASSERT_EQ(b.at("failures").size(), 1u);
  EXPECT_EQ(b.at("failures")[0].at("trace_id"), "broken");
  EXPECT_EQ(b.at("failures")[0].at("row"), 1);
  EXPECT_EQ(b.at("aggregates").at("overall").at("n_failed"), 1);
  json agg_a = a.at("aggregates"), agg_b = b.at("aggregates");
  for (json* g : {&agg_a, &agg_b}) {
    (*g)["overall"].erase("n_failed");
    for (auto& x : (*g)["by_model"]) x.erase("n_failed");
    for (auto& x : (*g)["by_model_task"]) x.erase("n_failed");
  }
  EXPECT_EQ(agg_b.dump(), agg_a.dump());
}

TEST_F(EvalFixture, ReportIsSelfConsistentAndTamperEvident) {
  Manifest m{dir_, {perfect_row(0, "m1"), perfect_row(1, "m1"), perfect_row(4, "m2"), perfect_row(5, "m2")}};
  const json rep = run_model_eval(m, *kb_, cfg_, res_);
  EXPECT_NO_THROW(check_report_consistency(rep));
  const json reloaded = json::parse(rep.dump(2));
  EXPECT_NO_THROW(check_report_consistency(reloaded));
  EXPECT_EQ(recompute_aggregates(reloaded).dump(), rep.at("aggregates").dump());

  json tampered = reloaded;
  tampered["traces"][0]["perception"]["results"][0]["status"] = "Refuted";
  EXPECT_THROW(check_report_consistency(tampered), FormatError);
  tampered = reloaded;
  tampered["aggregates"]["overall"]["final_accuracy"]["value"] = 0.5;
  EXPECT_THROW(check_report_consistency(tampered), FormatError);
}

TEST_F(EvalFixture, RejectsForeignEmbedder) {
  HarnessConfig other;
  other.embedder.dim = 256;
  Manifest m{dir_, {perfect_row(0, "m")}};
  EXPECT_THROW(run_model_eval(m, *kb_, other, load_resources(other)), ConfigError);
}

// Minimal well-formedness check: balanced, properly nested tags, one root.
bool well_formed_xml(const std::string& s) {
  std::stack<std::string> open;
  int roots = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '<') continue;
    const auto end = s.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = s.substr(i + 1, end - i - 1);
    i = end;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (open.empty() || open.top() != tag.substr(1)) return false;
      open.pop();
      continue;
    }
    const bool self_close = tag.back() == '/';
    const std::string name = tag.substr(0, tag.find_first_of(" /"));
    if (open.empty()) ++roots;
    if (!self_close) open.push(name);
  }
  return open.empty() && roots == 1;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

TEST_F(EvalFixture, EmitsCsvAndSvg) {
  Manifest m{dir_, {perfect_row(0, "m1"), perfect_row(1, "m1"), perfect_row(4, "m2"), perfect_row(5, "m2")}};
  const json rep = run_model_eval(m, *kb_, cfg_, res_);
  const auto out = dir_ / "out";
  const auto files = emit_report(rep, out, parse_report_formats("json,csv,svg"));
  EXPECT_EQ(files.size(), 3u);

  const std::string csv = report_csv(rep);
  EXPECT_EQ(count(csv, "\n"), 3u);  // header + 2 model_tags
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "model_tag,task,n_traces,n_failed,global_accuracy_micro,global_accuracy_macro,acc_at_thresh_50,"
            "acc_at_thresh_100,p_at_1,p_at_5,p_at_10,final_accuracy");

  const std::string svg = report_svg(rep);
  EXPECT_TRUE(well_formed_xml(svg));
  EXPECT_EQ(count(svg, "class=\"bar-group\""), 2u);
  EXPECT_NE(svg.find("data-model=\"m1\""), std::string::npos);

  const json back = json::parse(std::ifstream(out / "report.json"));
  EXPECT_EQ(back.dump(), rep.dump());

  std::ofstream(dir_ / "plain_file") << "x";
  EXPECT_THROW(emit_report(rep, dir_ / "plain_file" / "sub", kReportJson), IoError);
  EXPECT_THROW(parse_report_formats("json,pdf"), ConfigError);
}

TEST(ModelEval, FixtureDeterministicAcrossWorkers) {
  const auto dir = testing::scratch_dir("eval_workers");
  const Manifest m = load_manifest(testing::materialize_eval_fixture(dir));
  HarnessConfig c;
  const Resources res = load_resources(c);
  const auto kbb = build_kb(testing::fixtures_dir() / "corpus",
                            json::parse(std::ifstream(testing::fixtures_dir() / "corpus" / "label_map.json")), c, res);
  c.workers = 1;
  const std::string one = run_model_eval(m, kbb.kb, c, res).dump(2);
  c.workers = 4;
  const std::string four = run_model_eval(m, kbb.kb, c, res).dump(2);
  EXPECT_EQ(one, four);
  const json rep = json::parse(one);
  EXPECT_EQ(rep.at("failures").size(), 0u);
  EXPECT_EQ(rep.at("aggregates").at("by_model_task").size(), 4u);
  // The fixture's first model is right more often than the second.
  const auto& models = rep.at("aggregates").at("by_model");
  EXPECT_GT(models[0].at("final_accuracy").at("value").get<double>(),
            models[1].at("final_accuracy").at("value").get<double>());
  for (const auto& p : rep.at("correlation").at("pairs")) EXPECT_EQ(p.at("n_points"), 4);
}

// ------------------------------------------------------------ assessment

TEST(Assessment, SupportingAndAdversarialContrast) {
  const auto dir = testing::scratch_dir("assess");
  Manifest m{dir, {}};
  for (int i = 0; i < 6; ++i) {
    const auto cc = testing::corpus_case(i);
    const std::string name = "c" + std::to_string(i) + ".bin";
    save_record(synthesize_ecg(cc.spec).record, dir / name, RecordFormat::kRawBin);
    ManifestRow r = simple_row("c" + std::to_string(i));
    r.record_path = name;
    r.reasoning_trace = cc.note;
    m.rows.push_back(r);
  }
  ManifestRow missing = simple_row("missing");
  missing.record_path = "nope.bin";
  m.rows.push_back(missing);
  HarnessConfig c;
  c.workers = 2;
  const Resources res = load_resources(c);
  const json sup = run_assessment(m, false, c, res);
  const json adv = run_assessment(m, true, c, res);
  EXPECT_EQ(sup.at("metrics").at("acc_at_thresh_100").at("value").get<double>(), 1.0);
  EXPECT_EQ(adv.at("metrics").at("acc_at_thresh_100").at("value").get<double>(), 0.0);
  EXPECT_EQ(sup.at("failures").size(), 1u);
  EXPECT_EQ(sup.at("failure_count"), 1);
  EXPECT_NO_THROW(check_report_consistency(json::parse(sup.dump())));
  EXPECT_NO_THROW(check_report_consistency(json::parse(adv.dump())));
  EXPECT_EQ(count(report_csv(sup), "\n"), 2u);
  EXPECT_TRUE(well_formed_xml(report_svg(adv)));
}

// -------------------------------------------------------------------- KB

TEST(KbBuild, FixtureCorpus) {
  HarnessConfig c;
  const Resources res = load_resources(c);
  const auto kbb = build_kb(testing::fixtures_dir() / "corpus",
                            json::parse(std::ifstream(testing::fixtures_dir() / "corpus" / "label_map.json")), c, res);
  EXPECT_EQ(kbb.log.at("n_articles"), 16);
  EXPECT_EQ(kbb.kb.size(), 32u);  // one cluster per article and strategy
  EXPECT_TRUE(kbb.log.at("cleaning_failures").empty());
  const json hits = query_kb(kbb.kb, *res.embedder, "sawtooth waves with a regular ventricular rate", 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].at("label"), "atrial flutter");
  EXPECT_THROW(query_kb(kbb.kb, *res.embedder, " ... ", 3), InvalidArgument);
}

}  // namespace
}  // namespace reasoneval
