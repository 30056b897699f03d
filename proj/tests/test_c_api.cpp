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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "reasoneval/reasoneval.h"

namespace fs = std::filesystem;

namespace {

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  reval_string_free(s);
  return out;
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("reasoneval_capi_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

TEST(CApi, StatusNamesAndVersion) {
  EXPECT_STREQ(reval_status_name(REVAL_OK), "ok");
  EXPECT_NE(std::string(reval_version()), "");
  EXPECT_NE(std::string(reval_status_name(REVAL_E_PROVIDER_TIMEOUT)), std::string(reval_status_name(REVAL_E_PROVIDER_SCHEMA)));
}

TEST(CApi, ConfigErrorsAreReported) {
  reval_config* cfg = nullptr;
  EXPECT_EQ(reval_config_from_json(R"({"no_such_key": 1})", &cfg), REVAL_E_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_NE(std::string(reval_last_error()), "");
  ASSERT_EQ(reval_config_from_json("{}", &cfg), REVAL_OK);
  EXPECT_EQ(reval_config_set(cfg, "workers", "0"), REVAL_E_CONFIG);
  ASSERT_EQ(reval_config_set(cfg, "ks", "[1, 3]"), REVAL_OK);
  char* js = nullptr;
  ASSERT_EQ(reval_config_to_json(cfg, &js), REVAL_OK);
  EXPECT_NE(take(js).find("\"ks\""), std::string::npos);
  EXPECT_EQ(reval_config_load("/nonexistent/cfg.json", &cfg), REVAL_E_CONFIG);
  reval_config_free(cfg);
  EXPECT_EQ(reval_config_from_json("{", nullptr), REVAL_E_INVALID_ARGUMENT);
}

TEST(CApi, PearsonAndNullArguments) {
  const double x[] = {1, 2, 3}, y[] = {2, 4, 6}, c[] = {5, 5, 5};
  double r = 0;
  int defined = 0;
  ASSERT_EQ(reval_pearson(x, y, 3, &r, &defined), REVAL_OK);
  EXPECT_EQ(defined, 1);
  EXPECT_NEAR(r, 1.0, 1e-12);
  ASSERT_EQ(reval_pearson(x, c, 3, &r, &defined), REVAL_OK);
  EXPECT_EQ(defined, 0);
  EXPECT_EQ(reval_pearson(nullptr, y, 3, &r, &defined), REVAL_E_INVALID_ARGUMENT);
  EXPECT_EQ(reval_extract(nullptr, nullptr, nullptr), REVAL_E_INVALID_ARGUMENT);
}

TEST(CApi, RecordRoundTripAndFeatures) {
  const auto dir = scratch("record");
  reval_record* rec = nullptr;
  char* truth = nullptr;
  ASSERT_EQ(reval_synthesize(R"({"record_id": "c1", "hr_bpm": 75})", &rec, &truth), REVAL_OK);
  EXPECT_NE(take(truth).find("qrs_on_idxs"), std::string::npos);
  const std::string path = (dir / "c1.bin").string();
  ASSERT_EQ(reval_record_save(rec, path.c_str()), REVAL_OK);
  reval_record* back = nullptr;
  ASSERT_EQ(reval_record_load(path.c_str(), &back), REVAL_OK);
  std::vector<float> a(5000), b(5000);
  size_t na = 0, nb = 0;
  ASSERT_EQ(reval_record_lead(rec, "II", a.data(), a.size(), &na), REVAL_OK);
  ASSERT_EQ(reval_record_lead(back, "II", b.data(), b.size(), &nb), REVAL_OK);
  EXPECT_EQ(na, 5000u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(reval_record_lead(rec, "V7", a.data(), a.size(), &na), REVAL_E_INVALID_ARGUMENT);
  char* ft = nullptr;
  ASSERT_EQ(reval_record_features(back, nullptr, nullptr, &ft), REVAL_OK);
  EXPECT_NE(take(ft).find("avg_RR_interval"), std::string::npos);
  EXPECT_EQ(reval_record_load((dir / "missing.bin").string().c_str(), &back), REVAL_E_IO);
  reval_record_free(rec);
  reval_record_free(back);
}

TEST(CApi, EvalThroughTheLibrary) {
  const auto dir = scratch("eval");
  const fs::path corpus = fs::path(REASONEVAL_FIXTURES_DIR) / "corpus";
  reval_kb* kb = nullptr;
  char* log = nullptr;
  ASSERT_EQ(reval_kb_build(corpus.string().c_str(), (corpus / "label_map.json").string().c_str(), nullptr, &kb, &log),
            REVAL_OK)
      << reval_last_error();
  reval_string_free(log);
  EXPECT_GT(reval_kb_size(kb), 0u);
  char* hits = nullptr;
  ASSERT_EQ(reval_kb_query(kb, nullptr, "sawtooth flutter waves", 3, &hits), REVAL_OK);
  EXPECT_NE(take(hits).find("atrial flutter"), std::string::npos);

  reval_record* rec = nullptr;
  ASSERT_EQ(reval_synthesize(R"({"record_id": "sr", "hr_bpm": 72})", &rec, nullptr), REVAL_OK);
  ASSERT_EQ(reval_record_save(rec, (dir / "sr.bin").string().c_str()), REVAL_OK);
  reval_record_free(rec);
  std::ofstream(dir / "manifest.jsonl")
      << R"({"trace_id": "t1", "record_path": "sr.bin", "gt_labels": ["sinus rhythm"], )"
      << R"("predicted_label": "sinus rhythm", "model_tag": "m", "task": "rhythm", )"
      << R"("reasoning_trace": "The rhythm is regular. Heart rate between 60 and 100. P waves are present."})" << "\n"
      << R"({"trace_id": "t2", "record_path": "gone.bin", "gt_labels": ["sinus rhythm"], )"
      << R"("model_tag": "m", "task": "rhythm", "reasoning_trace": "Regular rhythm."})" << "\n";

  reval_report* rep = nullptr;
  ASSERT_EQ(reval_eval_run((dir / "manifest.jsonl").string().c_str(), kb, nullptr, &rep), REVAL_OK) << reval_last_error();
  EXPECT_EQ(reval_report_success_count(rep), 1u);
  EXPECT_EQ(reval_report_failure_count(rep), 1u);
  ASSERT_EQ(reval_report_emit(rep, (dir / "out").string().c_str(), "json,csv"), REVAL_OK);
  EXPECT_TRUE(fs::exists(dir / "out" / "report.csv"));
  EXPECT_FALSE(fs::exists(dir / "out" / "report.svg"));
  reval_report* again = nullptr;
  ASSERT_EQ(reval_report_load((dir / "out" / "report.json").string().c_str(), &again), REVAL_OK) << reval_last_error();
  char* a = nullptr;
  char* b = nullptr;
  ASSERT_EQ(reval_report_to_json(rep, &a), REVAL_OK);
  ASSERT_EQ(reval_report_to_json(again, &b), REVAL_OK);
  EXPECT_EQ(take(a), take(b));
  reval_report_free(rep);
  reval_report_free(again);

  size_t n1 = 0, n2 = 0;
  ASSERT_EQ(reval_split((dir / "manifest.jsonl").string().c_str(), 0.5, 1, (dir / "s" / "a.jsonl").string().c_str(),
                        (dir / "s" / "b.jsonl").string().c_str(), &n1, &n2),
            REVAL_OK);
  EXPECT_EQ(n1 + n2, 2u);
  EXPECT_EQ(reval_split((dir / "manifest.jsonl").string().c_str(), 1.5, 1, "a", "b", &n1, &n2),
            REVAL_E_INVALID_ARGUMENT);
  reval_kb_free(kb);
}

}  // namespace
