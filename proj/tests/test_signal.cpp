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
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "reasoneval/error.hpp"
#include "reasoneval/leads.hpp"
#include "reasoneval/record.hpp"
#include "reasoneval/synth.hpp"

namespace fs = std::filesystem;

namespace reasoneval {
namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("reasoneval_test_" + std::to_string(std::random_device{}()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

EcgRecord random_record(std::mt19937_64& rng, int n_leads, int n) {
  std::normal_distribution<float> d(0.0f, 0.5f);
  LeadSamples leads;
  for (int i = 0; i < n_leads; ++i) {
    auto& v = leads[kAllLeads[static_cast<std::size_t>(i)]];
    for (int k = 0; k < n; ++k) v.push_back(d(rng));
  }
  return EcgRecord("r1", 500.0, std::move(leads));
}

TEST(Leads, CanonicalOrderAndParsing) {
  std::vector<std::string> names;
  for (Lead l : kAllLeads) names.emplace_back(lead_name(l));
  EXPECT_EQ(names, (std::vector<std::string>{"I", "II", "III", "aVR", "aVF", "aVL", "V1", "V2", "V3", "V4",
                                             "V5", "V6"}));
  EXPECT_EQ(parse_lead("avf"), Lead::aVF);
  EXPECT_EQ(parse_lead("v6"), Lead::V6);
  EXPECT_FALSE(parse_lead("avX"));
  EXPECT_FALSE(parse_lead("V7"));
}

TEST(EcgRecord, RejectsInvalidContent) {
  EXPECT_THROW(EcgRecord("x", 500.0, {}), InvalidArgument);
  EXPECT_THROW(EcgRecord("x", 0.0, {{Lead::I, {1.0f}}}), InvalidArgument);
  EXPECT_THROW(EcgRecord("x", 500.0, {{Lead::I, {1.0f, 2.0f}}, {Lead::II, {1.0f}}}), InvalidArgument);
  EXPECT_THROW(EcgRecord("x", 500.0, {{Lead::I, {NAN}}}), InvalidArgument);
  EXPECT_THROW(EcgRecord("x", 500.0, {{Lead::I, {}}}), InvalidArgument);
}

TEST(LoadRecord, TwelveLeadCsvIsTenSeconds) {
  TempDir dir;
  std::string csv = "I,II,III,aVR,aVF,aVL,V1,V2,V3,V4,V5,V6\n";
  for (int i = 0; i < 5000; ++i) csv += "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0,1.1,1.2\n";
  write(dir.path() / "a.csv", csv);
  write(dir.path() / "a.meta.json", R"({"record_id":"a","sampling_rate_hz":500})");
  const EcgRecord rec = load_record(dir.path() / "a.csv");
  EXPECT_EQ(rec.lead_names().size(), 12u);
  EXPECT_DOUBLE_EQ(rec.duration_seconds(), 10.0);
  EXPECT_FLOAT_EQ(rec.lead(Lead::V6)[4999], 1.2f);
}

TEST(LoadRecord, ColumnsAreReorderedCanonically) {
  TempDir dir;
  write(dir.path() / "a.csv", "V1,avr,I\n1,2,3\n4,5,6\n");
  write(dir.path() / "a.meta.json", R"({"record_id":"a","sampling_rate_hz":250})");
  const EcgRecord rec = load_record(dir.path() / "a.csv");
  EXPECT_EQ(rec.lead_names(), (std::vector<Lead>{Lead::I, Lead::aVR, Lead::V1}));
  EXPECT_FLOAT_EQ(rec.lead(Lead::aVR)[1], 5.0f);
}

TEST(LoadRecord, CsvErrors) {
  TempDir dir;
  const auto p = dir.path() / "a.csv";
  write(dir.path() / "a.meta.json", R"({"record_id":"a","sampling_rate_hz":500})");
  write(p, "I,avX\n1,2\n");
  EXPECT_THROW(load_record(p), FormatError);
  write(p, "I,II\n1,2\n3\n");
  EXPECT_THROW(load_record(p), FormatError);
  write(p, "I,II\n1,nan\n");
  EXPECT_THROW(load_record(p), FormatError);
  write(p, "I,I\n1,2\n");
  EXPECT_THROW(load_record(p), FormatError);
  write(p, "I,II\n1,2\n");
  write(dir.path() / "a.meta.json", R"({"record_id":"a"})");
  EXPECT_THROW(load_record(p), FormatError);
  fs::remove(dir.path() / "a.meta.json");
  EXPECT_THROW(load_record(p), IoError);
}

TEST(LoadRecord, SidecarUnitsAreApplied) {
  TempDir dir;
  write(dir.path() / "a.csv", "II\n1000\n-500\n");
  write(dir.path() / "a.meta.json", R"({"record_id":"a","sampling_rate_hz":500,"units":"uV"})");
  const EcgRecord rec = load_record(dir.path() / "a.csv");
  EXPECT_FLOAT_EQ(rec.lead(Lead::II)[0], 1.0f);
  EXPECT_FLOAT_EQ(rec.lead(Lead::II)[1], -0.5f);
}

TEST(RoundTrip, RawbinIsExactAndCsvWithinMicrovolt) {
  TempDir dir;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const EcgRecord rec = random_record(rng, 1 + trial % 12, 200 + trial * 37);
    save_record(rec, dir.path() / "r.bin", RecordFormat::kRawBin);
    const EcgRecord back = load_record(dir.path() / "r.bin");
    EXPECT_EQ(back.leads(), rec.leads());
    EXPECT_EQ(back.record_id(), rec.record_id());
    save_record(rec, dir.path() / "r.csv", RecordFormat::kCsv);
    const EcgRecord csv = load_record(dir.path() / "r.csv");
    ASSERT_EQ(csv.lead_names(), rec.lead_names());
    for (Lead l : rec.lead_names()) {
      for (std::size_t i = 0; i < rec.n_samples(); ++i) {
        ASSERT_NEAR(csv.lead(l)[i], rec.lead(l)[i], 1e-6);
      }
    }
  }
}

TEST(RoundTrip, RawbinMatchesCsv) {
  TempDir dir;
  std::mt19937_64 rng(3);
  const EcgRecord rec = random_record(rng, 12, 5000);
  save_record(rec, dir.path() / "r.csv", RecordFormat::kCsv);
  const EcgRecord csv = load_record(dir.path() / "r.csv");
  save_record(csv, dir.path() / "r.bin", RecordFormat::kRawBin);
  EXPECT_EQ(load_record(dir.path() / "r.bin").leads(), csv.leads());
}

TEST(LoadRecord, RawbinTruncatedPayload) {
  TempDir dir;
  std::mt19937_64 rng(1);
  save_record(random_record(rng, 2, 100), dir.path() / "r.bin", RecordFormat::kRawBin);
  fs::resize_file(dir.path() / "r.bin", 100);
  EXPECT_THROW(load_record(dir.path() / "r.bin"), FormatError);
}

TEST(Resample, LengthScalesAndIdentityIsExact) {
  std::mt19937_64 rng(2);
  EcgRecord rec = random_record(rng, 3, 2500);
  rec = EcgRecord("r", 250.0, rec.leads());
  const EcgRecord up = resample_record(rec, 500.0);
  EXPECT_EQ(up.n_samples(), 5000u);
  EXPECT_NEAR(up.duration_seconds(), rec.duration_seconds(), 1.0 / 250.0);
  EXPECT_EQ(resample_record(rec, 250.0).leads(), rec.leads());
  EXPECT_THROW(resample_record(rec, 0.0), InvalidArgument);
}

TEST(Resample, SinusoidStaysOnAnalyticCurve) {
  std::vector<float> x(2500);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(std::sin(2 * std::numbers::pi * i / 250.0));
  const EcgRecord up = resample_record(EcgRecord("s", 250.0, {{Lead::II, x}}), 500.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < up.n_samples(); ++i) {
    const double t = static_cast<double>(i) / 500.0;
    worst = std::max(worst, std::abs(up.lead(Lead::II)[i] - std::sin(2 * std::numbers::pi * t)));
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(Synth, SixtyBpmGivesTenBeats) {
  SynthSpec s;
  const auto r = synthesize_ecg(s);
  EXPECT_EQ(r.truth.leads.at(Lead::II).r_peaks.size(), 10u);
  ASSERT_EQ(r.rr_ms.size(), 9u);
  for (double rr : r.rr_ms) EXPECT_NEAR(rr, 1000.0, 2.0);
}

TEST(Synth, StOffsetIsMeasurableInTheSignal) {
  SynthSpec s;
  s.st_offset_mv[Lead::V1] = 0.2;
  s.noise_mv = 0.0;
  const auto r = synthesize_ecg(s);
  const auto x = r.record.lead(Lead::V1);
  const auto& d = r.truth.leads.at(Lead::V1);
  for (std::size_t b = 0; b + 1 < d.qrs_off.size(); ++b) {
    // Baseline: TP segment between this T offset and the next P onset.
    double base = 0.0;
    int nb = 0;
    for (int i = d.t_off[b] + 5; i < d.p_on[b + 1] - 5; ++i, ++nb) base += x[static_cast<std::size_t>(i)];
    double st = 0.0;
    int ns = 0;
    for (int i = d.qrs_off[b] + 20; i < d.t_on[b]; ++i, ++ns) st += x[static_cast<std::size_t>(i)];
    ASSERT_GT(nb, 0);
    ASSERT_GT(ns, 0);
    EXPECT_NEAR(st / ns - base / nb, 0.2, 0.02) << "beat " << b;
  }
}

TEST(Synth, DeterministicPerSeed) {
  SynthSpec s;
  s.rr_pattern = RrPattern::kRandom;
  s.rr_jitter = 0.2;
  s.seed = 9;
  const auto a = synthesize_ecg(s);
  const auto b = synthesize_ecg(s);
  EXPECT_EQ(a.record.leads(), b.record.leads());
  EXPECT_EQ(a.truth, b.truth);
  s.seed = 10;
  EXPECT_NE(synthesize_ecg(s).record.leads(), a.record.leads());
}

TEST(Synth, InfeasibleSpecsAreRejected) {
  SynthSpec s;
  s.hr_bpm = 180;
  s.qt_ms = 400;
  EXPECT_THROW(synthesize_ecg(s), InvalidArgument);
  s = SynthSpec{};
  s.hr_bpm = 10;
  EXPECT_THROW(synthesize_ecg(s), InvalidArgument);
}

TEST(Synth, TruthSatisfiesDelineationInvariants) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 60; ++i) {
    SynthSpec s;
    s.seed = rng();
    s.hr_bpm = std::uniform_real_distribution<double>(40, 150)(rng);
    s.qrs_width_ms = std::uniform_real_distribution<double>(70, 150)(rng);
    s.p_present = i % 3 != 0;
    const double rr = 60000.0 / s.hr_bpm;
    s.qt_ms = std::min(0.42 * rr + 120, rr - (s.p_present ? s.pr_ms : 0.0) - 60);
    s.qt_ms = std::max(s.qt_ms, s.qrs_width_ms + 90);
    if ((s.p_present ? s.pr_ms : 0.0) + s.qt_ms + 40 > rr) s.p_present = false;
    const auto r = synthesize_ecg(s);
    EXPECT_NO_THROW(validate_delineation(r.truth, r.record.n_samples())) << "hr " << s.hr_bpm;
  }
}

}  // namespace
}  // namespace reasoneval
