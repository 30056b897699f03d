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
#include <numeric>

#include "reasoneval/delineation.hpp"
#include "reasoneval/error.hpp"
#include "reasoneval/features.hpp"
#include "reasoneval/synth.hpp"
#include "support/sweep.hpp"

namespace fs = std::filesystem;

namespace reasoneval {
namespace {

constexpr int kTol20ms = 10;  // samples at 500 Hz

double mean_width(const std::vector<int>& on, const std::vector<int>& off, double fs) {
  double s = 0.0;
  for (std::size_t i = 0; i < on.size(); ++i) s += off[i] - on[i];
  return s / static_cast<double>(on.size()) * 1000.0 / fs;
}

TEST(DetectRPeaks, SixtyBpm) {
  SynthSpec s;
  const auto r = synthesize_ecg(s);
  const auto peaks = detect_r_peaks(r.record.lead(Lead::II), 500.0, DelineatorConfig{});
  const auto c = testing::match_peaks(r.truth.leads.at(Lead::II).r_peaks, peaks, kTol20ms);
  EXPECT_EQ(peaks.size(), 10u);
  EXPECT_EQ(c.tp, 10);
}

TEST(DetectRPeaks, OneTwentyBpmPerfectPrecisionRecall) {
  SynthSpec s;
  s.hr_bpm = 120;
  s.qt_ms = 320;
  s.pr_ms = 140;
  const auto r = synthesize_ecg(s);
  const auto peaks = detect_r_peaks(r.record.lead(Lead::II), 500.0, DelineatorConfig{});
  const auto c = testing::match_peaks(r.truth.leads.at(Lead::II).r_peaks, peaks, kTol20ms);
  EXPECT_EQ(r.truth.leads.at(Lead::II).r_peaks.size(), 20u);
  EXPECT_DOUBLE_EQ(c.precision(), 1.0);
  EXPECT_DOUBLE_EQ(c.recall(), 1.0);
}

TEST(DetectRPeaks, FlatSignalYieldsNothing) {
  std::vector<float> zeros(5000, 0.0f);
  EXPECT_TRUE(detect_r_peaks(zeros, 500.0, DelineatorConfig{}).empty());
}

TEST(DetectRPeaks, RefractoryAndOrdering) {
  SynthSpec s;
  s.hr_bpm = 170;
  s.qt_ms = 250;
  s.p_present = false;
  const auto r = synthesize_ecg(s);
  const auto peaks = detect_r_peaks(r.record.lead(Lead::V4), 500.0, DelineatorConfig{});
  for (std::size_t i = 1; i < peaks.size(); ++i) EXPECT_GE(peaks[i] - peaks[i - 1], 100);
}

TEST(DetectRPeaks, RejectsShortSignalsAndBadConfig) {
  std::vector<float> x(900, 0.0f);
  EXPECT_THROW(detect_r_peaks(x, 500.0, DelineatorConfig{}), InvalidArgument);
  DelineatorConfig cfg;
  cfg.refractory_ms = 100;
  EXPECT_THROW(cfg.validate(500.0), InvalidArgument);
  cfg = DelineatorConfig{};
  cfg.bandpass_high_hz = 300;
  EXPECT_THROW(cfg.validate(500.0), InvalidArgument);
  cfg = DelineatorConfig{};
  cfg.threshold_decay = 1.0;
  EXPECT_THROW(cfg.validate(500.0), InvalidArgument);
}

TEST(DelineateWaves, QrsWidthNinety) {
  SynthSpec s;
  s.qrs_width_ms = 90;
  const auto r = synthesize_ecg(s);
  const auto d = delineate(r.record, DelineatorConfig{});
  const auto& l = d.leads.at(Lead::II);
  EXPECT_NEAR(mean_width(l.qrs_on, l.qrs_off, 500.0), 90.0, 10.0);
}

TEST(DelineateWaves, AbsentPWavesPropagate) {
  SynthSpec s;
  s.p_present = false;
  const auto d = delineate(synthesize_ecg(s).record, DelineatorConfig{});
  for (const auto& [lead, ld] : d.leads) {
    EXPECT_TRUE(ld.p_on.empty()) << lead_name(lead);
    EXPECT_TRUE(ld.p_off.empty()) << lead_name(lead);
  }
}

TEST(DelineateWaves, PrOneSixty) {
  SynthSpec s;
  s.pr_ms = 160;
  const auto r = synthesize_ecg(s);
  const auto ft = compute_features(r.record, delineate(r.record, DelineatorConfig{}));
  ASSERT_TRUE(ft.leads.at(Lead::II).pr_ms);
  EXPECT_NEAR(*ft.leads.at(Lead::II).pr_ms, 160.0, 15.0);
}

TEST(DelineateWaves, OutputSatisfiesInvariantsAcrossSweep) {
  for (int i = 0; i < 30; ++i) {
    const auto r = synthesize_ecg(testing::sweep_spec(i));
    const auto d = delineate(r.record, DelineatorConfig{});
    EXPECT_NO_THROW(validate_delineation(d, r.record.n_samples())) << i;
  }
}

TEST(DelineateWaves, DeterministicAcrossCalls) {
  const auto r = synthesize_ecg(testing::sweep_spec(4));
  EXPECT_EQ(delineate(r.record, DelineatorConfig{}), delineate(r.record, DelineatorConfig{}));
}

TEST(ValidateDelineation, RejectsBrokenStructures) {
  LeadDelineation ok;
  ok.r_peaks = {50, 150};
  ok.qrs_on = {45, 145};
  ok.qrs_off = {55, 155};
  Delineation d{"x", 500.0, {{Lead::II, ok}}};
  EXPECT_NO_THROW(validate_delineation(d, 200));
  EXPECT_THROW(validate_delineation(d, 150), FormatError);

  auto bad = d;
  bad.leads[Lead::II].qrs_off = {40, 155};
  EXPECT_THROW(validate_delineation(bad, 200), FormatError);
  bad = d;
  bad.leads[Lead::II].r_peaks = {150, 50};
  EXPECT_THROW(validate_delineation(bad, 200), FormatError);
  bad = d;
  bad.leads[Lead::II].r_peaks = {60, 150};
  EXPECT_THROW(validate_delineation(bad, 200), FormatError);
  bad = d;
  bad.leads[Lead::II].p_on = {10};
  EXPECT_THROW(validate_delineation(bad, 200), FormatError);
}

class ImportDelineation : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("reasoneval_delin_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    synth_ = std::make_unique<SynthResult>(synthesize_ecg(SynthSpec{}));
  }
  void TearDown() override { fs::remove_all(dir_); }
  void write(const std::string& text) { std::ofstream(dir_ / "d.json") << text; }

  fs::path dir_;
  std::unique_ptr<SynthResult> synth_;
};

TEST_F(ImportDelineation, RoundTripIsIdentity) {
  save_delineation(synth_->truth, dir_ / "d.json");
  EXPECT_EQ(import_delineation(dir_ / "d.json", synth_->record), synth_->truth);
}

TEST_F(ImportDelineation, InvertedBoundary) {
  write(R"({"record_id":"synthetic","fs_hz":500,"leads":{"II":{"r_peak_idxs":[100],"qrs_on_idxs":[110],"qrs_off_idxs":[90]}}})");
  EXPECT_THROW(import_delineation(dir_ / "d.json", synth_->record), FormatError);
}

TEST_F(ImportDelineation, UnknownLead) {
  write(R"({"record_id":"synthetic","fs_hz":500,"leads":{"V7":{"r_peak_idxs":[100]}}})");
  EXPECT_THROW(import_delineation(dir_ / "d.json", synth_->record), FormatError);
}

TEST_F(ImportDelineation, LeadMissingFromRecordAndOutOfRange) {
  SynthSpec s;
  s.leads = {Lead::II};
  const auto r = synthesize_ecg(s);
  save_delineation(synth_->truth, dir_ / "d.json");
  EXPECT_THROW(import_delineation(dir_ / "d.json", r.record), FormatError);
  write(R"({"record_id":"synthetic","fs_hz":500,"leads":{"II":{"r_peak_idxs":[6000]}}})");
  EXPECT_THROW(import_delineation(dir_ / "d.json", synth_->record), FormatError);
}

TEST(ComputeFeatures, ConstantRrSixtyBpm) {
  const auto r = synthesize_ecg(SynthSpec{});
  const auto ft = compute_features(r.record, delineate(r.record, DelineatorConfig{}));
  const auto& ii = ft.leads.at(Lead::II);
  EXPECT_NEAR(*ii.rr_ms, 1000.0, 5.0);
  EXPECT_NEAR(*ii.heart_rate_bpm, 60.0, 0.5);
  EXPECT_EQ(ii.rr_intervals_ms.size(), ii.delineation.r_peaks.size() - 1);
}

TEST(ComputeFeatures, BazettIdentityAtOneSecond) {
  SynthSpec s;
  s.qt_ms = 400;
  const auto r = synthesize_ecg(s);
  const auto ft = compute_features(r.record, r.truth);
  EXPECT_NEAR(*ft.leads.at(Lead::II).qtc_ms, 400.0, 5.0);
}

TEST(ComputeFeatures, BazettAtSixForty) {
  SynthSpec s;
  s.hr_bpm = 60000.0 / 640.0;
  s.qt_ms = 400;
  const auto r = synthesize_ecg(s);
  const auto ft = compute_features(r.record, r.truth);
  // Hand-evaluated: 400 / sqrt(0.64) = 500.
  EXPECT_NEAR(*ft.leads.at(Lead::II).qtc_ms, 500.0, 8.0);
}

TEST(ComputeFeatures, FridericiaIsSelectable) {
  SynthSpec s;
  s.hr_bpm = 60000.0 / 640.0;
  s.qt_ms = 400;
  const auto r = synthesize_ecg(s);
  const auto ft = compute_features(r.record, r.truth, QtcFormula::kFridericia);
  EXPECT_NEAR(*ft.leads.at(Lead::II).qtc_ms, 400.0 / std::cbrt(0.64), 8.0);
}

TEST(ComputeFeatures, AbsentFeaturesAreExplicit) {
  SynthSpec s;
  s.p_present = false;
  const auto r = synthesize_ecg(s);
  const auto ft = compute_features(r.record, delineate(r.record, DelineatorConfig{}));
  for (const auto& [lead, lf] : ft.leads) {
    EXPECT_FALSE(lf.pr_ms) << lead_name(lead);
    EXPECT_FALSE(lf.p_amp_mv) << lead_name(lead);
    EXPECT_DOUBLE_EQ(lf.p_wave_fraction, 0.0);
  }
  const auto j = features_to_json(ft);
  EXPECT_TRUE(j.at("leads").at("II").at("avg_PR_interval_(msec)").is_null());
}

TEST(ComputeFeatures, RateTimesRrIsSixtyThousand) {
  for (int i = 0; i < 40; ++i) {
    const auto r = synthesize_ecg(testing::sweep_spec(i));
    const auto ft = compute_features(r.record, delineate(r.record, DelineatorConfig{}));
    for (const auto& [lead, lf] : ft.leads) {
      if (!lf.rr_ms || !lf.heart_rate_bpm) continue;
      EXPECT_NEAR(*lf.rr_ms * *lf.heart_rate_bpm, 60000.0, 60.0) << i << " " << lead_name(lead);
      for (const auto& v : {lf.pr_ms, lf.qrs_ms, lf.qt_ms, lf.qtc_ms, lf.st_segment_ms}) {
        if (v) EXPECT_GE(*v, 0.0);
      }
    }
  }
}

TEST(ComputeFeatures, StDeviationFollowsOffset) {
  SynthSpec s;
  s.st_offset_mv[Lead::V1] = 0.2;
  const auto r = synthesize_ecg(s);
  const auto ft = compute_features(r.record, delineate(r.record, DelineatorConfig{}));
  EXPECT_NEAR(*ft.leads.at(Lead::V1).st_deviation_mv, 0.2, 0.03);
  EXPECT_NEAR(*ft.leads.at(Lead::V2).st_deviation_mv, 0.0, 0.03);
}

TEST(ComputeFeatures, FrontalAxisTracksSynthAxis) {
  for (double axis : {-45.0, 0.0, 60.0, 100.0}) {
    SynthSpec s;
    s.axis_deg = axis;
    const auto r = synthesize_ecg(s);
    const auto ft = compute_features(r.record, r.truth);
    ASSERT_TRUE(ft.frontal_axis_deg);
    EXPECT_NEAR(*ft.frontal_axis_deg, axis, 15.0) << axis;
  }
}

TEST(ComputeFeatures, JsonUsesAgentKeys) {
  const auto r = synthesize_ecg(SynthSpec{});
  const auto j = features_to_json(compute_features(r.record, r.truth));
  const auto& ii = j.at("leads").at("II");
  for (const char* key : {"avg_PR_interval_(msec)", "avg_QRS_interval_(msec)", "avg_QT_interval_(msec)",
                          "avg_QTc_interval_(msec)", "avg_RR_interval_(msec)", "avg_heart_rate_(bpm)"}) {
    EXPECT_TRUE(ii.contains(key)) << key;
  }
}

}  // namespace
}  // namespace reasoneval
