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

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "reasoneval/leads.hpp"

namespace reasoneval {

using LeadSamples = std::map<Lead, std::vector<float>>;

// A multi-lead ECG strip in millivolts. Immutable once constructed; the
// constructor enforces 1-12 leads of equal nonzero length, finite samples and
// a positive sampling rate.
class EcgRecord {
 public:
  EcgRecord(std::string record_id, double sampling_rate_hz, LeadSamples leads);

  const std::string& record_id() const { return record_id_; }
  double sampling_rate_hz() const { return fs_; }
  size_t n_samples() const { return n_samples_; }
  double duration_seconds() const { return static_cast<double>(n_samples_) / fs_; }

  bool has_lead(Lead l) const { return leads_.count(l) != 0; }
  // Throws InvalidArgument if the lead is not present.
  std::span<const float> lead(Lead l) const;
  std::vector<Lead> lead_names() const;
  const LeadSamples& leads() const { return leads_; }

 private:
  std::string record_id_;
  double fs_;
  size_t n_samples_ = 0;
  LeadSamples leads_;
};

enum class RecordFormat { kCsv, kRawBin };

// Picks the format from the extension: ".csv" -> CSV, ".bin" -> rawbin.
RecordFormat format_from_path(const std::filesystem::path& path);

// The sidecar lives next to the data file: "rec.csv" -> "rec.meta.json".
std::filesystem::path sidecar_path(const std::filesystem::path& data_path);

EcgRecord load_record(const std::filesystem::path& path, RecordFormat format);
inline EcgRecord load_record(const std::filesystem::path& path) {
  return load_record(path, format_from_path(path));
}

// CSV samples are written with six decimals; rawbin is exact.
void save_record(const EcgRecord& rec, const std::filesystem::path& path, RecordFormat format);

// Linear-interpolation resampling. Returns an identical copy when the target
// equals the source rate.
EcgRecord resample_record(const EcgRecord& rec, double target_hz);

}  // namespace reasoneval
