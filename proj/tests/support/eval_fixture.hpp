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
#include <fstream>
#include <string>

#include "json.hpp"
#include "reasoneval/harness.hpp"
#include "reasoneval/record.hpp"
#include "reasoneval/synth.hpp"

namespace reasoneval::testing {

inline std::filesystem::path fixtures_dir() { return REASONEVAL_FIXTURES_DIR; }

// Writes the records of fixtures/eval/cases.json as rawbin files next to a
// manifest.jsonl in `dir` and returns the manifest path.
inline std::filesystem::path materialize_eval_fixture(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::ifstream in(fixtures_dir() / "eval" / "cases.json");
  const auto cases = nlohmann::json::parse(in);
  fs::create_directories(dir / "records");
  for (const auto& [name, spec] : cases.at("records").items()) {
    const auto res = synthesize_ecg(synth_spec_from_json(spec));
    save_record(res.record, dir / "records" / (name + ".bin"), RecordFormat::kRawBin);
  }
  std::vector<ManifestRow> rows;
  for (auto row : cases.at("rows")) {
    row["record_path"] = "records/" + row.at("record").get<std::string>() + ".bin";
    row.erase("record");
    rows.push_back(manifest_row_from_json(row));
  }
  save_manifest(rows, dir / "manifest.jsonl");
  return dir / "manifest.jsonl";
}

// A fresh directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("reasoneval_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace reasoneval::testing
