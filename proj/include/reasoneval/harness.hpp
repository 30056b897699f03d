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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "reasoneval/adversarial.hpp"
#include "reasoneval/censor.hpp"
#include "reasoneval/deduction.hpp"
#include "reasoneval/delineation.hpp"
#include "reasoneval/extract.hpp"
#include "reasoneval/knowledge_base.hpp"
#include "reasoneval/limits.hpp"
#include "reasoneval/perception.hpp"
#include "reasoneval/provider.hpp"

namespace reasoneval {

struct EmbedderConfig {
  std::string type = "builtin";  // "builtin" or "http"
  int dim = 512;
  bool tf_weighting = true;
  std::string model;  // http only
  Endpoint endpoint;
};

struct CleanerConfig {
  std::string type = "builtin";  // "builtin" or "http"
  std::string tag = "builtin";
  Endpoint endpoint;
};

struct HarnessConfig {
  NormalLimits limits;
  DelineatorConfig delineator;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<std::size_t> ks{1, 5, 10};
  FlipMode flip_mode = FlipMode::kAll;
  double resample_hz = 500.0;
  EmbedderConfig embedder;
  std::vector<CleanerConfig> cleaners{CleanerConfig{}};
  std::vector<CleaningStrategy> strategies{CleaningStrategy::kExactQuote, CleaningStrategy::kStructuredSynthesis};
  RetryPolicy retry;
  std::string lexicon_path;   // empty selects the builtin asset
  std::string antonyms_path;
  std::string synonyms_path;
};

// Missing keys keep their defaults. Unknown keys and ill-typed or
// out-of-range values throw ConfigError.
HarnessConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const HarnessConfig& c);
HarnessConfig load_config(const std::filesystem::path& path);

// Lexicons, tables and providers instantiated from a config.
struct Resources {
  std::shared_ptr<const Lexicon> lexicon;
  std::shared_ptr<const AntonymMap> antonyms;
  std::shared_ptr<const SynonymTable> synonyms;
  std::shared_ptr<const Embedder> embedder;
  std::vector<std::shared_ptr<const Cleaner>> cleaners;
};
Resources load_resources(const HarnessConfig& c);

struct ManifestRow {
  std::string trace_id;
  std::string record_path;
  std::vector<std::string> gt_labels;
  std::optional<std::string> predicted_label;
  std::string reasoning_trace;
  std::string model_tag;
  std::optional<std::string> delineation_path;
  std::optional<std::string> patient_id;
  std::string task;
};

struct Manifest {
  std::filesystem::path base_dir;  // relative record paths resolve against it
  std::vector<ManifestRow> rows;
};

// "gt_label" is accepted as a single-label shorthand for "gt_labels".
ManifestRow manifest_row_from_json(const nlohmann::json& j);
nlohmann::json manifest_row_to_json(const ManifestRow& r);
// Throws FormatError naming the line for malformed rows or duplicate ids.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::vector<ManifestRow>& rows, const std::filesystem::path& path);

// Rewrites relative record and delineation paths so rows read from from_dir
// resolve the same files when written to a manifest in to_dir.
std::vector<ManifestRow> rebase_rows(std::vector<ManifestRow> rows, const std::filesystem::path& from_dir,
                                     const std::filesystem::path& to_dir);

// Seeded shuffle of patient groups (rows without patient_id are their own
// group), then greedy filling of the first part up to round(ratio * n) rows.
// Throws InvalidArgument unless 0 < ratio < 1.
std::pair<std::vector<ManifestRow>, std::vector<ManifestRow>> split_dataset(const std::vector<ManifestRow>& rows,
                                                                            double ratio, std::uint64_t seed);

// Sample Pearson correlation; nullopt when either side has zero variance.
// Throws InvalidArgument for unequal lengths or fewer than two points.
std::optional<double> pearson_r(const std::vector<double>& x, const std::vector<double>& y);

// Exact set match of normalized labels. A predicted label may list several
// labels separated by ';'.
bool final_answer_correct(const std::optional<std::string>& predicted, const std::vector<std::string>& gt_labels);

// Record, features and the findings source for one row. Records are resampled
// to resample_hz unless an external delineation is supplied, whose indices
// refer to the native sampling rate.
struct PreparedRow {
  EcgRecord record;
  FeatureTable features;
};
PreparedRow prepare_row(const ManifestRow& row, const std::filesystem::path& base_dir, const HarnessConfig& c);

// Evaluates every row in parallel; rows that throw are listed under
// "failures" and left out of the aggregates. Throws ConfigError when the KB
// was built with a different embedder.
nlohmann::json run_model_eval(const Manifest& manifest, const KnowledgeBase& kb, const HarnessConfig& c,
                              const Resources& res);

// Supporting or adversarial assessment of the notes in reasoning_trace.
nlohmann::json run_assessment(const Manifest& manifest, bool adversarial, const HarnessConfig& c,
                              const Resources& res);

// Aggregates and correlation block recomputed from the per-trace entries of
// an eval report.
nlohmann::json recompute_aggregates(const nlohmann::json& report);
nlohmann::json recompute_correlation(const nlohmann::json& aggregates, const std::vector<std::size_t>& ks);
// Throws FormatError when a report's stored blocks differ from recomputation.
void check_report_consistency(const nlohmann::json& report);

std::size_t report_success_count(const nlohmann::json& report);

enum ReportFormat : unsigned { kReportJson = 1, kReportCsv = 2, kReportSvg = 4 };
// "json,csv,svg" style list; throws ConfigError for unknown names.
unsigned parse_report_formats(std::string_view list);
std::string report_csv(const nlohmann::json& report);
std::string report_svg(const nlohmann::json& report);
// Writes report.json / report.csv / report.svg into dir, creating it.
// Throws IoError when the directory cannot be written.
std::vector<std::filesystem::path> emit_report(const nlohmann::json& report, const std::filesystem::path& dir,
                                               unsigned formats);

// Ingest, clean and index a markdown corpus. The result carries the KB and a
// build log with warnings and cleaning failures.
struct KbBuild {
  KnowledgeBase kb;
  nlohmann::json log;
};
KbBuild build_kb(const std::filesystem::path& corpus_dir, const nlohmann::json& label_map, const HarnessConfig& c,
                 const Resources& res);

nlohmann::json query_kb(const KnowledgeBase& kb, const Embedder& embedder, std::string_view text, std::size_t k);

}  // namespace reasoneval
