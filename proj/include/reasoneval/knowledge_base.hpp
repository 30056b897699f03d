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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "reasoneval/embedder.hpp"
#include "reasoneval/vocab.hpp"

namespace reasoneval {

enum class Source { kLitfl, kWikipedia, kEcgpedia, kWikiem, kOther };
enum class CleaningStrategy { kExactQuote, kStructuredSynthesis };

std::string to_string(Source s);
std::string to_string(CleaningStrategy s);
std::optional<Source> parse_source(std::string_view s);
std::optional<CleaningStrategy> parse_strategy(std::string_view s);

struct RawArticle {
  std::string label;
  Source source = Source::kOther;
  std::filesystem::path path;  // relative to the corpus root
  std::string text;
};

struct IngestResult {
  std::vector<RawArticle> articles;
  std::vector<std::string> warnings;
};

// label_map: {"<label>": ["litfl/af.md", {"path": "x.md", "source": "wikipedia"}, ...]}.
// A bare path takes its source from its first directory when that names a
// known source, otherwise "other". At most five files per (label, source) are
// kept, in filename order. Throws ConfigError for labels outside the
// vocabulary and IoError for unreadable files.
IngestResult ingest_corpus(const std::filesystem::path& dir, const nlohmann::json& label_map,
                           const LabelVocabulary& vocab = LabelVocabulary::builtin());

struct DiagnosticCluster {
  std::string concept_label;
  std::vector<std::string> criteria;
};

// Turns an article into diagnostic clusters. Implementations may call out to
// a provider and throw ProviderError on failure.
class Cleaner {
 public:
  virtual ~Cleaner() = default;
  virtual std::string tag() const = 0;
  virtual std::vector<DiagnosticCluster> clean(const RawArticle& article, CleaningStrategy strategy) const = 0;
  virtual bool concurrent() const { return true; }
};

// Harvests bullets under headings that mention criteria, diagnosis or ECG
// features. Structured synthesis rewrites each bullet into canonical finding
// templates when the lexicon recognises it.
class BuiltinCleaner : public Cleaner {
 public:
  std::string tag() const override { return "builtin"; }
  std::vector<DiagnosticCluster> clean(const RawArticle& article, CleaningStrategy strategy) const override;
};

struct CriteriaEntry {
  std::int64_t entry_id = -1;
  std::string label;
  Source source = Source::kOther;
  CleaningStrategy strategy = CleaningStrategy::kExactQuote;
  std::string cleaner_tag;
  std::string article;  // corpus-relative path of the source file
  std::string concept_label;
  std::vector<std::string> criteria;
  std::string combined_text;

  bool operator==(const CriteriaEntry&) const = default;
};

std::string combined_text(const std::string& concept_label, const std::vector<std::string>& criteria);

// Entries for one article under one strategy; entry_id is left at -1.
// Clusters without criteria are dropped, and so are exact-quote criteria that
// do not occur verbatim in the article.
std::vector<CriteriaEntry> clean_article(const RawArticle& article, CleaningStrategy strategy,
                                         const Cleaner& cleaner);

struct CleaningFailure {
  std::string article;
  std::string cleaner_tag;
  std::string strategy;
  std::string message;
};

struct CleaningRun {
  std::vector<CriteriaEntry> entries;  // entry_id = position
  std::vector<CleaningFailure> failures;
};

// Every article under every (strategy, cleaner) pair; provider failures skip
// that article and are recorded.
CleaningRun clean_corpus(const std::vector<RawArticle>& articles, const std::vector<const Cleaner*>& cleaners,
                         const std::vector<CleaningStrategy>& strategies);

class KnowledgeBase {
 public:
  // Throws InvalidArgument unless rows align with entries and are unit norm.
  KnowledgeBase(std::vector<CriteriaEntry> entries, std::vector<float> vectors, int dim, std::string fingerprint);

  const std::vector<CriteriaEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  int dim() const { return dim_; }
  const std::string& embedder_fingerprint() const { return fingerprint_; }
  std::span<const float> row(std::size_t i) const;
  const std::vector<float>& vectors() const { return vectors_; }

 private:
  std::vector<CriteriaEntry> entries_;
  std::vector<float> vectors_;
  int dim_;
  std::string fingerprint_;
};

KnowledgeBase build_index(std::vector<CriteriaEntry> entries, const Embedder& embedder);

// Writes entries.jsonl, vectors.json and vectors.bin into dir.
void save_kb(const KnowledgeBase& kb, const std::filesystem::path& dir);
KnowledgeBase load_kb(const std::filesystem::path& dir);

nlohmann::json entry_to_json(const CriteriaEntry& e);
CriteriaEntry entry_from_json(const nlohmann::json& j);

}  // namespace reasoneval
