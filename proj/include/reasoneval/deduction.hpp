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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reasoneval/censor.hpp"
#include "reasoneval/embedder.hpp"
#include "reasoneval/knowledge_base.hpp"

namespace reasoneval {

struct Retrieved {
  std::int64_t entry_id = -1;
  std::string label;
  double cosine = 0.0;
};

// Exact cosine ranking, descending, ties by ascending entry_id. Returns all
// entries when k exceeds the KB size. Throws InvalidArgument for k == 0, a
// dimension mismatch or an invalid (zero-information) query.
std::vector<Retrieved> retrieve_top_k(const KnowledgeBase& kb, const Embedding& query, std::size_t k);

// Share of the first k results whose label is one of gt_labels (compared
// after normalization). Throws InvalidArgument when k is 0 or exceeds the list.
double precision_at_k(const std::vector<Retrieved>& retrieved, const std::vector<std::string>& gt_labels,
                      std::size_t k);

struct DeductionResult {
  std::string trace_id;
  std::vector<std::string> gt_labels;
  std::string censored_trace;
  std::vector<Retrieved> retrieved;
  std::map<std::size_t, double> precision_at;
  bool undefined = false;  // set when nothing embeddable survived censoring
  std::string reason;
};

struct DeductionOptions {
  std::vector<std::size_t> ks{1, 5, 10};
  const SynonymTable* synonyms = nullptr;  // builtin when null
};

// Censors the predicted label (or, without one, the ground-truth labels) and
// their synonyms, embeds what is left and scores retrieval at each k.
DeductionResult evaluate_deduction(const std::string& trace_id, const std::string& trace,
                                   const std::string& predicted_label, const std::vector<std::string>& gt_labels,
                                   const KnowledgeBase& kb, const Embedder& embedder, const DeductionOptions& opt = {});

struct DeductionMetrics {
  std::map<std::size_t, std::optional<double>> mean_precision_at;
  std::size_t n_defined = 0;
  std::size_t n_undefined = 0;
};

DeductionMetrics deduction_metrics(const std::vector<DeductionResult>& results, const std::vector<std::size_t>& ks);

nlohmann::json deduction_to_json(const DeductionResult& r);

}  // namespace reasoneval
