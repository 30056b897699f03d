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

#include "reasoneval/deduction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "reasoneval/error.hpp"
#include "reasoneval/vocab.hpp"
#include "text_util.hpp"

namespace reasoneval {

using nlohmann::json;

std::vector<Retrieved> retrieve_top_k(const KnowledgeBase& kb, const Embedding& query, std::size_t k) {
  if (k == 0) throw InvalidArgument("retrieve_top_k: k must be >= 1");
  if (!query.valid) throw InvalidArgument("retrieve_top_k: query carries no information");
  if (static_cast<int>(query.values.size()) != kb.dim())
    throw InvalidArgument("retrieve_top_k: query dim " + std::to_string(query.values.size()) + " != KB dim " +
                          std::to_string(kb.dim()));
  double qn = 0.0;
  for (float v : query.values) qn += static_cast<double>(v) * v;
  // Rows are unit norm only to float precision, so divide out both norms.
  std::vector<Retrieved> all;
  all.reserve(kb.size());
  for (std::size_t i = 0; i < kb.size(); ++i) {
    double dot = 0.0, rn = 0.0;
    const auto row = kb.row(i);
    for (std::size_t d = 0; d < row.size(); ++d) {
      dot += static_cast<double>(row[d]) * query.values[d];
      rn += static_cast<double>(row[d]) * row[d];
    }
    all.push_back({kb.entries()[i].entry_id, kb.entries()[i].label, dot / std::sqrt(qn * rn)});
  }
  auto better = [](const Retrieved& a, const Retrieved& b) {
    return a.cosine != b.cosine ? a.cosine > b.cosine : a.entry_id < b.entry_id;
  };
  const std::size_t n = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), better);
  all.resize(n);
  return all;
}

double precision_at_k(const std::vector<Retrieved>& retrieved, const std::vector<std::string>& gt_labels,
                      std::size_t k) {
  if (k == 0) throw InvalidArgument("precision_at_k: k must be >= 1");
  if (k > retrieved.size())
    throw InvalidArgument("precision_at_k: k=" + std::to_string(k) + " exceeds " + std::to_string(retrieved.size()) +
                          " retrieved entries");
  std::set<std::string> gt;
  for (const auto& l : gt_labels) gt.insert(normalize_label(l));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += gt.count(normalize_label(retrieved[i].label));
  return static_cast<double>(hits) / static_cast<double>(k);
}

DeductionResult evaluate_deduction(const std::string& trace_id, const std::string& trace,
                                   const std::string& predicted_label, const std::vector<std::string>& gt_labels,
                                   const KnowledgeBase& kb, const Embedder& embedder, const DeductionOptions& opt) {
  if (opt.ks.empty()) throw InvalidArgument("evaluate_deduction: no k values");
  const SynonymTable& syn = opt.synonyms ? *opt.synonyms : SynonymTable::builtin();
  DeductionResult r;
  r.trace_id = trace_id;
  r.gt_labels = gt_labels;

  std::vector<std::string> targets;
  if (!predicted_label.empty()) {
    // A prediction may list several labels separated by ';'.
    for (const auto& part : detail::split_any(predicted_label, ";")) {
      const auto t = detail::trim(part);
      if (!t.empty()) targets.emplace_back(t);
    }
  } else {
    targets = gt_labels;
  }
  r.censored_trace = trace;
  for (const auto& t : targets) r.censored_trace = censor_label(r.censored_trace, t, syn.lookup(t));

  const Embedding q = embedder.embed(r.censored_trace);
  if (!q.valid) {
    r.undefined = true;
    r.reason = "no embeddable text after censoring";
    return r;
  }
  const std::size_t kmax = *std::max_element(opt.ks.begin(), opt.ks.end());
  r.retrieved = retrieve_top_k(kb, q, kmax);
  for (std::size_t k : opt.ks) {
    if (k > r.retrieved.size()) {
      r.undefined = true;
      r.reason = "k=" + std::to_string(k) + " exceeds knowledge base size " + std::to_string(r.retrieved.size());
      r.precision_at.clear();
      return r;
    }
    r.precision_at[k] = precision_at_k(r.retrieved, gt_labels, k);
  }
  return r;
}

DeductionMetrics deduction_metrics(const std::vector<DeductionResult>& results, const std::vector<std::size_t>& ks) {
  DeductionMetrics m;
  std::map<std::size_t, double> sums;
  for (const auto& r : results) {
    if (r.undefined) {
      ++m.n_undefined;
      continue;
    }
    ++m.n_defined;
    for (std::size_t k : ks) sums[k] += r.precision_at.at(k);
  }
  for (std::size_t k : ks) {
    m.mean_precision_at[k] =
        m.n_defined ? std::optional<double>(sums[k] / static_cast<double>(m.n_defined)) : std::nullopt;
  }
  return m;
}

json deduction_to_json(const DeductionResult& r) {
  json retrieved = json::array();
  for (const auto& x : r.retrieved) retrieved.push_back({{"entry_id", x.entry_id}, {"label", x.label}, {"cosine", x.cosine}});
  json prec = json::object();
  for (const auto& [k, v] : r.precision_at) prec[std::to_string(k)] = v;
  json j = {{"trace_id", r.trace_id}, {"gt_labels", r.gt_labels}, {"retrieved", retrieved}, {"precision_at", prec}};
  if (r.undefined) {
    j["undefined"] = true;
    j["reason"] = r.reason;
  }
  return j;
}

}  // namespace reasoneval
