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

#include "reasoneval/embedder.hpp"

#include <cctype>
#include <cmath>
#include <map>

#include "reasoneval/error.hpp"
#include "reasoneval/hash.hpp"

namespace reasoneval {

std::vector<std::string> embedding_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || std::ispunct(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(c));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

HashedEmbedder::HashedEmbedder(int dim, bool tf_weighting) : dim_(dim), tf_weighting_(tf_weighting) {
  if (dim <= 0) throw InvalidArgument("embedder dim must be positive");
}

std::string HashedEmbedder::fingerprint() const {
  return "hashed-fnv1a64-signed/dim=" + std::to_string(dim_) + (tf_weighting_ ? "/tf=log" : "/tf=binary");
}

Embedding HashedEmbedder::embed(std::string_view text) const {
  std::map<std::string, int> tf;
  for (auto& t : embedding_tokens(text)) ++tf[std::move(t)];
  Embedding e;
  e.values.assign(static_cast<std::size_t>(dim_), 0.0f);
  if (tf.empty()) return e;

  std::vector<double> acc(static_cast<std::size_t>(dim_), 0.0);
  for (const auto& [tok, n] : tf) {
    const std::uint64_t h = stable_hash(tok);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    const double w = tf_weighting_ ? 1.0 + std::log(static_cast<double>(n)) : 1.0;
    acc[h % static_cast<std::uint64_t>(dim_)] += sign * w;
  }
  double norm = 0.0;
  for (double v : acc) norm += v * v;
  norm = std::sqrt(norm);
  // Colliding tokens of opposite sign can cancel out completely.
  if (norm == 0.0) return e;
  for (std::size_t i = 0; i < acc.size(); ++i) e.values[i] = static_cast<float>(acc[i] / norm);
  e.valid = true;
  return e;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  if (a.size() != b.size()) throw InvalidArgument("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace reasoneval
