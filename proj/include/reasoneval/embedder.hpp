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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace reasoneval {

struct Embedding {
  std::vector<float> values;  // unit norm when valid
  bool valid = false;         // false when the text carried no tokens
};

// Text embedding contract. Implementations must be deterministic per
// fingerprint and return dim()-length vectors.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual int dim() const = 0;
  virtual std::string fingerprint() const = 0;
  virtual Embedding embed(std::string_view text) const = 0;
  // False when calls must be serialized by the caller.
  virtual bool concurrent() const { return true; }
};

// Lowercased bag of words; punctuation becomes whitespace. Shared by the
// hashed embedder and its tests.
std::vector<std::string> embedding_tokens(std::string_view text);

// Signed feature hashing into dim buckets with 1 + ln(tf) weights.
class HashedEmbedder : public Embedder {
 public:
  explicit HashedEmbedder(int dim = 512, bool tf_weighting = true);

  int dim() const override { return dim_; }
  std::string fingerprint() const override;
  Embedding embed(std::string_view text) const override;

 private:
  int dim_;
  bool tf_weighting_;
};

double cosine(const std::vector<float>& a, const std::vector<float>& b);

}  // namespace reasoneval
