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

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "reasoneval/embedder.hpp"
#include "reasoneval/knowledge_base.hpp"

namespace reasoneval {

struct RetryPolicy {
  int timeout_ms = 30000;
  int retries = 3;  // extra attempts after the first
  int backoff_initial_ms = 500;
  double backoff_factor = 2.0;
  int backoff_max_ms = 8000;
};

struct Endpoint {
  std::string url;  // scheme://host[:port]/path
  std::string api_key_env = "PROVIDER_API_KEY";
  double rate_per_s = 0.0;  // 0 disables rate limiting
  double burst = 1.0;
  bool concurrent = true;
};

// Thread-safe token bucket. acquire() blocks until a token is available.
class TokenBucket {
 public:
  TokenBucket(double rate_per_s, double burst);
  void acquire();

 private:
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mu_;
};

struct CallLog {
  int attempts = 0;
  std::vector<int> statuses;  // HTTP status per attempt, 0 for transport errors
};

// JSON-over-HTTP POST with exponential backoff on 429, 5xx and connection
// failures. 4xx other than 429 fails at once with kHttp. The bearer token is
// read from the endpoint's environment variable when set.
class ProviderClient {
 public:
  ProviderClient(Endpoint endpoint, RetryPolicy policy);
  nlohmann::json post(const nlohmann::json& payload, CallLog* log = nullptr) const;
  const Endpoint& endpoint() const { return endpoint_; }

 private:
  Endpoint endpoint_;
  RetryPolicy policy_;
  std::string base_;
  std::string path_;
  std::shared_ptr<TokenBucket> bucket_;
};

// Throws ProviderError(kSchema) unless j is
// {"diagnostic_clusters": [{"concept_label": str, "criteria": [str, ...]}, ...]}.
std::vector<DiagnosticCluster> parse_cleaner_response(const nlohmann::json& j);
// Expects {"embedding": [number, ...]} of length dim; the result is
// normalized, and a zero vector is returned as invalid.
Embedding parse_embedding_response(const nlohmann::json& j, int dim);

// Cleaner backed by a provider speaking the cleaner wire contract:
// request {article_text, label, strategy}.
class HttpCleaner : public Cleaner {
 public:
  HttpCleaner(std::string tag, Endpoint endpoint, RetryPolicy policy);
  std::string tag() const override { return tag_; }
  std::vector<DiagnosticCluster> clean(const RawArticle& article, CleaningStrategy strategy) const override;
  bool concurrent() const override { return client_.endpoint().concurrent; }

 private:
  std::string tag_;
  ProviderClient client_;
};

// Embedder backed by a provider: request {text, model}.
class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(std::string model, int dim, Endpoint endpoint, RetryPolicy policy);
  int dim() const override { return dim_; }
  std::string fingerprint() const override;
  Embedding embed(std::string_view text) const override;
  bool concurrent() const override { return client_.endpoint().concurrent; }

 private:
  std::string model_;
  int dim_;
  ProviderClient client_;
};

}  // namespace reasoneval
