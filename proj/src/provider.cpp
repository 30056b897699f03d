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

#include "reasoneval/provider.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

#include "httplib.h"
#include "reasoneval/error.hpp"

namespace reasoneval {

TokenBucket::TokenBucket(double rate_per_s, double burst)
    : rate_(rate_per_s), burst_(std::max(burst, 1.0)), tokens_(std::max(burst, 1.0)),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
  if (rate_ <= 0.0) return;
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    const double dt = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(burst_, tokens_ + dt * rate_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait_s = (1.0 - tokens_) / rate_;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
    lock.lock();
  }
}

namespace {

std::shared_ptr<TokenBucket> bucket_for(const Endpoint& e) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<TokenBucket>> buckets;
  std::lock_guard lock(mu);
  auto& b = buckets[e.url];
  if (!b) b = std::make_shared<TokenBucket>(e.rate_per_s, e.burst);
  return b;
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status <= 599); }

}  // namespace

ProviderClient::ProviderClient(Endpoint endpoint, RetryPolicy policy)
    : endpoint_(std::move(endpoint)), policy_(policy) {
  const auto& url = endpoint_.url;
  const auto scheme = url.find("://");
  if (url.empty() || scheme == std::string::npos) throw ConfigError("provider url must be scheme://host/path: " + url);
  const auto slash = url.find('/', scheme + 3);
  base_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
  if (policy_.timeout_ms <= 0 || policy_.retries < 0 || policy_.backoff_initial_ms < 0 ||
      policy_.backoff_factor < 1.0 || policy_.backoff_max_ms < 0)
    throw ConfigError("invalid provider retry policy");
  bucket_ = bucket_for(endpoint_);
}

nlohmann::json ProviderClient::post(const nlohmann::json& payload, CallLog* log) const {
  httplib::Client cli(base_);
  const auto timeout = std::chrono::milliseconds(policy_.timeout_ms);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!endpoint_.api_key_env.empty()) {
    if (const char* key = std::getenv(endpoint_.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const std::string body = payload.dump();

  CallLog local;
  CallLog& lg = log ? *log : local;
  std::string last_problem;
  bool last_was_timeout = false;
  for (int attempt = 0; attempt <= policy_.retries; ++attempt) {
    if (attempt > 0) {
      double delay = policy_.backoff_initial_ms * std::pow(policy_.backoff_factor, attempt - 1);
      delay = std::min(delay, static_cast<double>(policy_.backoff_max_ms));
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay));
    }
    bucket_->acquire();
    ++lg.attempts;
    const auto t0 = std::chrono::steady_clock::now();
    auto res = cli.Post(path_, headers, body, "application/json");
    if (!res) {
      lg.statuses.push_back(0);
      const auto err = res.error();
      const auto elapsed = std::chrono::steady_clock::now() - t0;
      // httplib reports a read timeout as a plain read error.
      last_was_timeout = err == httplib::Error::ConnectionTimeout ||
                         (err == httplib::Error::Read && elapsed >= timeout * 9 / 10);
      last_problem = last_was_timeout ? "timed out after " + std::to_string(policy_.timeout_ms) + " ms"
                                      : "transport error: " + httplib::to_string(err);
      continue;
    }
    lg.statuses.push_back(res->status);
    last_was_timeout = false;
    if (res->status >= 200 && res->status < 300) {
      auto parsed = nlohmann::json::parse(res->body, nullptr, false);
      if (parsed.is_discarded())
        throw ProviderError(ProviderErrorKind::kSchema, endpoint_.url + ": response is not valid JSON", lg.attempts);
      return parsed;
    }
    if (!retryable_status(res->status))
      throw ProviderError(ProviderErrorKind::kHttp, endpoint_.url + ": HTTP " + std::to_string(res->status),
                          lg.attempts);
    last_problem = "HTTP " + std::to_string(res->status);
  }
  if (last_was_timeout) throw ProviderError(ProviderErrorKind::kTimeout, endpoint_.url + ": " + last_problem, lg.attempts);
  throw ProviderError(ProviderErrorKind::kRetriesExhausted,
                      endpoint_.url + ": gave up after " + std::to_string(lg.attempts) + " attempts (" +
                          last_problem + ")",
                      lg.attempts);
}

std::vector<DiagnosticCluster> parse_cleaner_response(const nlohmann::json& j) {
  auto bad = [](const std::string& m) { return ProviderError(ProviderErrorKind::kSchema, "cleaner response: " + m); };
  if (!j.is_object() || !j.contains("diagnostic_clusters")) throw bad("missing diagnostic_clusters");
  const auto& arr = j.at("diagnostic_clusters");
  if (!arr.is_array()) throw bad("diagnostic_clusters is not an array");
  std::vector<DiagnosticCluster> out;
  for (const auto& c : arr) {
    if (!c.is_object() || !c.contains("concept_label") || !c.at("concept_label").is_string())
      throw bad("cluster without a string concept_label");
    if (!c.contains("criteria") || !c.at("criteria").is_array()) throw bad("cluster without a criteria array");
    DiagnosticCluster dc;
    dc.concept_label = c.at("concept_label").get<std::string>();
    for (const auto& s : c.at("criteria")) {
      if (!s.is_string()) throw bad("criterion is not a string");
      dc.criteria.push_back(s.get<std::string>());
    }
    out.push_back(std::move(dc));
  }
  return out;
}

Embedding parse_embedding_response(const nlohmann::json& j, int dim) {
  auto bad = [](const std::string& m) { return ProviderError(ProviderErrorKind::kSchema, "embedding response: " + m); };
  if (!j.is_object() || !j.contains("embedding") || !j.at("embedding").is_array()) throw bad("missing embedding array");
  const auto& arr = j.at("embedding");
  if (static_cast<int>(arr.size()) != dim)
    throw bad("expected " + std::to_string(dim) + " values, got " + std::to_string(arr.size()));
  Embedding e;
  e.values.reserve(arr.size());
  double sq = 0.0;
  for (const auto& v : arr) {
    if (!v.is_number()) throw bad("non-numeric value");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw bad("non-finite value");
    e.values.push_back(static_cast<float>(x));
    sq += x * x;
  }
  if (sq <= 0.0) return e;
  const double inv = 1.0 / std::sqrt(sq);
  for (auto& x : e.values) x = static_cast<float>(x * inv);
  e.valid = true;
  return e;
}

HttpCleaner::HttpCleaner(std::string tag, Endpoint endpoint, RetryPolicy policy)
    : tag_(std::move(tag)), client_(std::move(endpoint), policy) {
  if (tag_.empty()) throw ConfigError("http cleaner needs a tag");
}

std::vector<DiagnosticCluster> HttpCleaner::clean(const RawArticle& article, CleaningStrategy strategy) const {
  nlohmann::json req = {{"article_text", article.text}, {"label", article.label}, {"strategy", to_string(strategy)}};
  return parse_cleaner_response(client_.post(req));
}

HttpEmbedder::HttpEmbedder(std::string model, int dim, Endpoint endpoint, RetryPolicy policy)
    : model_(std::move(model)), dim_(dim), client_(std::move(endpoint), policy) {
  if (dim_ <= 0) throw ConfigError("http embedder needs a positive dim");
}

std::string HttpEmbedder::fingerprint() const {
  return "http/" + client_.endpoint().url + "/model=" + model_ + "/dim=" + std::to_string(dim_);
}

Embedding HttpEmbedder::embed(std::string_view text) const {
  if (embedding_tokens(text).empty()) return {};
  nlohmann::json req = {{"text", std::string(text)}, {"model", model_}};
  return parse_embedding_response(client_.post(req), dim_);
}

}  // namespace reasoneval
