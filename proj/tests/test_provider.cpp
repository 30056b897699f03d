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

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "reasoneval/error.hpp"
#include "reasoneval/provider.hpp"
#include "support/mock_server.hpp"

namespace reasoneval {
namespace {

using nlohmann::json;
using testing::MockServer;

RetryPolicy fast_policy() {
  RetryPolicy p;
  p.timeout_ms = 2000;
  p.retries = 3;
  p.backoff_initial_ms = 20;
  p.backoff_factor = 2.0;
  p.backoff_max_ms = 200;
  return p;
}

const char* kCleanerReply = R"({"diagnostic_clusters": [
  {"concept_label": "Atrial fibrillation: ECG criteria",
   "criteria": ["Irregularly irregular rhythm", "No P waves"]},
  {"concept_label": "Rapid ventricular response", "criteria": ["Heart rate above 100 bpm"]}]})";

ProviderErrorKind kind_of(const std::function<void()>& f, int* attempts = nullptr) {
  try {
    f();
  } catch (const ProviderError& e) {
    if (attempts) *attempts = e.attempts();
    return e.kind();
  }
  ADD_FAILURE() << "no ProviderError thrown";
  return ProviderErrorKind::kHttp;
}

TEST(ProviderClient, HappyPathParsesCleanerSchema) {
  json seen;
  std::string auth;
  MockServer srv([&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(kCleanerReply, "application/json");
  });
  setenv("REASONEVAL_TEST_KEY", "secret-token", 1);
  Endpoint ep{srv.url("/clean"), "REASONEVAL_TEST_KEY"};
  HttpCleaner cleaner("mock", ep, fast_policy());
  RawArticle art{"atrial fibrillation", Source::kLitfl, "litfl/af.md",
                 "# AF\n\n## ECG criteria\n\n- Irregularly irregular rhythm\n- No P waves\n"};
  const auto clusters = cleaner.clean(art, CleaningStrategy::kStructuredSynthesis);
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0].concept_label, "Atrial fibrillation: ECG criteria");
  EXPECT_EQ(clusters[0].criteria, (std::vector<std::string>{"Irregularly irregular rhythm", "No P waves"}));
  EXPECT_EQ(seen.at("article_text"), art.text);
  EXPECT_EQ(seen.at("label"), "atrial fibrillation");
  EXPECT_EQ(seen.at("strategy"), "structured_synthesis");
  EXPECT_EQ(auth, "Bearer secret-token");

  const auto run = clean_corpus({art}, {&cleaner}, {CleaningStrategy::kStructuredSynthesis});
  ASSERT_EQ(run.entries.size(), 2u);
  EXPECT_EQ(run.entries[0].cleaner_tag, "mock");
  EXPECT_EQ(run.entries[1].criteria, std::vector<std::string>{"Heart rate above 100 bpm"});
  // Exact-quote entries keep only criteria found verbatim in the article.
  const auto quoted = clean_corpus({art}, {&cleaner}, {CleaningStrategy::kExactQuote});
  ASSERT_EQ(quoted.entries.size(), 1u);
  EXPECT_EQ(quoted.entries[0].criteria.size(), 2u);
}

TEST(ProviderClient, RetriesOn429ThenSucceeds) {
  std::atomic<int> calls{0};
  MockServer srv([&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 429;
      return;
    }
    res.set_content(R"({"ok": true})", "application/json");
  });
  ProviderClient client({srv.url("/x")}, fast_policy());
  CallLog log;
  const auto t0 = std::chrono::steady_clock::now();
  const json out = client.post({{"q", 1}}, &log);
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(out.at("ok"), true);
  EXPECT_EQ(log.attempts, 3);
  EXPECT_EQ(log.statuses, (std::vector<int>{429, 429, 200}));
  EXPECT_GE(ms, 20.0 + 40.0);  // two exponential backoff waits
}

TEST(ProviderClient, ExhaustedRetriesAreTyped) {
  MockServer srv([](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  ProviderClient client({srv.url("/x")}, fast_policy());
  int attempts = 0;
  EXPECT_EQ(kind_of([&] { client.post(json::object()); }, &attempts), ProviderErrorKind::kRetriesExhausted);
  EXPECT_EQ(attempts, 4);
}

TEST(ProviderClient, ClientErrorsAreNotRetried) {
  std::atomic<int> calls{0};
  MockServer srv([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 401;
  });
  ProviderClient client({srv.url("/x")}, fast_policy());
  EXPECT_EQ(kind_of([&] { client.post(json::object()); }), ProviderErrorKind::kHttp);
  EXPECT_EQ(calls.load(), 1);
}

TEST(ProviderClient, TimeoutIsTyped) {
  MockServer srv([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(700));
    res.set_content("{}", "application/json");
  });
  RetryPolicy p = fast_policy();
  p.timeout_ms = 150;
  p.retries = 1;
  ProviderClient client({srv.url("/slow")}, p);
  int attempts = 0;
  EXPECT_EQ(kind_of([&] { client.post(json::object()); }, &attempts), ProviderErrorKind::kTimeout);
  EXPECT_EQ(attempts, 2);
}

TEST(ProviderClient, ConnectionRefusedExhaustsRetries) {
  int port;
  {
    MockServer srv([](const httplib::Request&, httplib::Response&) {});
    port = srv.port();
  }
  RetryPolicy p = fast_policy();
  p.retries = 1;
  ProviderClient client({"http://127.0.0.1:" + std::to_string(port) + "/x"}, p);
  EXPECT_EQ(kind_of([&] { client.post(json::object()); }), ProviderErrorKind::kRetriesExhausted);
}

TEST(ProviderClient, SchemaViolationsAreTypedAndSkipTheArticle) {
  std::string reply;
  MockServer srv([&](const httplib::Request&, httplib::Response& res) { res.set_content(reply, "application/json"); });
  HttpCleaner cleaner("mock", {srv.url("/clean")}, fast_policy());
  const RawArticle art{"atrial fibrillation", Source::kLitfl, "litfl/af.md", "- No P waves\n"};
  for (const char* bad : {"{not json", R"({"clusters": []})", R"({"diagnostic_clusters": {}})",
                          R"({"diagnostic_clusters": [{"criteria": ["x"]}]})",
                          R"({"diagnostic_clusters": [{"concept_label": "c", "criteria": [1]}]})"}) {
    reply = bad;
    int attempts = 0;
    EXPECT_EQ(kind_of([&] { cleaner.clean(art, CleaningStrategy::kExactQuote); }, &attempts),
              ProviderErrorKind::kSchema)
        << bad;
    const auto run = clean_corpus({art}, {&cleaner}, {CleaningStrategy::kExactQuote});
    EXPECT_TRUE(run.entries.empty());
    ASSERT_EQ(run.failures.size(), 1u);
    EXPECT_EQ(run.failures[0].cleaner_tag, "mock");
  }
}

TEST(ProviderClient, EmbedderContract) {
  json reply = {{"embedding", {3.0, 0.0, 4.0}}};
  MockServer srv([&](const httplib::Request& req, httplib::Response& res) {
    EXPECT_EQ(json::parse(req.body).at("model"), "tiny");
    res.set_content(reply.dump(), "application/json");
  });
  HttpEmbedder emb("tiny", 3, {srv.url("/embed")}, fast_policy());
  const Embedding e = emb.embed("some text");
  ASSERT_TRUE(e.valid);
  EXPECT_FLOAT_EQ(e.values[0], 0.6f);
  EXPECT_FLOAT_EQ(e.values[2], 0.8f);
  EXPECT_FALSE(emb.embed("  ").valid);
  EXPECT_NE(emb.fingerprint().find("model=tiny"), std::string::npos);
  reply = {{"embedding", {1.0, 2.0}}};
  EXPECT_EQ(kind_of([&] { emb.embed("x"); }), ProviderErrorKind::kSchema);
  reply = {{"embedding", {0.0, 0.0, 0.0}}};
  EXPECT_FALSE(emb.embed("x").valid);
}

TEST(TokenBucket, LimitsRate) {
  TokenBucket b(20.0, 1.0);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 6; ++i) b.acquire();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(s, 0.24);  // 5 waits of 50 ms after the initial token
  TokenBucket unlimited(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) unlimited.acquire();
}

TEST(ProviderClient, BadConfiguration) {
  EXPECT_THROW(ProviderClient({"no-scheme"}, fast_policy()), ConfigError);
  RetryPolicy p = fast_policy();
  p.timeout_ms = 0;
  EXPECT_THROW(ProviderClient({"http://127.0.0.1:1/x"}, p), ConfigError);
}

}  // namespace
}  // namespace reasoneval
