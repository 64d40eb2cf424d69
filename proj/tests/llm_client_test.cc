// Copyright 2026 The Reflect Authors
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

#include "reflect/llm_client.h"

#include <gtest/gtest.h>
#include <httplib.h>

#include <nlohmann/json.hpp>
#include <thread>

#include "reflect/providers.h"
#include "reflect/text.h"
#include "test_support.h"

namespace reflect {
namespace {

using std::chrono::milliseconds;

ClientOptions NoSleep(int max_attempts = 4) {
  ClientOptions o;
  o.retry.max_attempts = max_attempts;
  o.sleep = [](milliseconds) {};
  return o;
}

ChatRequest Request(const std::string& id, const std::string& user = "hi") {
  return {"", user, {"baseline", "1", id}};
}

ModelSpec Spec() { return ModelSpec{}; }

TEST(MockProviderTest, PromptHashLookup) {
  auto mock = std::make_shared<MockProvider>();
  mock->AddForPrompt("translate me", {"X", "", {}, 0});
  LlmClient client(mock, NoSleep());
  const auto r = client.Complete(Spec(), Request("a:0", "translate me"));
  EXPECT_EQ(r.text, "X");
  EXPECT_EQ(r.attempt_count, 1);
  EXPECT_EQ(r.model_name, "mock");
}

TEST(MockProviderTest, KeyLookupIsDeterministic) {
  auto mock = std::make_shared<MockProvider>();
  mock->Add({"baseline", "1", "opus:0"}, {"canned", "m", {}, 0});
  LlmClient client(mock, NoSleep());
  for (int i = 0; i < 3; ++i) {
    const auto r = client.Complete(Spec(), Request("opus:0"));
    EXPECT_EQ(r.text, "canned");
    EXPECT_EQ(r.model_name, "m");
  }
}

TEST(MockProviderTest, StrictAndDefault) {
  auto strict = std::make_shared<MockProvider>(true);
  LlmClient a(strict, NoSleep());
  EXPECT_THROW(a.Complete(Spec(), Request("x:9")), FixtureMissingKey);

  auto lenient = std::make_shared<MockProvider>(false, "fallback");
  LlmClient b(lenient, NoSleep());
  EXPECT_EQ(b.Complete(Spec(), Request("x:9")).text, "fallback");
}

TEST(LlmClientTest, RetriesTwoRateLimitsThenSucceeds) {
  auto mock = std::make_shared<MockProvider>();
  mock->Add({"baseline", "1", "a:0"}, {"ok", "", {429, 429}, 0});
  std::vector<milliseconds> slept;
  ClientOptions o = NoSleep();
  o.sleep = [&](milliseconds d) { slept.push_back(d); };
  LlmClient client(mock, o);
  const auto r = client.Complete(Spec(), Request("a:0"));
  EXPECT_EQ(r.text, "ok");
  EXPECT_EQ(r.attempt_count, 3);
  EXPECT_EQ(mock->calls(), 3);
  EXPECT_EQ(slept.size(), 2u);
}

TEST(LlmClientTest, AuthFailureIsNotRetried) {
  auto mock = std::make_shared<MockProvider>();
  mock->Add({"baseline", "1", "a:0"}, {"", "", {}, 401});
  LlmClient client(mock, NoSleep());
  try {
    client.Complete(Spec(), Request("a:0"));
    FAIL();
  } catch (const AuthError& e) {
    EXPECT_EQ(e.attempts(), 1);
  }
  EXPECT_EQ(mock->calls(), 1);
}

TEST(LlmClientTest, ClientErrorsAreNotRetried) {
  auto mock = std::make_shared<MockProvider>();
  mock->Add({"baseline", "1", "a:0"}, {"", "", {}, 400});
  LlmClient client(mock, NoSleep());
  try {
    client.Complete(Spec(), Request("a:0"));
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.status(), 400);
    EXPECT_EQ(e.attempts(), 1);
  }
}

TEST(LlmClientTest, AttemptsAreCapped) {
  for (int max_attempts : {1, 2, 4, 6}) {
    for (int status : {429, 500, 503}) {
      auto mock = std::make_shared<MockProvider>();
      mock->Add({"baseline", "1", "a:0"}, {"", "", {}, status});
      LlmClient client(mock, NoSleep(max_attempts));
      try {
        client.Complete(Spec(), Request("a:0"));
        FAIL();
      } catch (const LlmError& e) {
        EXPECT_EQ(e.attempts(), max_attempts);
        if (status == 429) {
          EXPECT_NE(dynamic_cast<const RateLimitExhausted*>(&e), nullptr);
        } else {
          EXPECT_NE(dynamic_cast<const ProviderError*>(&e), nullptr);
        }
      }
      EXPECT_EQ(mock->calls(), max_attempts);
    }
  }
}

TEST(BackoffTest, NonDecreasingAndBounded) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    RetryPolicy policy{12, milliseconds(100), milliseconds(5000)};
    BackoffSchedule b(policy, seed);
    milliseconds prev{0};
    for (int i = 1; i <= 11; ++i) {
      const milliseconds d = b.Next();
      EXPECT_GE(d, prev);
      EXPECT_LE(d, policy.max_delay);
      // Equal jitter keeps at least half of the exponential cap.
      const double cap = std::min(5000.0, 100.0 * std::pow(2.0, i - 1));
      EXPECT_GE(static_cast<double>(d.count()), std::floor(cap / 2.0));
      prev = d;
    }
  }
}

TEST(BackoffTest, SeededScheduleRepeats) {
  RetryPolicy policy;
  BackoffSchedule a(policy, 99);
  BackoffSchedule b(policy, 99);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(a.Next(), b.Next());
}

TEST(RateLimiterTest, DisabledAndBurst) {
  RateLimiter off(0.0, 1);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(off.Reserve().count(), 0);

  RateLimiter limited(10.0, 2);
  EXPECT_EQ(limited.Reserve().count(), 0);
  EXPECT_EQ(limited.Reserve().count(), 0);
  const auto wait = limited.Reserve();
  EXPECT_GT(wait.count(), 0);
  EXPECT_LE(wait.count(), 100);
}

TEST(LlmClientTest, InFlightCapHolds) {
  for (int cap : {1, 2, 3}) {
    auto mock = std::make_shared<MockProvider>(false, "ok");
    mock->set_latency(milliseconds(15));
    ClientOptions o = NoSleep();
    o.max_in_flight = cap;
    LlmClient client(mock, o);
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&, t] {
        for (int k = 0; k < 3; ++k) {
          client.Complete(Spec(), Request("p:" + std::to_string(t * 10 + k)));
        }
      });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(mock->calls(), 24);
    EXPECT_LE(mock->high_water(), cap);
    EXPECT_LE(client.in_flight_high_water(), cap);
    EXPECT_EQ(client.in_flight_high_water(), cap);
  }
}

TEST(LlmClientTest, RejectsBadOptions) {
  auto mock = std::make_shared<MockProvider>();
  ClientOptions o = NoSleep();
  o.max_in_flight = 0;
  EXPECT_THROW(LlmClient(mock, o), ConfigError);
  EXPECT_THROW(LlmClient(mock, NoSleep(0)), ConfigError);
}

TEST(ModelSpecTest, Validate) {
  ModelSpec s;
  EXPECT_NO_THROW(s.Validate());
  s.temperature = 1.5;
  EXPECT_THROW(s.Validate(), ConfigError);
  s.temperature = 0.2;
  s.max_output_tokens = 0;
  try {
    s.Validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "max_output_tokens");
  }
}

TEST(RequestKeyTest, ToString) {
  EXPECT_EQ((RequestKey{"baseline", "1", "opus:0"}).ToString(), "baseline|1|opus:0");
  const PromptBundle b{"", "u", 2, Strategy::kFewShot};
  const auto req = MakeChatRequest(b, "x:1");
  EXPECT_EQ(req.key.ToString(), "few_shot|2|x:1");
}

TEST(FixtureTest, LoadsHeaderAndRecords) {
  testing::TempDir dir;
  const auto path = dir.Write(
      "f.jsonl",
      "{\"fixture\":{\"strict\":false,\"default\":\"D\"}}\n"
      "{\"key\":{\"strategy\":\"baseline\",\"pass\":\"1\",\"id\":\"c:0\"},"
      "\"response\":\"R0\",\"model_name\":\"m1\",\"fail\":[503]}\n"
      "{\"prompt_hash\":\"" + MockProvider::PromptHash("hello") +
          "\",\"response\":\"RH\"}\n");
  auto mock = MockProvider::FromFixture(path);
  LlmClient client(mock, NoSleep());
  const auto r0 = client.Complete(Spec(), Request("c:0"));
  EXPECT_EQ(r0.text, "R0");
  EXPECT_EQ(r0.model_name, "m1");
  EXPECT_EQ(r0.attempt_count, 2);
  EXPECT_EQ(client.Complete(Spec(), Request("c:5", "hello")).text, "RH");
  EXPECT_EQ(client.Complete(Spec(), Request("c:6", "other")).text, "D");
}

TEST(FixtureTest, StrictByDefault) {
  testing::TempDir dir;
  const auto path = dir.Write("f.jsonl", "");
  auto mock = MockProvider::FromFixture(path);
  LlmClient client(mock, NoSleep());
  EXPECT_THROW(client.Complete(Spec(), Request("c:0")), FixtureMissingKey);
  EXPECT_THROW(MockProvider::FromFixture(dir / "missing.jsonl"), Error);
}

TEST(CassetteTest, RecordsAndReplays) {
  testing::TempDir dir;
  auto live = std::make_shared<MockProvider>();
  live->Add({"baseline", "1", "c:0"}, {"first\nline", "live-model", {429}, 0});
  live->Add({"baseline", "2", "c:0"}, {"second", "live-model", {}, 0});
  {
    auto recorder = std::make_shared<RecordingProvider>(live, dir / "cassette.jsonl");
    LlmClient client(recorder, NoSleep());
    client.Complete(Spec(), Request("c:0"));
    client.Complete(Spec(), {"", "x", {"baseline", "2", "c:0"}});
  }
  // The failed 429 attempt is not recorded.
  const std::string cassette = testing::Slurp(dir / "cassette.jsonl");
  EXPECT_EQ(std::count(cassette.begin(), cassette.end(), '\n'), 2);
  for (const auto& line : text::Split(cassette, '\n')) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("timestamp"));
    EXPECT_EQ(j["model_name"], "live-model");
  }

  auto replay = MockProvider::FromFixture(dir / "cassette.jsonl");
  LlmClient client(replay, NoSleep());
  const auto r = client.Complete(Spec(), Request("c:0"));
  EXPECT_EQ(r.text, "first\nline");
  EXPECT_EQ(r.model_name, "live-model");
  EXPECT_EQ(r.attempt_count, 1);
}

// Minimal stand-in for both chat dialects on a loopback port.
class FakeChatServer {
 public:
  FakeChatServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      Capture(req);
      if (status_ != 200) {
        res.status = status_;
        res.set_content("{\"error\":\"nope\"}", "application/json");
        return;
      }
      res.set_content(
          "{\"model\":\"gpt-x\",\"choices\":[{\"message\":{\"role\":\"assistant\","
          "\"content\":\"hello from openai\"}}],"
          "\"usage\":{\"prompt_tokens\":7,\"completion_tokens\":3}}",
          "application/json");
    });
    server_.Post("/proxy/v1/messages", [this](const httplib::Request& req, httplib::Response& res) {
      Capture(req);
      if (status_ != 200) {
        res.status = status_;
        return;
      }
      res.set_content(
          "{\"model\":\"claude-x\",\"content\":[{\"type\":\"text\",\"text\":"
          "\"hello \"},{\"type\":\"text\",\"text\":\"from anthropic\"}],"
          "\"usage\":{\"input_tokens\":5,\"output_tokens\":2}}",
          "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeChatServer() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& prefix = "") const {
    return "http://127.0.0.1:" + std::to_string(port_) + prefix;
  }
  void set_status(int s) { status_ = s; }
  nlohmann::json last_body() {
    std::lock_guard lock(mu_);
    return last_body_;
  }
  httplib::Headers last_headers() {
    std::lock_guard lock(mu_);
    return last_headers_;
  }
  int hits() const { return hits_.load(); }

 private:
  void Capture(const httplib::Request& req) {
    std::lock_guard lock(mu_);
    last_body_ = nlohmann::json::parse(req.body);
    last_headers_ = req.headers;
    ++hits_;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> status_{200};
  std::atomic<int> hits_{0};
  std::mutex mu_;
  nlohmann::json last_body_;
  httplib::Headers last_headers_;
};

TEST(HttpProviderTest, OpenAiDialect) {
  FakeChatServer server;
  ModelSpec spec;
  spec.provider = Provider::kOpenAiCompatible;
  spec.model_name = "gpt-x";
  spec.max_output_tokens = 64;
  spec.base_url = server.url();
  LlmClient client(std::make_shared<OpenAiProvider>("sk-test"), NoSleep());
  const auto r = client.Complete(spec, {"be brief", "translate", {"baseline", "1", "a:0"}});
  EXPECT_EQ(r.text, "hello from openai");
  EXPECT_EQ(r.model_name, "gpt-x");
  ASSERT_TRUE(r.token_usage);
  EXPECT_EQ(r.token_usage->prompt_tokens, 7);

  const auto body = server.last_body();
  EXPECT_EQ(body["model"], "gpt-x");
  EXPECT_EQ(body["max_tokens"], 64);
  EXPECT_EQ(body["temperature"], 0.0);
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][0]["content"], "be brief");
  EXPECT_EQ(body["messages"][1]["role"], "user");
  EXPECT_EQ(body["messages"][1]["content"], "translate");
  const auto headers = server.last_headers();
  ASSERT_EQ(headers.count("Authorization"), 1u);
  EXPECT_EQ(headers.find("Authorization")->second, "Bearer sk-test");
}

TEST(HttpProviderTest, AnthropicDialectWithPathPrefix) {
  FakeChatServer server;
  ModelSpec spec;
  spec.provider = Provider::kAnthropicCompatible;
  spec.model_name = "claude-x";
  spec.base_url = server.url("/proxy/");
  LlmClient client(std::make_shared<AnthropicProvider>("ak-test"), NoSleep());
  const auto r = client.Complete(spec, {"", "translate", {"baseline", "1", "a:0"}});
  EXPECT_EQ(r.text, "hello from anthropic");
  EXPECT_EQ(r.model_name, "claude-x");

  const auto body = server.last_body();
  EXPECT_FALSE(body.contains("system"));
  EXPECT_EQ(body["max_tokens"], 1024);
  ASSERT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["content"], "translate");
  const auto headers = server.last_headers();
  EXPECT_EQ(headers.find("x-api-key")->second, "ak-test");
  EXPECT_EQ(headers.find("anthropic-version")->second, "2023-06-01");
}

TEST(HttpProviderTest, StatusMapping) {
  FakeChatServer server;
  ModelSpec spec;
  spec.provider = Provider::kOpenAiCompatible;
  spec.base_url = server.url();
  LlmClient client(std::make_shared<OpenAiProvider>("k"), NoSleep(3));

  server.set_status(401);
  EXPECT_THROW(client.Complete(spec, Request("a:0")), AuthError);
  EXPECT_EQ(server.hits(), 1);

  server.set_status(503);
  EXPECT_THROW(client.Complete(spec, Request("a:0")), ProviderError);
  EXPECT_EQ(server.hits(), 4);

  server.set_status(429);
  EXPECT_THROW(client.Complete(spec, Request("a:0")), RateLimitExhausted);
  EXPECT_EQ(server.hits(), 7);
}

TEST(HttpProviderTest, UnreachableEndpointIsRetriedThenFails) {
  ModelSpec spec;
  spec.provider = Provider::kOpenAiCompatible;
  spec.base_url = "http://127.0.0.1:1";
  spec.request_timeout = std::chrono::seconds(2);
  LlmClient client(std::make_shared<OpenAiProvider>("k"), NoSleep(2));
  try {
    client.Complete(spec, Request("a:0"));
    FAIL();
  } catch (const LlmError& e) {
    EXPECT_EQ(e.attempts(), 2);
  }
}

TEST(HttpProviderTest, ResponseBodyParsing) {
  EXPECT_THROW(OpenAiProvider::ParseResponseBody("{}"), ProviderError);
  EXPECT_THROW(OpenAiProvider::ParseResponseBody("not json"), ProviderError);
  EXPECT_THROW(AnthropicProvider::ParseResponseBody("{\"content\":[]}"),
               ProviderError);
  EXPECT_EQ(OpenAiProvider::ParseResponseBody(
                "{\"choices\":[{\"message\":{\"content\":\" x \"}}]}")
                .text,
            " x ");
}

TEST(HttpProviderTest, MissingKeysAreAuthErrors) {
  EXPECT_THROW(OpenAiProvider(""), AuthError);
  EXPECT_THROW(AnthropicProvider(""), AuthError);
}

}  // namespace
}  // namespace reflect
