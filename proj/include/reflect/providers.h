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

#ifndef REFLECT_PROVIDERS_H_
#define REFLECT_PROVIDERS_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "reflect/llm_client.h"

namespace reflect {

class FixtureMissingKey : public Error {
 public:
  explicit FixtureMissingKey(const std::string& key)
      : Error("no fixture response for " + key) {}
};

// Deterministic offline provider. Responses are looked up by RequestKey,
// then by the FNV-1a hash of the user text. A response may be scripted to
// fail with given statuses on its first calls.
class MockProvider : public ChatProvider {
 public:
  struct Response {
    std::string text;
    std::string model_name;
    // Statuses returned, in order, before `text` is served.
    std::vector<int> failures;
    // When non-zero, every call fails with this status.
    int status = 0;
  };

  // Unknown keys raise FixtureMissingKey when `strict`; otherwise they get
  // `default_response`.
  explicit MockProvider(bool strict = true,
                        std::optional<std::string> default_response = {});

  // Fixture file: line-delimited JSON. An optional first line
  // {"fixture": {"strict": bool, "default": string}} sets the policy
  // (strict, no default, when absent). Every other line holds either
  // "key": {"strategy", "pass", "id"} or "prompt_hash", plus "response"
  // and optionally "model_name", "fail" (list of statuses) and "status".
  // Cassette files written by RecordingProvider load unchanged.
  static std::shared_ptr<MockProvider> FromFixture(
      const std::filesystem::path& path);

  void Add(const RequestKey& key, Response response);
  void AddForPrompt(std::string_view user_text, Response response);

  ProviderReply Send(const ModelSpec& spec, const ChatRequest& request) override;

  // Simulated per-call latency, used to exercise concurrency limits.
  void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }

  int calls() const { return calls_.load(); }
  int high_water() const { return high_water_.load(); }

  static std::string PromptHash(std::string_view user_text);

 private:
  const Response* Find(const ChatRequest& request) const;

  bool strict_;
  std::optional<std::string> default_response_;
  std::map<std::string, Response> by_key_;
  std::map<std::string, Response> by_prompt_;
  std::map<std::string, int> seen_;  // call count per lookup key
  std::mutex mu_;
  std::chrono::milliseconds latency_{0};
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> high_water_{0};
};

// Wraps a provider and appends every successful exchange to a cassette file
// (one JSON record per line: key, response, model_name, timestamp).
class RecordingProvider : public ChatProvider {
 public:
  RecordingProvider(std::shared_ptr<ChatProvider> inner,
                    const std::filesystem::path& cassette);

  ProviderReply Send(const ModelSpec& spec, const ChatRequest& request) override;

 private:
  std::shared_ptr<ChatProvider> inner_;
  std::ofstream out_;
  std::mutex mu_;
};

// Chat-completions dialect ("/v1/chat/completions", bearer token from
// OPENAI_API_KEY).
class OpenAiProvider : public ChatProvider {
 public:
  // Throws AuthError when `api_key` is empty.
  explicit OpenAiProvider(std::string api_key);
  static std::unique_ptr<OpenAiProvider> FromEnvironment();

  ProviderReply Send(const ModelSpec& spec, const ChatRequest& request) override;

  static std::string BuildRequestBody(const ModelSpec& spec,
                                      const ChatRequest& request);
  static ProviderReply ParseResponseBody(const std::string& body);

 private:
  std::string api_key_;
};

// Messages dialect ("/v1/messages", x-api-key from ANTHROPIC_API_KEY).
class AnthropicProvider : public ChatProvider {
 public:
  explicit AnthropicProvider(std::string api_key);
  static std::unique_ptr<AnthropicProvider> FromEnvironment();

  ProviderReply Send(const ModelSpec& spec, const ChatRequest& request) override;

  static std::string BuildRequestBody(const ModelSpec& spec,
                                      const ChatRequest& request);
  static ProviderReply ParseResponseBody(const std::string& body);

 private:
  std::string api_key_;
};

}  // namespace reflect

#endif  // REFLECT_PROVIDERS_H_
