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

#ifndef REFLECT_LLM_CLIENT_H_
#define REFLECT_LLM_CLIENT_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "reflect/error.h"
#include "reflect/prompts.h"

namespace reflect {

enum class Provider { kOpenAiCompatible, kAnthropicCompatible, kMock };

// "openai-compatible", "anthropic-compatible", "mock".
std::string ProviderName(Provider provider);
Provider ParseProvider(const std::string& name);

struct ModelSpec {
  Provider provider = Provider::kMock;
  std::string model_name = "mock";
  double temperature = 0.0;
  int max_output_tokens = 1024;
  std::chrono::seconds request_timeout{60};
  // Scheme, host and optional path prefix of the endpoint. Empty selects the
  // public endpoint of the provider family.
  std::string base_url;

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

// Identifies one model call within a run: strategy, pass ("1", "reflection",
// "2") and sentence id. Fixtures and cassettes are keyed on it.
struct RequestKey {
  std::string strategy;
  std::string pass;
  std::string pair_id;

  std::string ToString() const;  // "baseline|1|opus:0"
  friend auto operator<=>(const RequestKey&, const RequestKey&) = default;
};

struct ChatRequest {
  std::string system_text;
  std::string user_text;
  RequestKey key;
};

ChatRequest MakeChatRequest(const PromptBundle& bundle, std::string pair_id);

struct CompletionResult {
  std::string text;  // verbatim, untrimmed
  std::string model_name;
  std::chrono::milliseconds latency{0};
  int attempt_count = 1;
  std::optional<TokenUsage> token_usage;
};

// Outcome of a single transport attempt. `status` is the HTTP status, or 0
// when no response arrived (see `timed_out`).
struct ProviderReply {
  int status = 200;
  std::string text;
  std::string body;  // raw body on failure, for diagnostics
  std::string model_name;
  std::optional<TokenUsage> token_usage;
  bool timed_out = false;
};

// Errors raised by LlmClient::Complete. `attempts()` is the number of
// outbound requests made for the call.
class LlmError : public Error {
 public:
  LlmError(const std::string& message, int attempts)
      : Error(message), attempts_(attempts) {}
  int attempts() const { return attempts_; }
  void set_attempts(int attempts) { attempts_ = attempts; }

 private:
  int attempts_;
};

class AuthError : public LlmError {
 public:
  using LlmError::LlmError;
};

class RateLimitExhausted : public LlmError {
 public:
  using LlmError::LlmError;
};

class Timeout : public LlmError {
 public:
  using LlmError::LlmError;
};

class ProviderError : public LlmError {
 public:
  ProviderError(int status, std::string body_excerpt, int attempts)
      : LlmError("provider returned status " + std::to_string(status) + ": " +
                     body_excerpt,
                 attempts),
        status_(status),
        body_excerpt_(std::move(body_excerpt)) {}

  int status() const { return status_; }
  const std::string& body_excerpt() const { return body_excerpt_; }

 private:
  int status_;
  std::string body_excerpt_;
};

// One wire dialect (or a mock). Implementations must be safe to call from
// several threads at once. Failures are reported through ProviderReply;
// throwing is reserved for non-retryable conditions (e.g. an unparseable
// success body).
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ProviderReply Send(const ModelSpec& spec,
                             const ChatRequest& request) = 0;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_delay{500};
  std::chrono::milliseconds max_delay{30000};
};

// Exponential backoff with "equal jitter": the k-th delay is drawn from
// [cap_k / 2, cap_k] with cap_k = min(max_delay, initial * 2^(k-1)), then
// clamped so that it never falls below the previous delay.
class BackoffSchedule {
 public:
  BackoffSchedule(const RetryPolicy& policy, uint64_t seed);
  std::chrono::milliseconds Next();

 private:
  RetryPolicy policy_;
  uint64_t state_;
  int retries_ = 0;
  std::chrono::milliseconds previous_{0};
};

// Token bucket limiting the rate at which requests start.
class RateLimiter {
 public:
  // `requests_per_second` <= 0 disables limiting.
  RateLimiter(double requests_per_second, int burst);
  // Returns how long the caller must wait before sending.
  std::chrono::milliseconds Reserve();

 private:
  using Clock = std::chrono::steady_clock;
  double rate_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mu_;
};

struct ClientOptions {
  RetryPolicy retry;
  int max_in_flight = 4;
  double requests_per_second = 0.0;
  int burst = 1;
  uint64_t seed = 0;
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to a real sleep
};

// Shared chat-completion client: retries transient failures (429, 5xx,
// timeouts) with backoff, caps concurrent requests and paces request starts.
class LlmClient {
 public:
  LlmClient(std::shared_ptr<ChatProvider> provider, ClientOptions options);

  CompletionResult Complete(const ModelSpec& spec, const ChatRequest& request);

  int in_flight_high_water() const;

 private:
  void AcquireSlot();
  void ReleaseSlot();

  std::shared_ptr<ChatProvider> provider_;
  ClientOptions options_;
  RateLimiter limiter_;
  mutable std::mutex mu_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
  int high_water_ = 0;
  uint64_t call_counter_ = 0;
};

}  // namespace reflect

#endif  // REFLECT_LLM_CLIENT_H_
