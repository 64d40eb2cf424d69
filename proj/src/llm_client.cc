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

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace reflect {
namespace {

constexpr std::size_t kExcerptBytes = 200;

std::string Excerpt(const std::string& body) {
  return body.size() <= kExcerptBytes ? body : body.substr(0, kExcerptBytes);
}

bool Retryable(const ProviderReply& reply) {
  return reply.status == 0 || reply.status == 429 || reply.status >= 500;
}

}  // namespace

std::string ProviderName(Provider provider) {
  switch (provider) {
    case Provider::kOpenAiCompatible:
      return "openai-compatible";
    case Provider::kAnthropicCompatible:
      return "anthropic-compatible";
    case Provider::kMock:
      return "mock";
  }
  return "mock";
}

Provider ParseProvider(const std::string& name) {
  if (name == "openai-compatible") return Provider::kOpenAiCompatible;
  if (name == "anthropic-compatible") return Provider::kAnthropicCompatible;
  if (name == "mock") return Provider::kMock;
  throw ConfigError("provider", "unknown provider \"" + name + "\"");
}

void ModelSpec::Validate() const {
  if (!(temperature >= 0.0 && temperature <= 1.0)) {
    throw ConfigError("temperature", "must be within [0, 1]");
  }
  if (max_output_tokens < 1) {
    throw ConfigError("max_output_tokens", "must be at least 1");
  }
  if (request_timeout.count() <= 0) {
    throw ConfigError("request_timeout", "must be positive");
  }
  if (model_name.empty()) throw ConfigError("model", "must not be empty");
}

std::string RequestKey::ToString() const {
  return strategy + "|" + pass + "|" + pair_id;
}

ChatRequest MakeChatRequest(const PromptBundle& bundle, std::string pair_id) {
  return {bundle.system_text, bundle.user_text,
          {StrategyName(bundle.strategy), std::to_string(bundle.pass_number),
           std::move(pair_id)}};
}

BackoffSchedule::BackoffSchedule(const RetryPolicy& policy, uint64_t seed)
    : policy_(policy), state_(seed) {}

std::chrono::milliseconds BackoffSchedule::Next() {
  ++retries_;
  const double initial = static_cast<double>(policy_.initial_delay.count());
  const double ceiling = static_cast<double>(policy_.max_delay.count());
  const double cap =
      std::min(ceiling, initial * std::pow(2.0, retries_ - 1));
  std::mt19937_64 engine(state_ + static_cast<uint64_t>(retries_));
  const double unit =
      static_cast<double>(engine() >> 11) * 0x1.0p-53;  // [0, 1)
  auto delay = std::chrono::milliseconds(
      static_cast<int64_t>(cap / 2.0 + unit * cap / 2.0));
  delay = std::max(delay, previous_);
  previous_ = delay;
  return delay;
}

RateLimiter::RateLimiter(double requests_per_second, int burst)
    : rate_(requests_per_second),
      capacity_(std::max(1, burst)),
      tokens_(capacity_),
      last_(Clock::now()) {}

std::chrono::milliseconds RateLimiter::Reserve() {
  if (rate_ <= 0.0) return std::chrono::milliseconds(0);
  std::lock_guard lock(mu_);
  const auto now = Clock::now();
  const double elapsed = std::chrono::duration<double>(now - last_).count();
  last_ = now;
  tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
  tokens_ -= 1.0;
  if (tokens_ >= 0.0) return std::chrono::milliseconds(0);
  // The deficit is repaid by waiting; later callers queue behind it.
  return std::chrono::milliseconds(
      static_cast<int64_t>(std::ceil(-tokens_ / rate_ * 1000.0)));
}

LlmClient::LlmClient(std::shared_ptr<ChatProvider> provider,
                     ClientOptions options)
    : provider_(std::move(provider)),
      options_(std::move(options)),
      limiter_(options_.requests_per_second, options_.burst) {
  if (options_.max_in_flight < 1) {
    throw ConfigError("max_parallel", "must be at least 1");
  }
  if (options_.retry.max_attempts < 1) {
    throw ConfigError("max_attempts", "must be at least 1");
  }
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) {
      std::this_thread::sleep_for(d);
    };
  }
}

void LlmClient::AcquireSlot() {
  std::unique_lock lock(mu_);
  slot_free_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
  ++in_flight_;
  high_water_ = std::max(high_water_, in_flight_);
}

void LlmClient::ReleaseSlot() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  slot_free_.notify_one();
}

int LlmClient::in_flight_high_water() const {
  std::lock_guard lock(mu_);
  return high_water_;
}

CompletionResult LlmClient::Complete(const ModelSpec& spec,
                                     const ChatRequest& request) {
  uint64_t call_id;
  {
    std::lock_guard lock(mu_);
    call_id = call_counter_++;
  }
  BackoffSchedule backoff(options_.retry,
                          options_.seed ^ (call_id * 0x9E3779B97F4A7C15ULL));
  const auto started = std::chrono::steady_clock::now();
  const int max_attempts = options_.retry.max_attempts;

  ProviderReply reply;
  int attempt = 0;
  while (attempt < max_attempts) {
    if (attempt > 0) options_.sleep(backoff.Next());
    if (auto wait = limiter_.Reserve(); wait.count() > 0) options_.sleep(wait);

    ++attempt;
    AcquireSlot();
    try {
      reply = provider_->Send(spec, request);
    } catch (LlmError& e) {
      ReleaseSlot();
      e.set_attempts(attempt);
      throw;
    } catch (...) {
      ReleaseSlot();
      throw;
    }
    ReleaseSlot();

    if (reply.status == 200) {
      CompletionResult result;
      result.text = std::move(reply.text);
      result.model_name =
          reply.model_name.empty() ? spec.model_name : reply.model_name;
      result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started);
      result.attempt_count = attempt;
      result.token_usage = reply.token_usage;
      return result;
    }
    if (reply.status == 401 || reply.status == 403) {
      throw AuthError("authentication rejected (status " +
                          std::to_string(reply.status) + ")",
                      attempt);
    }
    if (!Retryable(reply)) {
      throw ProviderError(reply.status, Excerpt(reply.body), attempt);
    }
  }

  if (reply.status == 429) {
    throw RateLimitExhausted(
        "rate limited on all " + std::to_string(attempt) + " attempts",
        attempt);
  }
  if (reply.timed_out) {
    throw Timeout("request timed out on all " + std::to_string(attempt) +
                      " attempts",
                  attempt);
  }
  throw ProviderError(reply.status, Excerpt(reply.body), attempt);
}

}  // namespace reflect
