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

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "reflect/providers.h"

namespace reflect {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

Endpoint SplitBaseUrl(const std::string& base_url) {
  const std::size_t scheme = base_url.find("://");
  const std::size_t path_start =
      base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  Endpoint e;
  if (path_start == std::string::npos) {
    e.origin = base_url;
  } else {
    e.origin = base_url.substr(0, path_start);
    e.prefix = base_url.substr(path_start);
    while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  }
  return e;
}

ProviderReply Post(const ModelSpec& spec, const std::string& default_base,
                   const std::string& path, const httplib::Headers& headers,
                   const std::string& body,
                   ProviderReply (*parse)(const std::string&)) {
  const Endpoint endpoint =
      SplitBaseUrl(spec.base_url.empty() ? default_base : spec.base_url);
  httplib::Client client(endpoint.origin);
  const auto timeout = std::chrono::seconds(spec.request_timeout);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  auto result =
      client.Post(endpoint.prefix + path, headers, body, "application/json");
  ProviderReply reply;
  if (!result) {
    reply.status = 0;
    reply.timed_out = result.error() == httplib::Error::Read ||
                      result.error() == httplib::Error::Write ||
                      result.error() == httplib::Error::ConnectionTimeout;
    reply.body = httplib::to_string(result.error());
    return reply;
  }
  if (result->status != 200) {
    reply.status = result->status;
    reply.body = result->body;
    return reply;
  }
  return parse(result->body);
}

std::string EnvOrEmpty(const char* name) {
  const char* value = std::getenv(name);
  return value == nullptr ? std::string() : std::string(value);
}

[[noreturn]] void ThrowMalformed(const std::string& body, const char* what) {
  throw ProviderError(200,
                      std::string("malformed response (") + what + "): " +
                          body.substr(0, 200),
                      1);
}

std::optional<TokenUsage> ReadUsage(const nlohmann::json& j,
                                    const char* prompt_field,
                                    const char* completion_field) {
  if (!j.contains("usage") || !j["usage"].is_object()) return std::nullopt;
  const auto& u = j["usage"];
  return TokenUsage{u.value(prompt_field, 0), u.value(completion_field, 0)};
}

}  // namespace

OpenAiProvider::OpenAiProvider(std::string api_key)
    : api_key_(std::move(api_key)) {
  if (api_key_.empty()) throw AuthError("OPENAI_API_KEY is not set", 0);
}

std::unique_ptr<OpenAiProvider> OpenAiProvider::FromEnvironment() {
  return std::make_unique<OpenAiProvider>(EnvOrEmpty("OPENAI_API_KEY"));
}

std::string OpenAiProvider::BuildRequestBody(const ModelSpec& spec,
                                             const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  if (!request.system_text.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system_text}});
  }
  messages.push_back({{"role", "user"}, {"content", request.user_text}});
  return nlohmann::json{{"model", spec.model_name},
                        {"messages", messages},
                        {"temperature", spec.temperature},
                        {"max_tokens", spec.max_output_tokens}}
      .dump();
}

ProviderReply OpenAiProvider::ParseResponseBody(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) ThrowMalformed(body, "not JSON");
  if (!j.contains("choices") || !j["choices"].is_array() ||
      j["choices"].empty()) {
    ThrowMalformed(body, "no choices");
  }
  const auto& message = j["choices"][0].value("message", nlohmann::json());
  if (!message.contains("content") || !message["content"].is_string()) {
    ThrowMalformed(body, "no message content");
  }
  ProviderReply reply;
  reply.text = message["content"].get<std::string>();
  reply.model_name = j.value("model", std::string());
  reply.token_usage = ReadUsage(j, "prompt_tokens", "completion_tokens");
  return reply;
}

ProviderReply OpenAiProvider::Send(const ModelSpec& spec,
                                   const ChatRequest& request) {
  const httplib::Headers headers = {
      {"Authorization", "Bearer " + api_key_}};
  return Post(spec, "https://api.openai.com", "/v1/chat/completions", headers,
              BuildRequestBody(spec, request), &ParseResponseBody);
}

AnthropicProvider::AnthropicProvider(std::string api_key)
    : api_key_(std::move(api_key)) {
  if (api_key_.empty()) throw AuthError("ANTHROPIC_API_KEY is not set", 0);
}

std::unique_ptr<AnthropicProvider> AnthropicProvider::FromEnvironment() {
  return std::make_unique<AnthropicProvider>(EnvOrEmpty("ANTHROPIC_API_KEY"));
}

std::string AnthropicProvider::BuildRequestBody(const ModelSpec& spec,
                                                const ChatRequest& request) {
  nlohmann::json body = {
      {"model", spec.model_name},
      {"max_tokens", spec.max_output_tokens},
      {"temperature", spec.temperature},
      {"messages",
       nlohmann::json::array(
           {{{"role", "user"}, {"content", request.user_text}}})}};
  if (!request.system_text.empty()) body["system"] = request.system_text;
  return body.dump();
}

ProviderReply AnthropicProvider::ParseResponseBody(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) ThrowMalformed(body, "not JSON");
  if (!j.contains("content") || !j["content"].is_array()) {
    ThrowMalformed(body, "no content");
  }
  ProviderReply reply;
  bool found = false;
  for (const auto& block : j["content"]) {
    if (block.value("type", "") == "text" && block.contains("text")) {
      reply.text += block["text"].get<std::string>();
      found = true;
    }
  }
  if (!found) ThrowMalformed(body, "no text block");
  reply.model_name = j.value("model", std::string());
  reply.token_usage = ReadUsage(j, "input_tokens", "output_tokens");
  return reply;
}

ProviderReply AnthropicProvider::Send(const ModelSpec& spec,
                                      const ChatRequest& request) {
  const httplib::Headers headers = {{"x-api-key", api_key_},
                                    {"anthropic-version", "2023-06-01"}};
  return Post(spec, "https://api.anthropic.com", "/v1/messages", headers,
              BuildRequestBody(spec, request), &ParseResponseBody);
}

}  // namespace reflect
