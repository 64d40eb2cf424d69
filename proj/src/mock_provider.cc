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

#include <ctime>
#include <thread>

#include <nlohmann/json.hpp>

#include "reflect/corpus.h"
#include "reflect/providers.h"
#include "reflect/text.h"

namespace reflect {
namespace {

std::string PromptLookupKey(const std::string& hash) { return "#" + hash; }

std::string UtcTimestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

MockProvider::MockProvider(bool strict,
                           std::optional<std::string> default_response)
    : strict_(strict), default_response_(std::move(default_response)) {}

std::string MockProvider::PromptHash(std::string_view user_text) {
  return text::Hex64(text::Fnv1a64(user_text));
}

std::shared_ptr<MockProvider> MockProvider::FromFixture(
    const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw FileNotFound(path);
  std::ifstream in(path, std::ios::binary);
  std::string line;
  std::size_t line_no = 0;
  bool strict = true;
  std::optional<std::string> fallback;
  std::vector<std::pair<nlohmann::json, std::size_t>> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(line_no, e.what());
    }
    if (records.empty() && j.contains("fixture")) {
      const auto& header = j["fixture"];
      strict = header.value("strict", true);
      if (header.contains("default") && header["default"].is_string()) {
        fallback = header["default"].get<std::string>();
      }
      continue;
    }
    records.emplace_back(std::move(j), line_no);
  }

  auto mock = std::make_shared<MockProvider>(strict, fallback);
  for (const auto& [j, at] : records) {
    try {
      Response response;
      response.text = j.at("response").get<std::string>();
      response.model_name = j.value("model_name", std::string());
      if (j.contains("fail")) {
        response.failures = j["fail"].get<std::vector<int>>();
      }
      response.status = j.value("status", 0);
      if (j.contains("key")) {
        const auto& k = j["key"];
        mock->Add({k.at("strategy").get<std::string>(),
                   k.at("pass").get<std::string>(),
                   k.at("id").get<std::string>()},
                  std::move(response));
      } else if (j.contains("prompt_hash")) {
        mock->by_prompt_[PromptLookupKey(j["prompt_hash"].get<std::string>())] =
            std::move(response);
      } else {
        throw FormatError(at, "record needs \"key\" or \"prompt_hash\"");
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(at, e.what());
    }
  }
  return mock;
}

void MockProvider::Add(const RequestKey& key, Response response) {
  std::lock_guard lock(mu_);
  by_key_[key.ToString()] = std::move(response);
}

void MockProvider::AddForPrompt(std::string_view user_text, Response response) {
  std::lock_guard lock(mu_);
  by_prompt_[PromptLookupKey(PromptHash(user_text))] = std::move(response);
}

ProviderReply MockProvider::Send(const ModelSpec& spec,
                                 const ChatRequest& request) {
  ++calls_;
  const int now = ++in_flight_;
  int seen_max = high_water_.load();
  while (now > seen_max && !high_water_.compare_exchange_weak(seen_max, now)) {
  }
  struct Leave {
    std::atomic<int>& counter;
    ~Leave() { --counter; }
  } leave{in_flight_};
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

  ProviderReply reply;
  reply.model_name = spec.model_name;
  std::lock_guard lock(mu_);
  std::string lookup = request.key.ToString();
  const Response* response = nullptr;
  if (auto it = by_key_.find(lookup); it != by_key_.end()) {
    response = &it->second;
  } else {
    lookup = PromptLookupKey(PromptHash(request.user_text));
    if (auto jt = by_prompt_.find(lookup); jt != by_prompt_.end()) {
      response = &jt->second;
    }
  }
  if (response == nullptr) {
    if (strict_ || !default_response_) {
      throw FixtureMissingKey(request.key.ToString());
    }
    reply.text = *default_response_;
    return reply;
  }

  const int call_index = seen_[lookup]++;
  if (response->status != 0) {
    reply.status = response->status;
    reply.body = "scripted failure";
    return reply;
  }
  if (call_index < static_cast<int>(response->failures.size())) {
    reply.status = response->failures[call_index];
    reply.body = "scripted failure";
    reply.timed_out = reply.status == 0;
    return reply;
  }
  reply.text = response->text;
  if (!response->model_name.empty()) reply.model_name = response->model_name;
  return reply;
}

RecordingProvider::RecordingProvider(std::shared_ptr<ChatProvider> inner,
                                     const std::filesystem::path& cassette)
    : inner_(std::move(inner)),
      out_(cassette, std::ios::binary | std::ios::app) {
  if (!out_) throw IoError("cannot open cassette " + cassette.string());
}

ProviderReply RecordingProvider::Send(const ModelSpec& spec,
                                      const ChatRequest& request) {
  ProviderReply reply = inner_->Send(spec, request);
  if (reply.status != 200) return reply;
  nlohmann::json record = {
      {"key",
       {{"strategy", request.key.strategy},
        {"pass", request.key.pass},
        {"id", request.key.pair_id}}},
      {"response", reply.text},
      {"model_name", reply.model_name.empty() ? spec.model_name
                                              : reply.model_name},
      {"timestamp", UtcTimestamp()}};
  std::lock_guard lock(mu_);
  out_ << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  out_.flush();
  return reply;
}

}  // namespace reflect
