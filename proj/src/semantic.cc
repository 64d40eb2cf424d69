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

#include <chrono>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "reflect/metrics.h"

namespace reflect {
namespace {

httplib::Client MakeClient(const std::string& base_url, int timeout_seconds) {
  httplib::Client client(base_url);
  client.set_connection_timeout(std::chrono::seconds(timeout_seconds));
  client.set_read_timeout(std::chrono::seconds(timeout_seconds));
  return client;
}

}  // namespace

HttpScorer::HttpScorer(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string HttpScorer::ScorerId() {
  std::lock_guard lock(mu_);
  if (!scorer_id_.empty()) return scorer_id_;
  auto client = MakeClient(base_url_, timeout_seconds_);
  auto res = client.Get("/health");
  if (!res) {
    throw ScorerUnavailable("scorer at " + base_url_ + " unreachable: " +
                            httplib::to_string(res.error()));
  }
  if (res->status == 503) {
    throw ScorerUnavailable("scorer at " + base_url_ + " is not ready");
  }
  const auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (res->status != 200 || j.is_discarded() || !j.is_object() ||
      !j.contains("scorer_id") || !j["scorer_id"].is_string() ||
      j["scorer_id"].get<std::string>().empty()) {
    throw ScorerProtocolError("unexpected /health response (status " +
                              std::to_string(res->status) + ")");
  }
  scorer_id_ = j["scorer_id"].get<std::string>();
  return scorer_id_;
}

std::vector<double> HttpScorer::Score(std::span<const ScoreItem> items) {
  if (items.empty()) return {};
  nlohmann::json body = nlohmann::json::array();
  for (const auto& item : items) {
    nlohmann::json entry = {{"src", item.src}, {"mt", item.mt}};
    if (item.ref) entry["ref"] = *item.ref;
    body.push_back(std::move(entry));
  }
  auto client = MakeClient(base_url_, timeout_seconds_);
  auto res = client.Post("/score", body.dump(), "application/json");
  if (!res) {
    throw ScorerUnavailable("scorer at " + base_url_ + " unreachable: " +
                            httplib::to_string(res.error()));
  }
  if (res->status == 503) {
    throw ScorerUnavailable("scorer at " + base_url_ + " is not ready");
  }
  if (res->status != 200) {
    throw ScorerProtocolError("/score returned status " +
                              std::to_string(res->status));
  }
  const auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.is_array() || j.size() != items.size()) {
    throw ScorerProtocolError("/score response is not a list of " +
                              std::to_string(items.size()) + " entries");
  }
  std::vector<double> scores;
  scores.reserve(items.size());
  for (const auto& entry : j) {
    if (!entry.is_object() || !entry.contains("score") ||
        !entry["score"].is_number()) {
      throw ScorerProtocolError("/score entry lacks a numeric \"score\"");
    }
    scores.push_back(entry["score"].get<double>());
  }
  return scores;
}

SemanticScore ScoreSemantic(std::string_view source,
                            std::string_view hypothesis,
                            const std::optional<std::string>& reference,
                            SemanticScorer& scorer) {
  const ScoreItem item{std::string(source), std::string(hypothesis), reference};
  return ScoreSemanticBatch(std::span(&item, 1), scorer).front();
}

std::vector<SemanticScore> ScoreSemanticBatch(std::span<const ScoreItem> items,
                                              SemanticScorer& scorer) {
  const std::string id = scorer.ScorerId();
  if (id.empty()) throw ScorerProtocolError("scorer reported an empty id");
  const std::vector<double> raw = scorer.Score(items);
  if (raw.size() != items.size()) {
    throw ScorerProtocolError("scorer returned " + std::to_string(raw.size()) +
                              " scores for " + std::to_string(items.size()) +
                              " items");
  }
  std::vector<SemanticScore> out;
  out.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back({raw[i], id, items[i].ref.has_value()});
  }
  return out;
}

}  // namespace reflect
