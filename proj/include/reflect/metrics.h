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

#ifndef REFLECT_METRICS_H_
#define REFLECT_METRICS_H_

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reflect/error.h"

namespace reflect {

enum class Smoothing {
  kNone,
  // Zero precisions of order >= 2 become 1 / (2 * hypothesis n-grams of that
  // order), with the n-gram count floored at 1.
  kFloorHalf,
};

enum class BleuTokenizer {
  kWhitespace,
  // Punctuation characters become separate tokens, then whitespace split.
  // Case is preserved.
  kIntlPunct,
};

std::string SmoothingName(Smoothing s);
Smoothing ParseSmoothing(const std::string& name);
std::string BleuTokenizerName(BleuTokenizer t);
BleuTokenizer ParseBleuTokenizer(const std::string& name);

struct BleuConfig {
  int max_order = 4;
  // Empty means uniform 1/max_order.
  std::vector<double> weights;
  Smoothing smoothing = Smoothing::kFloorHalf;
  BleuTokenizer tokenizer = BleuTokenizer::kIntlPunct;

  void Validate() const;
  std::vector<double> EffectiveWeights() const;
};

// Scores are in [0, 1]. For an empty hypothesis every field but ref_len is
// zero, brevity_penalty included (the c -> 0 limit).
struct BleuScore {
  double score = 0.0;
  std::vector<double> precisions;
  double brevity_penalty = 0.0;
  int64_t hyp_len = 0;
  int64_t ref_len = 0;

  friend bool operator==(const BleuScore&, const BleuScore&) = default;
};

// Sufficient statistics; corpus scores pool these before forming ratios.
struct BleuStats {
  std::vector<int64_t> matches;  // clipped, per order
  std::vector<int64_t> totals;   // hypothesis n-grams, per order
  int64_t hyp_len = 0;
  int64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
};

class EmptyReference : public Error {
 public:
  EmptyReference() : Error("reference is empty after tokenization") {}
};

class EmptyBatch : public Error {
 public:
  EmptyBatch() : Error("no hypothesis/reference pairs to score") {}
};

std::vector<std::string> TokenizeForBleu(std::string_view text,
                                         BleuTokenizer tokenizer);

BleuStats CollectBleuStats(std::string_view hypothesis,
                           std::string_view reference, const BleuConfig& config);
BleuScore BleuFromStats(const BleuStats& stats, const BleuConfig& config);

BleuScore SentenceBleu(std::string_view hypothesis, std::string_view reference,
                       const BleuConfig& config);

struct HypothesisReference {
  std::string hypothesis;
  std::string reference;
};

BleuScore CorpusBleu(std::span<const HypothesisReference> pairs,
                     const BleuConfig& config);

// --- learned semantic metric -------------------------------------------------

struct SemanticScore {
  double score = 0.0;
  std::string scorer_id;
  bool reference_used = false;

  friend bool operator==(const SemanticScore&, const SemanticScore&) = default;
};

struct ScoreItem {
  std::string src;
  std::string mt;
  std::optional<std::string> ref;
};

class ScorerUnavailable : public Error {
 public:
  using Error::Error;
};

class ScorerProtocolError : public Error {
 public:
  using Error::Error;
};

// A source of learned quality scores. Implementations return one score per
// item, in item order.
class SemanticScorer {
 public:
  virtual ~SemanticScorer() = default;
  virtual std::vector<double> Score(std::span<const ScoreItem> items) = 0;
  virtual std::string ScorerId() = 0;
};

// Client for the scoring service: POST /score takes a JSON list of
// {src, mt, ref?} and answers a list of {score}; GET /health answers
// {status, scorer_id} (503 until the model is loaded).
class HttpScorer : public SemanticScorer {
 public:
  // `base_url` like "http://127.0.0.1:8765".
  explicit HttpScorer(std::string base_url, int timeout_seconds = 120);

  std::vector<double> Score(std::span<const ScoreItem> items) override;
  std::string ScorerId() override;

 private:
  std::string base_url_;
  int timeout_seconds_;
  std::mutex mu_;
  std::string scorer_id_;
};

SemanticScore ScoreSemantic(std::string_view source, std::string_view hypothesis,
                            const std::optional<std::string>& reference,
                            SemanticScorer& scorer);

std::vector<SemanticScore> ScoreSemanticBatch(std::span<const ScoreItem> items,
                                              SemanticScorer& scorer);

}  // namespace reflect

#endif  // REFLECT_METRICS_H_
