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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "reflect/metrics.h"
#include "reflect/text.h"

namespace reflect {
namespace {

using NgramCounts = std::map<std::vector<std::string_view>, int64_t>;

NgramCounts CountNgrams(const std::vector<std::string>& tokens, int n) {
  NgramCounts counts;
  const auto order = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    std::vector<std::string_view> gram(tokens.begin() + i,
                                       tokens.begin() + i + order);
    ++counts[std::move(gram)];
  }
  return counts;
}

}  // namespace

std::string SmoothingName(Smoothing s) {
  return s == Smoothing::kNone ? "none" : "floor-half";
}

Smoothing ParseSmoothing(const std::string& name) {
  if (name == "none") return Smoothing::kNone;
  if (name == "floor-half") return Smoothing::kFloorHalf;
  throw ConfigError("bleu_smoothing", "unknown smoothing \"" + name + "\"");
}

std::string BleuTokenizerName(BleuTokenizer t) {
  return t == BleuTokenizer::kWhitespace ? "whitespace" : "intl-punct";
}

BleuTokenizer ParseBleuTokenizer(const std::string& name) {
  if (name == "whitespace") return BleuTokenizer::kWhitespace;
  if (name == "intl-punct") return BleuTokenizer::kIntlPunct;
  throw ConfigError("bleu_tokenizer", "unknown tokenizer \"" + name + "\"");
}

void BleuConfig::Validate() const {
  if (max_order < 1) throw ConfigError("bleu_max_order", "must be at least 1");
  if (weights.empty()) return;
  if (weights.size() != static_cast<std::size_t>(max_order)) {
    throw ConfigError("bleu_weights", "need one weight per order");
  }
  if (std::any_of(weights.begin(), weights.end(),
                  [](double w) { return !(w >= 0.0); })) {
    throw ConfigError("bleu_weights", "weights must be non-negative");
  }
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("bleu_weights", "weights must sum to 1");
  }
}

std::vector<double> BleuConfig::EffectiveWeights() const {
  if (!weights.empty()) return weights;
  return std::vector<double>(static_cast<std::size_t>(max_order),
                             1.0 / max_order);
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  if (matches.size() < other.matches.size()) {
    matches.resize(other.matches.size(), 0);
    totals.resize(other.totals.size(), 0);
  }
  for (std::size_t i = 0; i < other.matches.size(); ++i) {
    matches[i] += other.matches[i];
    totals[i] += other.totals[i];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

std::vector<std::string> TokenizeForBleu(std::string_view s,
                                         BleuTokenizer tokenizer) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t pos = 0; pos < s.size();) {
    const auto d = text::DecodeUtf8(s, pos);
    const auto cls = text::Classify(d.code_point);
    if (cls == text::CharClass::kWhitespace) {
      flush();
    } else if (tokenizer == BleuTokenizer::kIntlPunct &&
               cls == text::CharClass::kPunctuation) {
      flush();
      tokens.emplace_back(s.substr(pos, d.length));
    } else {
      current.append(s.substr(pos, d.length));
    }
    pos += d.length;
  }
  flush();
  return tokens;
}

BleuStats CollectBleuStats(std::string_view hypothesis,
                           std::string_view reference,
                           const BleuConfig& config) {
  config.Validate();
  const auto hyp = TokenizeForBleu(hypothesis, config.tokenizer);
  const auto ref = TokenizeForBleu(reference, config.tokenizer);
  if (ref.empty()) throw EmptyReference();

  BleuStats stats;
  stats.hyp_len = static_cast<int64_t>(hyp.size());
  stats.ref_len = static_cast<int64_t>(ref.size());
  for (int n = 1; n <= config.max_order; ++n) {
    const NgramCounts hyp_counts = CountNgrams(hyp, n);
    const NgramCounts ref_counts = CountNgrams(ref, n);
    int64_t matched = 0;
    for (const auto& [gram, count] : hyp_counts) {
      const auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    stats.matches.push_back(matched);
    stats.totals.push_back(std::max<int64_t>(0, stats.hyp_len - n + 1));
  }
  return stats;
}

BleuScore BleuFromStats(const BleuStats& stats, const BleuConfig& config) {
  const std::vector<double> weights = config.EffectiveWeights();
  BleuScore out;
  out.hyp_len = stats.hyp_len;
  out.ref_len = stats.ref_len;
  out.precisions.assign(weights.size(), 0.0);
  if (stats.hyp_len == 0) return out;

  const double c = static_cast<double>(stats.hyp_len);
  const double r = static_cast<double>(stats.ref_len);
  out.brevity_penalty = c > r ? 1.0 : std::exp(1.0 - r / c);

  double geometric = 1.0;
  bool zero = false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const auto matched = static_cast<double>(stats.matches[i]);
    const auto total = static_cast<double>(stats.totals[i]);
    double p = total > 0 ? matched / total : 0.0;
    if (p == 0.0 && i >= 1 && config.smoothing == Smoothing::kFloorHalf) {
      p = 1.0 / (2.0 * std::max(total, 1.0));
    }
    out.precisions[i] = p;
    if (weights[i] == 0.0) continue;
    if (p == 0.0) {
      zero = true;
    } else {
      geometric *= std::pow(p, weights[i]);
    }
  }
  out.score = zero ? 0.0 : out.brevity_penalty * geometric;
  return out;
}

BleuScore SentenceBleu(std::string_view hypothesis, std::string_view reference,
                       const BleuConfig& config) {
  return BleuFromStats(CollectBleuStats(hypothesis, reference, config), config);
}

BleuScore CorpusBleu(std::span<const HypothesisReference> pairs,
                     const BleuConfig& config) {
  if (pairs.empty()) throw EmptyBatch();
  BleuStats pooled;
  for (const auto& p : pairs) {
    pooled += CollectBleuStats(p.hypothesis, p.reference, config);
  }
  return BleuFromStats(pooled, config);
}

}  // namespace reflect
