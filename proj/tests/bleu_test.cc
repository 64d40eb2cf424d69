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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.h"
#include "reflect/metrics.h"

namespace reflect {
namespace {

BleuConfig Config(int max_order, Smoothing smoothing,
                  BleuTokenizer tokenizer = BleuTokenizer::kIntlPunct) {
  BleuConfig c;
  c.max_order = max_order;
  c.smoothing = smoothing;
  c.tokenizer = tokenizer;
  return c;
}

TEST(BleuTest, Identity) {
  const auto s = SentenceBleu("the cat sat on the mat", "the cat sat on the mat",
                              BleuConfig{});
  EXPECT_EQ(s.score, 1.0);
  EXPECT_EQ(s.brevity_penalty, 1.0);
  EXPECT_EQ(s.precisions, (std::vector<double>{1.0, 1.0, 1.0, 1.0}));
  EXPECT_EQ(s.hyp_len, 6);
  EXPECT_EQ(s.ref_len, 6);
}

TEST(BleuTest, Disjoint) {
  const auto s = SentenceBleu("x y z", "a b c", Config(4, Smoothing::kNone));
  EXPECT_EQ(s.score, 0.0);
  for (double p : s.precisions) EXPECT_EQ(p, 0.0);
  // Smoothing never rescues a zero unigram precision.
  EXPECT_EQ(SentenceBleu("x y z", "a b c", BleuConfig{}).score, 0.0);
}

TEST(BleuTest, ClippingIsExactlyAQuarter) {
  const auto s = SentenceBleu("the the the the", "the cat", Config(1, Smoothing::kNone));
  EXPECT_EQ(s.precisions[0], 0.25);
  EXPECT_EQ(s.brevity_penalty, 1.0);
  EXPECT_EQ(s.score, 0.25);
}

TEST(BleuTest, BrevityPenaltyCases) {
  const auto c = Config(1, Smoothing::kNone);
  const auto s = SentenceBleu("a b", "a b c d", c);
  EXPECT_DOUBLE_EQ(s.brevity_penalty, std::exp(1.0 - 4.0 / 2.0));
  EXPECT_DOUBLE_EQ(s.score, std::exp(-1.0));
  // c == r gives exp(0).
  EXPECT_EQ(SentenceBleu("a x", "a b", c).brevity_penalty, 1.0);
}

TEST(BleuTest, FloorHalfSmoothing) {
  // Unigrams 2/3; bigrams 0 of 2 -> 1/4; trigrams 0 of 1 -> 1/2; no
  // 4-grams -> 1/2. BP = exp(1 - 4/3).
  const auto s = SentenceBleu("a x b", "a b c d", BleuConfig{});
  EXPECT_DOUBLE_EQ(s.precisions[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.precisions[1], 0.25);
  EXPECT_DOUBLE_EQ(s.precisions[2], 0.5);
  EXPECT_DOUBLE_EQ(s.precisions[3], 0.5);
  const double expected = std::exp(1.0 - 4.0 / 3.0) *
                          std::pow(2.0 / 3.0 * 0.25 * 0.5 * 0.5, 0.25);
  EXPECT_NEAR(s.score, expected, 1e-15);
}

TEST(BleuTest, EmptyHypothesisAndReference) {
  const auto s = SentenceBleu("   ", "a b", BleuConfig{});
  EXPECT_EQ(s.score, 0.0);
  EXPECT_EQ(s.hyp_len, 0);
  EXPECT_EQ(s.precisions, (std::vector<double>{0, 0, 0, 0}));
  EXPECT_THROW(SentenceBleu("a", " \t", BleuConfig{}), EmptyReference);
}

TEST(BleuTest, Tokenizers) {
  EXPECT_EQ(TokenizeForBleu("Hello, world! It's well-known.", BleuTokenizer::kIntlPunct),
            (std::vector<std::string>{"Hello", ",", "world", "!", "It's",
                                      "well-known", "."}));
  EXPECT_EQ(TokenizeForBleu("Hello, world!", BleuTokenizer::kWhitespace),
            (std::vector<std::string>{"Hello,", "world!"}));
  EXPECT_EQ(TokenizeForBleu("«Sawubona» 2024", BleuTokenizer::kIntlPunct),
            (std::vector<std::string>{"«", "Sawubona", "»", "2024"}));
}

TEST(BleuTest, ConfigValidation) {
  BleuConfig c;
  c.max_order = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c.max_order = 2;
  c.weights = {0.5, 0.4};
  EXPECT_THROW(c.Validate(), ConfigError);
  c.weights = {0.25, 0.75};
  EXPECT_NO_THROW(c.Validate());
  c.weights = {0.5};
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_EQ(ParseSmoothing(SmoothingName(Smoothing::kNone)), Smoothing::kNone);
  EXPECT_EQ(ParseBleuTokenizer("whitespace"), BleuTokenizer::kWhitespace);
  EXPECT_THROW(ParseSmoothing("add-one"), ConfigError);
}

TEST(BleuTest, CustomWeights) {
  BleuConfig c = Config(2, Smoothing::kNone, BleuTokenizer::kWhitespace);
  c.weights = {0.25, 0.75};
  // p1 = 2/3, p2 = 1/2.
  const auto s = SentenceBleu("a b d", "a b c", c);
  EXPECT_NEAR(s.score, std::pow(2.0 / 3.0, 0.25) * std::pow(0.5, 0.75), 1e-15);
}

TEST(CorpusBleuTest, PooledCountsByHand) {
  // Pair 1: "a b c" vs itself. Pair 2: "a b d" vs "a b c".
  // Pooled: p1 = (3 + 2) / 6, p2 = (2 + 1) / 4, BP = 1 -> sqrt(5/8).
  // The mean of sentence scores is (1 + sqrt(1/3)) / 2 instead.
  const BleuConfig c = Config(2, Smoothing::kNone, BleuTokenizer::kWhitespace);
  const std::vector<HypothesisReference> pairs = {{"a b c", "a b c"},
                                                  {"a b d", "a b c"}};
  const auto pooled = CorpusBleu(pairs, c);
  EXPECT_NEAR(pooled.score, std::sqrt(5.0 / 8.0), 1e-15);
  EXPECT_DOUBLE_EQ(pooled.precisions[0], 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(pooled.precisions[1], 0.75);
  const double mean = (SentenceBleu("a b c", "a b c", c).score +
                       SentenceBleu("a b d", "a b c", c).score) / 2.0;
  EXPECT_NEAR(mean, (1.0 + std::sqrt(1.0 / 3.0)) / 2.0, 1e-15);
  EXPECT_GT(std::abs(pooled.score - mean), 1e-3);
}

TEST(CorpusBleuTest, Identities) {
  const BleuConfig c;
  const std::vector<HypothesisReference> one = {{"the cat is here", "the cat was here"}};
  EXPECT_EQ(CorpusBleu(one, c), SentenceBleu("the cat is here", "the cat was here", c));
  const std::vector<HypothesisReference> perfect = {{"a b c d", "a b c d"},
                                                    {"a b c d", "a b c d"}};
  EXPECT_EQ(CorpusBleu(perfect, c).score, 1.0);
  EXPECT_THROW(CorpusBleu({}, c), EmptyBatch);
}

const std::vector<std::string> kVocab = {"the", "cat", "sat", "on", "mat", "a",
                                         "dog", ",", ".", "it's", "well-known",
                                         "ran"};

TEST(BleuPropertyTest, MatchesBruteForceOracle) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 400; ++i) {
    const std::string hyp = oracle::RandomSentence(rng, kVocab, 0, 12);
    const std::string ref = oracle::RandomSentence(rng, kVocab, 1, 12);
    const double got = SentenceBleu(hyp, ref, BleuConfig{}).score;
    ASSERT_NEAR(got, oracle::Bleu(hyp, ref), 1e-12) << hyp << " | " << ref;
    ASSERT_GE(got, 0.0);
    ASSERT_LE(got, 1.0);
  }
}

TEST(BleuPropertyTest, UnigramNoSmoothingIsClippedPrecisionTimesBp) {
  std::mt19937_64 rng(8);
  const BleuConfig c = Config(1, Smoothing::kNone);
  for (int i = 0; i < 300; ++i) {
    const std::string hyp = oracle::RandomSentence(rng, kVocab, 1, 10);
    const std::string ref = oracle::RandomSentence(rng, kVocab, 1, 10);
    ASSERT_NEAR(SentenceBleu(hyp, ref, c).score, oracle::Bleu(hyp, ref, 1), 1e-12);
  }
}

TEST(BleuPropertyTest, CorpusOrderInvariant) {
  std::mt19937_64 rng(9);
  std::vector<HypothesisReference> pairs;
  for (int i = 0; i < 30; ++i) {
    pairs.push_back({oracle::RandomSentence(rng, kVocab, 0, 10),
                     oracle::RandomSentence(rng, kVocab, 1, 10)});
  }
  const double base = CorpusBleu(pairs, BleuConfig{}).score;
  for (int k = 0; k < 10; ++k) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    EXPECT_EQ(CorpusBleu(pairs, BleuConfig{}).score, base);
  }
}

TEST(BleuPropertyTest, BrevityPenaltyMonotone) {
  const std::string ref = "one two three four five six seven eight";
  double prev = 0.0;
  std::string hyp;
  for (int len = 1; len <= 12; ++len) {
    hyp += (len > 1 ? " w" : "w") + std::to_string(len);
    const double bp = SentenceBleu(hyp, ref, BleuConfig{}).brevity_penalty;
    EXPECT_GE(bp, prev);
    EXPECT_GT(bp, 0.0);
    EXPECT_LE(bp, 1.0);
    prev = bp;
  }
}

}  // namespace
}  // namespace reflect
