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

#ifndef REFLECT_CONFIG_H_
#define REFLECT_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "reflect/corpus.h"
#include "reflect/llm_client.h"
#include "reflect/metrics.h"
#include "reflect/prompts.h"

namespace reflect {

enum class GateMetric { kBleu, kSemantic, kAlways, kNever };

std::string GateMetricName(GateMetric gate);
GateMetric ParseGateMetric(const std::string& name);

// Everything that determines a run. Loaded from a "key = value" file whose
// keys mirror the fields below; relative paths resolve against the file's
// directory.
struct RunConfig {
  ModelSpec model;
  int max_attempts = 4;
  double requests_per_second = 0.0;
  Strategy strategy = Strategy::kBaseline;
  std::string source_lang = "zu";
  std::string target_lang = "en";
  CorpusSource corpus;
  std::size_t sample_size = 0;  // 0 = whole corpus
  uint64_t seed = 0;
  GateMetric gate_metric = GateMetric::kAlways;
  double gate_threshold = 0.0;
  BleuConfig bleu;
  std::string scorer_url;  // empty disables semantic scoring
  std::filesystem::path output_dir = "out";
  int max_parallel = 1;

  std::filesystem::path mock_fixture;   // provider = mock
  std::filesystem::path cassette;       // record live responses here
  std::filesystem::path template_dir;   // empty = bundled templates
  std::filesystem::path stopwords;      // empty = bundled SMART list
  std::filesystem::path few_shot_examples;  // empty = bundled isiZulu pair
  double rake_top_fraction = 1.0 / 3.0;
  std::size_t rake_max_phrases = 8;
  std::size_t rake_min_phrase_chars = 3;

  LanguagePair pair() const { return {source_lang, target_lang}; }

  // Throws ConfigError naming the first offending field.
  void Validate() const;

  // Sorted "key = value" lines covering every field.
  std::string Canonical() const;
  // FNV-1a of Canonical(), as 16 hex digits.
  std::string Hash() const;
};

RunConfig ParseRunConfig(const std::string& text,
                         const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

}  // namespace reflect

#endif  // REFLECT_CONFIG_H_
