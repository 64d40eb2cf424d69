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

#ifndef REFLECT_REFLECTION_H_
#define REFLECT_REFLECTION_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "reflect/corpus.h"
#include "reflect/llm_client.h"
#include "reflect/prompts.h"

namespace reflect {

inline constexpr std::string_view kMaskToken = "<MASK>";

// Three-part self-critique of a draft translation.
struct Reflection {
  std::string error_identification;
  std::string high_level_fixes;
  std::string critical_content;
  std::string raw_text;     // model output, verbatim
  std::string masked_text;  // raw_text with salient phrases masked
  std::vector<std::string> masked_phrases;

  friend bool operator==(const Reflection&, const Reflection&) = default;
};

struct RakeConfig {
  std::unordered_set<std::string> stopwords;
  // Candidates shorter than this (bytes, words joined by one space) are
  // discarded before scoring.
  std::size_t min_phrase_chars = 3;
  double top_fraction = 1.0 / 3.0;
  std::size_t max_phrases = 8;

  void Validate() const;

  // SMART stopwords from the bundled data directory and the default limits.
  static RakeConfig Default();
};

struct RakePhrase {
  std::string phrase;  // lowercase words joined by single spaces
  double score = 0.0;

  friend bool operator==(const RakePhrase&, const RakePhrase&) = default;
};

// Stopword file: one word per line, '#' starts a comment, lowercased.
std::unordered_set<std::string> LoadStopwords(const std::filesystem::path& path);

// Rapid Automatic Keyword Extraction. Candidates are maximal runs of
// non-stopword tokens; scores are summed degree/frequency word ratios;
// output is ranked by score with ties in first-occurrence order.
std::vector<RakePhrase> RakeExtract(std::string_view text,
                                    const RakeConfig& config);

class SectionMissing : public Error {
 public:
  explicit SectionMissing(std::string name)
      : Error("reflection lacks section " + name), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// Splits a critique into its ERRORS / FIXES / CRITICAL sections. Headers
// are matched case-insensitively at line starts, tolerating list and
// emphasis markup ("1.", "-", "**", "#").
Reflection ParseReflection(std::string_view raw_text);

// Asks the model for a critique of `draft`, retrying once when a section is
// missing. Masked fields are left empty.
Reflection GenerateReflection(LlmClient& client, const ModelSpec& spec,
                              const PromptTemplates& templates,
                              const SentencePair& pair, Strategy strategy,
                              std::string_view draft);

// Extracts phrases from the critical content and masks every occurrence of
// them in the raw text, longest first. Recomputes the masked fields from
// the raw fields, so applying it twice is a no-op.
Reflection MaskReflection(Reflection reflection, const RakeConfig& config);

// True when `phrase` occurs case-insensitively in `masked_text` outside
// the mask tokens.
bool LeaksPhrase(std::string_view masked_text, std::string_view phrase);

}  // namespace reflect

#endif  // REFLECT_REFLECTION_H_
