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

#ifndef REFLECT_PROMPTS_H_
#define REFLECT_PROMPTS_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reflect/corpus.h"
#include "reflect/error.h"

namespace reflect {

enum class Strategy { kBaseline, kBriefReasoning, kFewShot };

// "baseline", "brief_reasoning", "few_shot"; these are also the template
// file stems.
std::string StrategyName(Strategy strategy);
Strategy ParseStrategy(const std::string& name);

inline constexpr std::string_view kStartDelimiter = "<START_TRANSLATION>";
inline constexpr std::string_view kEndDelimiter = "<END_TRANSLATION>";
inline constexpr std::string_view kReflectionSlot = "Reflection:";

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  int pass_number = 1;
  Strategy strategy = Strategy::kBaseline;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

struct FewShotExample {
  std::string source_lang_label;
  std::string source_text;
  std::string translation;
};

class MissingExamples : public Error {
 public:
  MissingExamples() : Error("few-shot strategy requires at least one example") {}
};

class EmptyReflection : public Error {
 public:
  EmptyReflection() : Error("reflection text is empty") {}
};

class DelimiterMissing : public Error {
 public:
  using Error::Error;
};

class EmptyTranslation : public Error {
 public:
  EmptyTranslation() : Error("translation span is empty") {}
};

// Human-readable name used in the prompts: zu -> isiZulu, xh -> isiXhosa,
// en -> English. Throws ConfigError for anything else.
std::string LanguageName(const std::string& code);

// Replaces each "{key}" occurring in `tmpl` in a single left-to-right pass;
// substituted text is never rescanned. Unknown "{...}" runs stay literal.
std::string Substitute(std::string_view tmpl,
                       const std::map<std::string, std::string>& values);

// Renders the examples block, one "Source (...)" / "Translation:" line pair
// per example.
std::string FormatExamples(std::span<const FewShotExample> examples);

// Reads one JSON object per line with "source_lang_label", "source_text" and
// "translation".
std::vector<FewShotExample> LoadFewShotExamples(
    const std::filesystem::path& path);

// Directory holding the bundled templates, stopwords and few-shot examples.
std::filesystem::path DefaultDataDir();

// The set of prompt templates for every strategy and pass, plus the
// reflection request template. Immutable once loaded.
class PromptTemplates {
 public:
  // Expects "<strategy>_<pass>.txt" for every strategy and pass 1/2, and
  // "reflection.txt". A single trailing newline is dropped from each file.
  static PromptTemplates Load(const std::filesystem::path& dir);

  PromptBundle RenderFirstPass(const SentencePair& pair, Strategy strategy,
                               std::span<const FewShotExample> examples) const;

  // `examples` are only consulted by templates that carry an "{examples}"
  // slot (the few-shot second pass).
  PromptBundle RenderSecondPass(
      const SentencePair& pair, Strategy strategy,
      std::string_view masked_reflection,
      std::span<const FewShotExample> examples = {}) const;

  // Request text asking the model to critique `draft`.
  std::string RenderReflectionRequest(const SentencePair& pair,
                                      std::string_view draft) const;

  const std::string& Template(Strategy strategy, int pass) const;

 private:
  std::map<std::string, std::string> templates_;
};

// Extracts the text between the first start delimiter and the first end
// delimiter after it, trimmed of surrounding whitespace.
std::string ParseTranslation(std::string_view raw_model_output);

}  // namespace reflect

#endif  // REFLECT_PROMPTS_H_
