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

#include "reflect/prompts.h"

#include <fstream>

#include <nlohmann/json.hpp>

#include "reflect/text.h"

#ifndef REFLECT_DATA_DIR
#define REFLECT_DATA_DIR "data"
#endif

namespace reflect {
namespace {

constexpr Strategy kAllStrategies[] = {Strategy::kBaseline,
                                       Strategy::kBriefReasoning,
                                       Strategy::kFewShot};

std::string TemplateKey(Strategy strategy, int pass) {
  return StrategyName(strategy) + "_" + std::to_string(pass);
}

bool NeedsExamples(const std::string& tmpl) {
  return tmpl.find("{examples}") != std::string::npos;
}

}  // namespace

std::string StrategyName(Strategy strategy) {
  switch (strategy) {
    case Strategy::kBaseline:
      return "baseline";
    case Strategy::kBriefReasoning:
      return "brief_reasoning";
    case Strategy::kFewShot:
      return "few_shot";
  }
  return "baseline";
}

Strategy ParseStrategy(const std::string& name) {
  for (Strategy s : kAllStrategies) {
    if (StrategyName(s) == name) return s;
  }
  throw ConfigError("strategy", "unknown strategy \"" + name +
                                    "\" (expected baseline, brief_reasoning "
                                    "or few_shot)");
}

std::string LanguageName(const std::string& code) {
  static const std::map<std::string, std::string> kNames = {
      {"zu", "isiZulu"}, {"xh", "isiXhosa"}, {"en", "English"}};
  const auto it = kNames.find(code);
  if (it == kNames.end()) {
    throw ConfigError("source_lang", "no language name for code \"" + code +
                                         "\"");
  }
  return it->second;
}

std::string Substitute(std::string_view tmpl,
                       const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    if (tmpl[pos] == '{') {
      const std::size_t close = tmpl.find('}', pos + 1);
      if (close != std::string_view::npos) {
        const auto it =
            values.find(std::string(tmpl.substr(pos + 1, close - pos - 1)));
        if (it != values.end()) {
          out += it->second;
          pos = close + 1;
          continue;
        }
      }
    }
    out += tmpl[pos++];
  }
  return out;
}

std::string FormatExamples(std::span<const FewShotExample> examples) {
  std::string block;
  for (const auto& ex : examples) {
    if (!block.empty()) block += '\n';
    block += "Source (" + ex.source_lang_label + "): " + ex.source_text +
             "\nTranslation: " + ex.translation;
  }
  return block;
}

std::vector<FewShotExample> LoadFewShotExamples(
    const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw FileNotFound(path);
  std::ifstream in(path);
  std::vector<FewShotExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      FewShotExample ex{j.at("source_lang_label").get<std::string>(),
                        j.at("source_text").get<std::string>(),
                        j.at("translation").get<std::string>()};
      if (ex.source_lang_label.empty() || ex.source_text.empty() ||
          ex.translation.empty()) {
        throw FormatError(line_no, "few-shot example fields must be non-empty");
      }
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(line_no, e.what());
    }
  }
  return out;
}

std::filesystem::path DefaultDataDir() { return REFLECT_DATA_DIR; }

PromptTemplates PromptTemplates::Load(const std::filesystem::path& dir) {
  PromptTemplates result;
  auto read = [&](const std::string& stem) {
    const auto path = dir / (stem + ".txt");
    if (!std::filesystem::is_regular_file(path)) throw FileNotFound(path);
    std::string body = text::ReadFile(path.string());
    if (!body.empty() && body.back() == '\n') body.pop_back();
    return body;
  };
  for (Strategy s : kAllStrategies) {
    for (int pass : {1, 2}) {
      const std::string key = TemplateKey(s, pass);
      std::string body = read(key);
      if (body.find(kStartDelimiter) == std::string::npos ||
          body.find(kEndDelimiter) == std::string::npos) {
        throw ConfigError(key, "template lacks translation delimiters");
      }
      if (pass == 2 && body.find(std::string(kReflectionSlot) +
                                 " {reflection}") == std::string::npos) {
        throw ConfigError(key, "template lacks the \"Reflection: {reflection}\" slot");
      }
      result.templates_[key] = std::move(body);
    }
  }
  result.templates_["reflection"] = read("reflection");
  return result;
}

const std::string& PromptTemplates::Template(Strategy strategy,
                                             int pass) const {
  return templates_.at(TemplateKey(strategy, pass));
}

PromptBundle PromptTemplates::RenderFirstPass(
    const SentencePair& pair, Strategy strategy,
    std::span<const FewShotExample> examples) const {
  const std::string& tmpl = Template(strategy, 1);
  if ((strategy == Strategy::kFewShot || NeedsExamples(tmpl)) &&
      examples.empty()) {
    throw MissingExamples();
  }
  std::map<std::string, std::string> values = {
      {"lang_name", LanguageName(pair.pair.source_lang())},
      {"source_text", pair.source_text}};
  if (NeedsExamples(tmpl)) values["examples"] = FormatExamples(examples);
  return {"", Substitute(tmpl, values), 1, strategy};
}

PromptBundle PromptTemplates::RenderSecondPass(
    const SentencePair& pair, Strategy strategy,
    std::string_view masked_reflection,
    std::span<const FewShotExample> examples) const {
  if (text::Trim(masked_reflection).empty()) throw EmptyReflection();
  const std::string& tmpl = Template(strategy, 2);
  std::map<std::string, std::string> values = {
      {"lang_name", LanguageName(pair.pair.source_lang())},
      {"source_text", pair.source_text},
      {"reflection", std::string(masked_reflection)}};
  if (NeedsExamples(tmpl)) {
    if (examples.empty()) throw MissingExamples();
    values["examples"] = FormatExamples(examples);
  }
  return {"", Substitute(tmpl, values), 2, strategy};
}

std::string PromptTemplates::RenderReflectionRequest(
    const SentencePair& pair, std::string_view draft) const {
  return Substitute(templates_.at("reflection"),
                    {{"lang_name", LanguageName(pair.pair.source_lang())},
                     {"source_text", pair.source_text},
                     {"draft", std::string(draft)}});
}

std::string ParseTranslation(std::string_view raw_model_output) {
  const std::size_t start = raw_model_output.find(kStartDelimiter);
  if (start == std::string_view::npos) {
    throw DelimiterMissing("no " + std::string(kStartDelimiter) +
                           " in model output");
  }
  const std::size_t body = start + kStartDelimiter.size();
  const std::size_t end = raw_model_output.find(kEndDelimiter, body);
  if (end == std::string_view::npos) {
    throw DelimiterMissing("no " + std::string(kEndDelimiter) + " after " +
                           std::string(kStartDelimiter));
  }
  const std::string_view span = text::Trim(raw_model_output.substr(body, end - body));
  if (span.empty()) throw EmptyTranslation();
  return std::string(span);
}

}  // namespace reflect
