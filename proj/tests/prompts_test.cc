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

#include <gtest/gtest.h>

#include <random>

#include "reflect/corpus.h"
#include "reflect/text.h"
#include "test_support.h"

namespace reflect {
namespace {

class PromptsTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    templates_ = new PromptTemplates(
        PromptTemplates::Load(DefaultDataDir() / "templates"));
    examples_ = new std::vector<FewShotExample>(
        LoadFewShotExamples(DefaultDataDir() / "few_shot" / "zu.jsonl"));
  }
  static void TearDownTestSuite() {
    delete templates_;
    delete examples_;
  }

  static SentencePair Pair(const std::string& source) {
    return {"t:0", source, "ref", LanguagePair("zu", "en"), "t"};
  }

  static PromptTemplates* templates_;
  static std::vector<FewShotExample>* examples_;
};

PromptTemplates* PromptsTest::templates_ = nullptr;
std::vector<FewShotExample>* PromptsTest::examples_ = nullptr;

TEST_F(PromptsTest, BaselineFirstPassIsVerbatim) {
  const auto b = templates_->RenderFirstPass(Pair("Ngiyabonga."),
                                             Strategy::kBaseline, {});
  EXPECT_EQ(b.user_text,
            "Source (isiZulu): Ngiyabonga.\n"
            "You are a professional translator. Translate the given text "
            "accurately into English. Preserve the original meaning, tone, and "
            "nuance.\n"
            "Output format (exact):\n"
            "Translation:\n"
            "<START_TRANSLATION>\n"
            "<your English translation here>\n"
            "<END_TRANSLATION>\n"
            "Do NOT include any explanations.");
  EXPECT_EQ(b.pass_number, 1);
  EXPECT_EQ(b.strategy, Strategy::kBaseline);
  EXPECT_TRUE(b.system_text.empty());
}

TEST_F(PromptsTest, FewShotFirstPassIsVerbatim) {
  const auto b = templates_->RenderFirstPass(Pair("Sawubona."),
                                             Strategy::kFewShot, *examples_);
  EXPECT_EQ(b.user_text,
            "Source (isiZulu): Sawubona.\n"
            "You are a professional translator. Translate the following text "
            "into English accurately.\n"
            "Here are examples for guidance:\n"
            "Source (isiZulu): Ngiyabonga kakhulu.\n"
            "Translation: Thank you very much.\n"
            "Source (isiZulu): Unjani namhlanje?\n"
            "Translation: How are you today?\n"
            "Output format:\n"
            "Translation:\n"
            "<START_TRANSLATION>\n"
            "<your English translation here>\n"
            "<END_TRANSLATION>");
}

TEST_F(PromptsTest, BriefReasoningFirstPassIsVerbatim) {
  const auto b = templates_->RenderFirstPass(Pair("Yebo."),
                                             Strategy::kBriefReasoning, {});
  EXPECT_EQ(b.user_text,
            "Translate the following isiZulu text into English.\n"
            "Before giving the final answer, perform brief internal reasoning. "
            "Do NOT reveal your reasoning.\n"
            "Source (isiZulu): Yebo.\n"
            "Output format:\n"
            "Translation:\n"
            "<START_TRANSLATION>\n"
            "<your English translation here>\n"
            "<END_TRANSLATION>");
}

TEST_F(PromptsTest, BaselineSecondPassIsVerbatim) {
  const std::string reflection = "Fix tense; preserve the name <MASK>.";
  const auto b = templates_->RenderSecondPass(Pair("Ngiyabonga."),
                                              Strategy::kBaseline, reflection);
  EXPECT_EQ(b.user_text,
            "Source (isiZulu): Ngiyabonga.\n"
            "You are a professional translator. Based on the following review "
            "and reflection, provide an improved translation.\n"
            "Reflection: Fix tense; preserve the name <MASK>.\n"
            "Output format (exact):\n"
            "Translation:\n"
            "<START_TRANSLATION>\n"
            "<your improved English translation here>\n"
            "<END_TRANSLATION>\n"
            "Do NOT include explanations.");
  EXPECT_EQ(b.pass_number, 2);
}

TEST_F(PromptsTest, EveryBundleCarriesDelimitersAndSlot) {
  for (Strategy s : {Strategy::kBaseline, Strategy::kBriefReasoning,
                     Strategy::kFewShot}) {
    const auto first = templates_->RenderFirstPass(Pair("a"), s, *examples_);
    const auto second =
        templates_->RenderSecondPass(Pair("a"), s, "note {source_text}", *examples_);
    for (const auto* b : {&first, &second}) {
      EXPECT_NE(b->user_text.find(kStartDelimiter), std::string::npos);
      EXPECT_NE(b->user_text.find(kEndDelimiter), std::string::npos);
    }
    EXPECT_NE(second.user_text.find("Reflection: note {source_text}\n"),
              std::string::npos)
        << StrategyName(s);
    EXPECT_EQ(second.pass_number, 2);
    EXPECT_EQ(second.strategy, s);
  }
}

TEST_F(PromptsTest, RenderingIsPure) {
  const auto a = templates_->RenderFirstPass(Pair("x"), Strategy::kFewShot, *examples_);
  const auto b = templates_->RenderFirstPass(Pair("x"), Strategy::kFewShot, *examples_);
  EXPECT_EQ(a, b);
}

TEST_F(PromptsTest, Errors) {
  EXPECT_THROW(templates_->RenderFirstPass(Pair("x"), Strategy::kFewShot, {}),
               MissingExamples);
  EXPECT_THROW(templates_->RenderSecondPass(Pair("x"), Strategy::kBaseline, " \n"),
               EmptyReflection);
  EXPECT_THROW(templates_->RenderSecondPass(Pair("x"), Strategy::kFewShot, "r"),
               MissingExamples);
  SentencePair unnamed = {"t:0", "x", "y", LanguagePair("st", "en"), "t"};
  EXPECT_THROW(templates_->RenderFirstPass(unnamed, Strategy::kBaseline, {}),
               ConfigError);
}

TEST_F(PromptsTest, ReflectionRequestNamesDraft) {
  const std::string req = templates_->RenderReflectionRequest(Pair("Yebo."), "Yes.");
  EXPECT_NE(req.find("Source (isiZulu): Yebo."), std::string::npos);
  EXPECT_NE(req.find("Yes."), std::string::npos);
  for (const char* h : {"ERRORS:", "FIXES:", "CRITICAL:"}) {
    EXPECT_NE(req.find(h), std::string::npos) << h;
  }
}

TEST(TemplateLoadTest, RejectsTemplatesWithoutDelimiters) {
  testing::TempDir dir;
  for (const auto& entry :
       std::filesystem::directory_iterator(DefaultDataDir() / "templates")) {
    std::filesystem::copy_file(entry.path(), dir / entry.path().filename().string());
  }
  EXPECT_NO_THROW(PromptTemplates::Load(dir.path()));
  dir.Write("baseline_2.txt", "Reflection: {reflection}\nno delimiters\n");
  try {
    PromptTemplates::Load(dir.path());
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "baseline_2");
  }
  std::filesystem::remove(dir / "baseline_2.txt");
  EXPECT_THROW(PromptTemplates::Load(dir.path()), FileNotFound);
}

TEST(SubstituteTest, SinglePass) {
  EXPECT_EQ(Substitute("{a}-{b}-{c}", {{"a", "{b}"}, {"b", "2"}}), "{b}-2-{c}");
  EXPECT_EQ(Substitute("{ {a}}", {{"a", "x"}}), "{ x}");
}

TEST(LanguageNameTest, Table) {
  EXPECT_EQ(LanguageName("zu"), "isiZulu");
  EXPECT_EQ(LanguageName("xh"), "isiXhosa");
  EXPECT_EQ(LanguageName("en"), "English");
  EXPECT_THROW(LanguageName("fr"), ConfigError);
}

TEST(StrategyTest, Names) {
  for (Strategy s : {Strategy::kBaseline, Strategy::kBriefReasoning,
                     Strategy::kFewShot}) {
    EXPECT_EQ(ParseStrategy(StrategyName(s)), s);
  }
  EXPECT_THROW(ParseStrategy("cot"), ConfigError);
}

TEST(ParseTranslationTest, Examples) {
  EXPECT_EQ(ParseTranslation(
                "Translation:\n<START_TRANSLATION>\nHello world\n<END_TRANSLATION>"),
            "Hello world");
  EXPECT_THROW(ParseTranslation("<START_TRANSLATION><END_TRANSLATION>"),
               EmptyTranslation);
  EXPECT_THROW(ParseTranslation("<START_TRANSLATION> \n\t <END_TRANSLATION>"),
               EmptyTranslation);
  EXPECT_EQ(ParseTranslation("<START_TRANSLATION>first<END_TRANSLATION>\n"
                             "<START_TRANSLATION>second<END_TRANSLATION>"),
            "first");
  EXPECT_EQ(ParseTranslation("<START_TRANSLATION>\n line one\n\n  line two \n"
                             "<END_TRANSLATION>"),
            "line one\n\n  line two");
}

TEST(ParseTranslationTest, MissingDelimiters) {
  EXPECT_THROW(ParseTranslation("Hello"), DelimiterMissing);
  EXPECT_THROW(ParseTranslation("<START_TRANSLATION>Hello"), DelimiterMissing);
  EXPECT_THROW(ParseTranslation("Hello<END_TRANSLATION>"), DelimiterMissing);
  EXPECT_THROW(ParseTranslation("<END_TRANSLATION>x<START_TRANSLATION>"),
               DelimiterMissing);
}

TEST(ParseTranslationTest, RoundTripProperty) {
  std::mt19937_64 rng(2024);
  const std::string alphabet = "abcXYZ019 .,;:!?'\"<>/\\\t\n-_{}()ñé";
  std::uniform_int_distribution<std::size_t> len(1, 60);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string t;
    const std::size_t n = len(rng);
    for (std::size_t k = 0; k < n; ++k) t += alphabet[pick(rng)];
    // Only payloads that are already trimmed can round-trip.
    const auto trimmed = std::string(text::Trim(t));
    if (trimmed.empty()) continue;
    const std::string wrapped = "Translation:\n" + std::string(kStartDelimiter) +
                                "\n" + trimmed + "\n" +
                                std::string(kEndDelimiter) + "\n";
    ASSERT_EQ(ParseTranslation(wrapped), trimmed);
    ++checked;
  }
  EXPECT_GT(checked, 1500);
}

}  // namespace
}  // namespace reflect
