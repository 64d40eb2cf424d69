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

#include "reflect/config.h"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "reflect/text.h"

namespace reflect {
namespace {

std::filesystem::path ResolvePath(const std::string& value,
                                  const std::filesystem::path& base_dir) {
  if (value.empty()) return {};
  std::filesystem::path p(value);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

double ToDouble(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got \"" + value + "\"");
  }
}

template <typename Int>
Int ToInt(const std::string& key, const std::string& value) {
  Int v{};
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(key, "expected an integer, got \"" + value + "\"");
  }
  return v;
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::string GateMetricName(GateMetric gate) {
  switch (gate) {
    case GateMetric::kBleu:
      return "bleu";
    case GateMetric::kSemantic:
      return "semantic";
    case GateMetric::kAlways:
      return "always";
    case GateMetric::kNever:
      return "never";
  }
  return "always";
}

GateMetric ParseGateMetric(const std::string& name) {
  for (GateMetric g : {GateMetric::kBleu, GateMetric::kSemantic,
                       GateMetric::kAlways, GateMetric::kNever}) {
    if (GateMetricName(g) == name) return g;
  }
  throw ConfigError("gate_metric", "unknown gate metric \"" + name +
                                       "\" (expected bleu, semantic, always "
                                       "or never)");
}

void RunConfig::Validate() const {
  model.Validate();
  (void)pair();
  LanguageName(source_lang);
  if (max_attempts < 1) throw ConfigError("max_attempts", "must be at least 1");
  if (requests_per_second < 0) {
    throw ConfigError("requests_per_second", "must not be negative");
  }
  if (corpus.path.empty()) throw ConfigError("corpus", "is required");
  if (corpus.format == CorpusFormat::kMosesPair && corpus.target_path.empty()) {
    throw ConfigError("corpus_target", "is required for moses-pair corpora");
  }
  if ((gate_metric == GateMetric::kBleu ||
       gate_metric == GateMetric::kSemantic) &&
      !(gate_threshold >= 0.0 && gate_threshold <= 1.0)) {
    throw ConfigError("gate_threshold", "must be within [0, 1]");
  }
  if (gate_metric == GateMetric::kSemantic && scorer_url.empty()) {
    throw ConfigError("scorer_url", "is required when gate_metric = semantic");
  }
  bleu.Validate();
  if (max_parallel < 1) throw ConfigError("max_parallel", "must be at least 1");
  if (model.provider == Provider::kMock && mock_fixture.empty()) {
    throw ConfigError("mock_fixture", "is required for the mock provider");
  }
  if (output_dir.empty()) throw ConfigError("output_dir", "is required");
  if (!(rake_top_fraction > 0.0 && rake_top_fraction <= 1.0)) {
    throw ConfigError("rake_top_fraction", "must be within (0, 1]");
  }
  if (rake_max_phrases < 1) {
    throw ConfigError("rake_max_phrases", "must be at least 1");
  }
}

std::string RunConfig::Canonical() const {
  std::map<std::string, std::string> kv = {
      {"provider", ProviderName(model.provider)},
      {"model", model.model_name},
      {"temperature", FormatDouble(model.temperature)},
      {"max_output_tokens", std::to_string(model.max_output_tokens)},
      {"request_timeout", std::to_string(model.request_timeout.count())},
      {"base_url", model.base_url},
      {"max_attempts", std::to_string(max_attempts)},
      {"requests_per_second", FormatDouble(requests_per_second)},
      {"strategy", StrategyName(strategy)},
      {"source_lang", source_lang},
      {"target_lang", target_lang},
      {"corpus", corpus.path.string()},
      {"corpus_target", corpus.target_path.string()},
      {"corpus_format", CorpusFormatName(corpus.format)},
      {"corpus_name", corpus.corpus_name},
      {"sample_size", std::to_string(sample_size)},
      {"seed", std::to_string(seed)},
      {"gate_metric", GateMetricName(gate_metric)},
      {"gate_threshold", FormatDouble(gate_threshold)},
      {"bleu_max_order", std::to_string(bleu.max_order)},
      {"bleu_smoothing", SmoothingName(bleu.smoothing)},
      {"bleu_tokenizer", BleuTokenizerName(bleu.tokenizer)},
      {"scorer_url", scorer_url},
      {"template_dir", template_dir.string()},
      {"stopwords", stopwords.string()},
      {"few_shot_examples", few_shot_examples.string()},
      {"rake_top_fraction", FormatDouble(rake_top_fraction)},
      {"rake_max_phrases", std::to_string(rake_max_phrases)},
      {"rake_min_phrase_chars", std::to_string(rake_min_phrase_chars)},
  };
  // Output location, parallelism, fixture and cassette paths do not change
  // what a run computes, so they stay out of the hash.
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string RunConfig::Hash() const {
  return text::Hex64(text::Fnv1a64(Canonical()));
}

RunConfig ParseRunConfig(const std::string& content,
                         const std::filesystem::path& base_dir) {
  RunConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"provider", [&](auto&, auto& v) { c.model.provider = ParseProvider(v); }},
      {"model", [&](auto&, auto& v) { c.model.model_name = v; }},
      {"temperature",
       [&](auto& k, auto& v) { c.model.temperature = ToDouble(k, v); }},
      {"max_output_tokens",
       [&](auto& k, auto& v) { c.model.max_output_tokens = ToInt<int>(k, v); }},
      {"request_timeout",
       [&](auto& k, auto& v) {
         c.model.request_timeout = std::chrono::seconds(ToInt<int>(k, v));
       }},
      {"base_url", [&](auto&, auto& v) { c.model.base_url = v; }},
      {"max_attempts", [&](auto& k, auto& v) { c.max_attempts = ToInt<int>(k, v); }},
      {"requests_per_second",
       [&](auto& k, auto& v) { c.requests_per_second = ToDouble(k, v); }},
      {"strategy", [&](auto&, auto& v) { c.strategy = ParseStrategy(v); }},
      {"source_lang", [&](auto&, auto& v) { c.source_lang = v; }},
      {"target_lang", [&](auto&, auto& v) { c.target_lang = v; }},
      {"corpus", [&](auto&, auto& v) { c.corpus.path = ResolvePath(v, base_dir); }},
      {"corpus_target",
       [&](auto&, auto& v) { c.corpus.target_path = ResolvePath(v, base_dir); }},
      {"corpus_format",
       [&](auto&, auto& v) { c.corpus.format = ParseCorpusFormat(v); }},
      {"corpus_name", [&](auto&, auto& v) { c.corpus.corpus_name = v; }},
      {"sample_size",
       [&](auto& k, auto& v) { c.sample_size = ToInt<std::size_t>(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = ToInt<uint64_t>(k, v); }},
      {"gate_metric", [&](auto&, auto& v) { c.gate_metric = ParseGateMetric(v); }},
      {"gate_threshold",
       [&](auto& k, auto& v) { c.gate_threshold = ToDouble(k, v); }},
      {"bleu_max_order",
       [&](auto& k, auto& v) { c.bleu.max_order = ToInt<int>(k, v); }},
      {"bleu_smoothing",
       [&](auto&, auto& v) { c.bleu.smoothing = ParseSmoothing(v); }},
      {"bleu_tokenizer",
       [&](auto&, auto& v) { c.bleu.tokenizer = ParseBleuTokenizer(v); }},
      {"scorer_url", [&](auto&, auto& v) { c.scorer_url = v; }},
      {"output_dir",
       [&](auto&, auto& v) { c.output_dir = ResolvePath(v, base_dir); }},
      {"max_parallel", [&](auto& k, auto& v) { c.max_parallel = ToInt<int>(k, v); }},
      {"mock_fixture",
       [&](auto&, auto& v) { c.mock_fixture = ResolvePath(v, base_dir); }},
      {"cassette", [&](auto&, auto& v) { c.cassette = ResolvePath(v, base_dir); }},
      {"template_dir",
       [&](auto&, auto& v) { c.template_dir = ResolvePath(v, base_dir); }},
      {"stopwords", [&](auto&, auto& v) { c.stopwords = ResolvePath(v, base_dir); }},
      {"few_shot_examples",
       [&](auto&, auto& v) { c.few_shot_examples = ResolvePath(v, base_dir); }},
      {"rake_top_fraction",
       [&](auto& k, auto& v) { c.rake_top_fraction = ToDouble(k, v); }},
      {"rake_max_phrases",
       [&](auto& k, auto& v) { c.rake_max_phrases = ToInt<std::size_t>(k, v); }},
      {"rake_min_phrase_chars",
       [&](auto& k, auto& v) { c.rake_min_phrase_chars = ToInt<std::size_t>(k, v); }},
  };

  std::size_t line_no = 0;
  for (std::string_view raw : text::Split(content, '\n')) {
    ++line_no;
    std::string_view line = text::Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no),
                        "expected \"key = value\"");
    }
    const std::string key(text::Trim(line.substr(0, eq)));
    const std::string value(text::Trim(line.substr(eq + 1)));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(key, "unknown key");
    it->second(key, value);
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw FileNotFound(path);
  return ParseRunConfig(text::ReadFile(path.string()), path.parent_path());
}

}  // namespace reflect
