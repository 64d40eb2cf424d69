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

#include "reflect/pipeline.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "reflect/corpus.h"
#include "reflect/providers.h"
#include "reflect/text.h"

namespace reflect {
namespace {

// Sends `request`, re-sending the identical prompt once if the reply has no
// usable translation span.
std::string CompleteTranslation(LlmClient& client, const ModelSpec& spec,
                                const ChatRequest& request,
                                std::string* model_name) {
  for (int attempt = 0;; ++attempt) {
    const CompletionResult result = client.Complete(spec, request);
    if (model_name != nullptr) *model_name = result.model_name;
    try {
      return ParseTranslation(result.text);
    } catch (const DelimiterMissing&) {
      if (attempt >= 1) throw;
    } catch (const EmptyTranslation&) {
      if (attempt >= 1) throw;
    }
  }
}

struct Scores {
  std::optional<BleuScore> bleu;
  std::optional<SemanticScore> semantic;
};

// Scores `hypothesis`; a scorer failure is appended to `error` and leaves
// the semantic score empty.
Scores ScoreHypothesis(const RunConfig& config, PipelineDeps& deps,
                       const SentencePair& pair, const std::string& hypothesis,
                       const char* stage, std::optional<std::string>& error) {
  Scores s;
  s.bleu = SentenceBleu(hypothesis, pair.reference_text, config.bleu);
  if (deps.scorer) {
    try {
      s.semantic = ScoreSemantic(pair.source_text, hypothesis,
                                 pair.reference_text, *deps.scorer);
    } catch (const Error& e) {
      error = std::string(stage) + " scoring: " + e.what();
    }
  }
  return s;
}

std::string StageError(const char* stage, const std::exception& e) {
  return std::string(stage) + ": " + e.what();
}

std::vector<SentencePair> SampledPairs(const RunConfig& config) {
  const auto pairs = LoadCorpus(config.corpus, config.pair());
  if (pairs.empty()) throw EmptyCorpus();
  if (config.sample_size == 0) return pairs;
  return SampleCorpus(pairs, config.sample_size, config.seed);
}

// Drops a torn final line left by a crash and returns the complete records.
std::vector<TranslationRecord> ReadResumableLog(const std::filesystem::path& log) {
  const std::string content = text::ReadFile(log.string());
  const std::size_t keep =
      content.empty() || content.back() == '\n' ? content.size()
                                                : content.rfind('\n') + 1;
  if (keep != content.size()) {
    // rfind returns npos when there is no newline at all; npos + 1 == 0.
    std::filesystem::resize_file(log, keep);
  }
  return LoadRecordLog(log);
}

}  // namespace

std::shared_ptr<ChatProvider> MakeProvider(const RunConfig& config) {
  std::shared_ptr<ChatProvider> provider;
  switch (config.model.provider) {
    case Provider::kMock:
      provider = MockProvider::FromFixture(config.mock_fixture);
      break;
    case Provider::kOpenAiCompatible:
      provider = OpenAiProvider::FromEnvironment();
      break;
    case Provider::kAnthropicCompatible:
      provider = AnthropicProvider::FromEnvironment();
      break;
  }
  if (!config.cassette.empty()) {
    provider = std::make_shared<RecordingProvider>(provider, config.cassette);
  }
  return provider;
}

PipelineDeps MakePipelineDeps(const RunConfig& config,
                              std::shared_ptr<ChatProvider> provider) {
  ClientOptions options;
  options.retry.max_attempts = config.max_attempts;
  options.max_in_flight = config.max_parallel;
  options.requests_per_second = config.requests_per_second;
  options.seed = config.seed;

  const std::filesystem::path data = DefaultDataDir();
  PipelineDeps deps{
      std::make_shared<LlmClient>(std::move(provider), options),
      config.scorer_url.empty()
          ? nullptr
          : std::make_shared<HttpScorer>(config.scorer_url,
                                         static_cast<int>(config.model.request_timeout.count())),
      PromptTemplates::Load(config.template_dir.empty() ? data / "templates"
                                                        : config.template_dir),
      RakeConfig{},
      {}};
  deps.rake.stopwords = LoadStopwords(
      config.stopwords.empty() ? data / "stopwords" / "smart.txt" : config.stopwords);
  deps.rake.top_fraction = config.rake_top_fraction;
  deps.rake.max_phrases = config.rake_max_phrases;
  deps.rake.min_phrase_chars = config.rake_min_phrase_chars;
  if (!config.few_shot_examples.empty()) {
    deps.examples = LoadFewShotExamples(config.few_shot_examples);
  } else if (config.source_lang == "zu") {
    deps.examples = LoadFewShotExamples(data / "few_shot" / "zu.jsonl");
  }
  return deps;
}

std::optional<double> GateScore(const TranslationRecord& record,
                                GateMetric metric, bool revision) {
  if (metric == GateMetric::kBleu) {
    const auto& s = revision ? record.revision_bleu : record.draft_bleu;
    if (s) return s->score;
  } else if (metric == GateMetric::kSemantic) {
    const auto& s = revision ? record.revision_semantic : record.draft_semantic;
    if (s) return s->score;
  }
  return std::nullopt;
}

TranslationRecord ProcessSentence(const RunConfig& config, PipelineDeps& deps,
                                  const SentencePair& pair) {
  TranslationRecord r;
  r.id = pair.id;
  r.source_text = pair.source_text;
  r.reference_text = pair.reference_text;
  r.strategy = config.strategy;
  r.model_name = config.model.model_name;

  try {
    const PromptBundle first =
        deps.templates.RenderFirstPass(pair, config.strategy, deps.examples);
    r.draft = CompleteTranslation(*deps.client, config.model,
                                  MakeChatRequest(first, pair.id), &r.model_name);
  } catch (const std::exception& e) {
    r.error = StageError("draft", e);
    return r;
  }

  Scores draft_scores =
      ScoreHypothesis(config, deps, pair, *r.draft, "draft", r.error);
  r.draft_bleu = draft_scores.bleu;
  r.draft_semantic = draft_scores.semantic;

  bool refine = false;
  switch (config.gate_metric) {
    case GateMetric::kAlways:
      refine = true;
      break;
    case GateMetric::kNever:
      refine = false;
      break;
    case GateMetric::kBleu:
    case GateMetric::kSemantic: {
      const auto score = GateScore(r, config.gate_metric, false);
      refine = score && *score < config.gate_threshold;
      break;
    }
  }
  if (!refine) return r;
  r.gated = true;

  try {
    r.reflection =
        MaskReflection(GenerateReflection(*deps.client, config.model,
                                          deps.templates, pair, config.strategy,
                                          *r.draft),
                       deps.rake);
  } catch (const std::exception& e) {
    r.error = StageError("reflection", e);
    return r;
  }

  try {
    const PromptBundle second = deps.templates.RenderSecondPass(
        pair, config.strategy, r.reflection->masked_text, deps.examples);
    r.revision = CompleteTranslation(*deps.client, config.model,
                                     MakeChatRequest(second, pair.id), nullptr);
  } catch (const std::exception& e) {
    r.error = StageError("revision", e);
    return r;
  }

  Scores revision_scores =
      ScoreHypothesis(config, deps, pair, *r.revision, "revision", r.error);
  r.revision_bleu = revision_scores.bleu;
  r.revision_semantic = revision_scores.semantic;
  return r;
}

RunOutcome RunPipeline(const RunConfig& config, PipelineDeps& deps,
                       const RunOptions& options) {
  config.Validate();
  if (config.strategy == Strategy::kFewShot && deps.examples.empty()) {
    throw ConfigError("few_shot_examples",
                      "few_shot strategy needs examples for \"" +
                          config.source_lang + "\"");
  }
  if (config.gate_metric == GateMetric::kSemantic && !deps.scorer) {
    throw ConfigError("scorer_url", "is required when gate_metric = semantic");
  }
  if (deps.scorer) deps.scorer->ScorerId();  // fail fast when unreachable

  const std::vector<SentencePair> sample = SampledPairs(config);

  std::filesystem::create_directories(config.output_dir);
  const auto log_path = config.output_dir / kRecordLogName;
  const auto meta_path = config.output_dir / kRunMetaName;

  RunOutcome outcome;
  if (std::filesystem::exists(log_path)) {
    std::string previous_hash;
    if (std::filesystem::exists(meta_path)) {
      previous_hash = nlohmann::json::parse(text::ReadFile(meta_path.string()))
                          .value("config_hash", std::string());
    }
    if (previous_hash != config.Hash()) {
      throw ConfigError("output_dir",
                        "holds a record log from a different configuration");
    }
    outcome.records = ReadResumableLog(log_path);
    if (outcome.records.size() > sample.size()) {
      throw ConfigError("output_dir", "record log is longer than the sample");
    }
    for (std::size_t i = 0; i < outcome.records.size(); ++i) {
      if (outcome.records[i].id != sample[i].id) {
        throw ConfigError("output_dir", "record log does not match the sample at " +
                                            outcome.records[i].id);
      }
    }
    outcome.resumed = outcome.records.size();
  } else {
    nlohmann::ordered_json meta = {{"config_hash", config.Hash()},
                                   {"config", config.Canonical()}};
    std::ofstream(meta_path, std::ios::trunc) << meta.dump(2) << '\n';
  }

  std::ofstream log(log_path, std::ios::binary | std::ios::app);
  if (!log) throw IoError("cannot append to " + log_path.string());

  const std::size_t total = sample.size();
  std::vector<std::optional<TranslationRecord>> done(total);
  std::atomic<std::size_t> next{outcome.resumed};
  std::atomic<bool> stop{false};
  std::mutex commit_mu;
  std::size_t commit = outcome.resumed;
  std::size_t committed_now = 0;

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      TranslationRecord record = ProcessSentence(config, deps, sample[i]);

      std::lock_guard lock(commit_mu);
      if (stop.load()) return;
      done[i] = std::move(record);
      // Commit strictly in sampling order regardless of completion order.
      while (commit < total && done[commit]) {
        log << DumpLine(RecordToJson(*done[commit])) << '\n';
        log.flush();
        ++commit;
        ++committed_now;
        if (options.stop_after && committed_now >= *options.stop_after) {
          stop.store(true);
          return;
        }
      }
    }
  };

  const std::size_t remaining = total - outcome.resumed;
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.max_parallel), remaining);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  if (threads > 0) worker();
  for (auto& t : pool) t.join();

  if (!log) throw IoError("write failed for " + log_path.string());
  if (stop.load() && commit < total) throw RunInterrupted(committed_now);

  for (std::size_t i = outcome.resumed; i < total; ++i) {
    outcome.records.push_back(std::move(*done[i]));
  }
  outcome.errors = static_cast<std::size_t>(
      std::count_if(outcome.records.begin(), outcome.records.end(),
                    [](const TranslationRecord& r) { return r.error.has_value(); }));
  return outcome;
}

std::vector<SweepResult> RunThresholdSweep(
    std::span<const TranslationRecord> records,
    std::span<const double> thresholds, GateMetric gate_metric) {
  if (gate_metric != GateMetric::kBleu && gate_metric != GateMetric::kSemantic) {
    throw ConfigError("gate_metric", "sweeps need a score (bleu or semantic)");
  }
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw ConfigError("thresholds", "must be sorted ascending");
  }
  std::vector<const TranslationRecord*> eligible;
  bool has_semantic = false;
  for (const auto& r : records) {
    if (!r.error && !r.gated) {
      throw MissingBaseRun("record " + r.id +
                           " was not refined; sweeps need a gate_metric = "
                           "always base run");
    }
    if (r.draft_semantic) has_semantic = true;
    if (!r.error && GateScore(r, gate_metric, false) &&
        GateScore(r, gate_metric, true)) {
      eligible.push_back(&r);
    }
  }
  if (eligible.empty()) {
    throw MissingBaseRun("no records with both passes scored");
  }

  struct Metric {
    const char* label;
    GateMetric key;
  };
  std::vector<Metric> metrics = {{"BLEU", GateMetric::kBleu}};
  if (has_semantic) metrics.push_back({"COMET", GateMetric::kSemantic});

  std::vector<SweepResult> results;
  for (double t : thresholds) {
    SweepResult s;
    s.threshold = t;
    s.n_eligible = eligible.size();
    std::vector<const TranslationRecord*> refined;
    for (const auto* r : eligible) {
      if (*GateScore(*r, gate_metric, false) < t) refined.push_back(r);
    }
    s.n_refined = refined.size();
    s.coverage = static_cast<double>(refined.size()) /
                 static_cast<double>(eligible.size());
    for (const Metric& m : metrics) {
      double before = 0.0;
      double after = 0.0;
      std::size_t n = 0;
      for (const auto* r : refined) {
        const auto b = GateScore(*r, m.key, false);
        const auto a = GateScore(*r, m.key, true);
        if (!b || !a) continue;
        before += *b;
        after += *a;
        ++n;
      }
      MetricAverages avg;
      if (n > 0) {
        avg.before = before / static_cast<double>(n);
        avg.after = after / static_cast<double>(n);
      }
      s.averages[m.label] = avg;
    }
    results.push_back(std::move(s));
  }
  return results;
}

}  // namespace reflect
