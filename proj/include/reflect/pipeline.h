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

#ifndef REFLECT_PIPELINE_H_
#define REFLECT_PIPELINE_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reflect/config.h"
#include "reflect/llm_client.h"
#include "reflect/metrics.h"
#include "reflect/prompts.h"
#include "reflect/record.h"
#include "reflect/reflection.h"

namespace reflect {

// Collaborators of a run, built from a RunConfig by MakePipelineDeps or
// assembled by hand in tests.
struct PipelineDeps {
  std::shared_ptr<LlmClient> client;
  std::shared_ptr<SemanticScorer> scorer;  // null disables semantic scoring
  PromptTemplates templates;
  RakeConfig rake;
  std::vector<FewShotExample> examples;
};

// Builds the provider stack named by the config: mock fixture, or a live
// dialect optionally wrapped in a cassette recorder.
std::shared_ptr<ChatProvider> MakeProvider(const RunConfig& config);

PipelineDeps MakePipelineDeps(const RunConfig& config,
                              std::shared_ptr<ChatProvider> provider);

struct RunOptions {
  // Stops after this many records are committed in this session, as if
  // the process had been killed (throws RunInterrupted).
  std::optional<std::size_t> stop_after;
};

class RunInterrupted : public Error {
 public:
  explicit RunInterrupted(std::size_t committed)
      : Error("run interrupted after " + std::to_string(committed) +
              " records"),
        committed_(committed) {}
  std::size_t committed() const { return committed_; }

 private:
  std::size_t committed_;
};

struct RunOutcome {
  std::vector<TranslationRecord> records;  // corpus sampling order
  std::size_t resumed = 0;  // records taken from an existing log
  std::size_t errors = 0;   // records carrying an error annotation
};

inline constexpr const char* kRecordLogName = "records.jsonl";
inline constexpr const char* kRunMetaName = "run_meta.json";

// Translates, scores, gates, reflects and revises every sampled sentence.
// Records are appended to <output_dir>/records.jsonl in sampling order as
// they complete; an existing log from the same configuration is resumed.
RunOutcome RunPipeline(const RunConfig& config, PipelineDeps& deps,
                       const RunOptions& options = {});

// Processes a single sentence; never throws for provider, parse or scorer
// failures (they land in `error`).
TranslationRecord ProcessSentence(const RunConfig& config, PipelineDeps& deps,
                                  const SentencePair& pair);

// Score used by the gate, if available.
std::optional<double> GateScore(const TranslationRecord& record,
                                GateMetric metric, bool revision);

struct MetricAverages {
  std::optional<double> before;
  std::optional<double> after;
};

struct SweepResult {
  double threshold = 0.0;
  double coverage = 0.0;
  std::size_t n_refined = 0;
  std::size_t n_eligible = 0;
  // Keyed by metric label ("BLEU", "COMET"); averages over refined records.
  std::map<std::string, MetricAverages> averages;
};

class MissingBaseRun : public Error {
 public:
  using Error::Error;
};

// Threshold ablation over an always-refine run: for each threshold t the
// refined set is every eligible record whose draft gate score is below t.
// No model calls are made.
std::vector<SweepResult> RunThresholdSweep(
    std::span<const TranslationRecord> records,
    std::span<const double> thresholds, GateMetric gate_metric = GateMetric::kBleu);

}  // namespace reflect

#endif  // REFLECT_PIPELINE_H_
