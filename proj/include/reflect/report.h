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

#ifndef REFLECT_REPORT_H_
#define REFLECT_REPORT_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reflect/pipeline.h"
#include "reflect/record.h"
#include "reflect/stats.h"

namespace reflect {

inline constexpr const char* kBleuLabel = "BLEU";
inline constexpr const char* kSemanticLabel = "COMET";

// Pooled first- vs second-pass comparison for one metric.
struct MetricReport {
  std::string metric;
  std::size_t n_first = 0;       // drafts scored
  double first_pass_mean = 0.0;  // over all n_first drafts
  std::size_t n = 0;             // records with both passes scored
  double paired_first_mean = 0.0;
  double paired_second_mean = 0.0;
  double mean_gain = 0.0;
  std::optional<WilcoxonResult> wilcoxon;  // absent when n == 0 or no gain
};

// One bar of the strategy comparison: mean score of a pass.
struct StrategyMean {
  std::string strategy;
  std::string metric;
  int pass = 1;
  double mean = 0.0;
  std::size_t n = 0;
};

struct ScoreReport {
  std::string config_hash = "unknown";
  std::vector<MetricReport> metrics;
  std::vector<StrategyMean> strategy_means;
  std::vector<SweepResult> sweep;
};

// Paired (draft, revision) scores for `metric` ("BLEU"/"COMET"), optionally
// restricted to one strategy.
PairedSample PairedScores(std::span<const TranslationRecord> records,
                          const std::string& metric,
                          const std::optional<Strategy>& strategy = {});

ScoreReport BuildScoreReport(std::span<const TranslationRecord> records,
                             std::string config_hash);

// Cell formats of the significance table.
std::string FormatMedianGain(double gain);  // "+0.0788"
std::string FormatPValue(double p);         // "1.45e-44"
std::string FormatEffectSize(double r);     // "0.95", "-0.50"

struct RenderedTable {
  std::string text;
  std::string csv;
};

// Columns: Metric, N, Median Gain, p-value, Effect Size (r).
RenderedTable RenderSignificanceTable(const ScoreReport& report);

struct FigureData {
  std::string strategy_comparison_csv;  // strategy,metric,pass,mean
  std::string threshold_ablation_csv;   // threshold,metric,coverage,avg_before,avg_after
};

FigureData RenderFigureData(const ScoreReport& report);

// Config hash recorded next to a record log, or "unknown".
std::string ConfigHashForLog(const std::filesystem::path& log);

void WriteTextFile(const std::filesystem::path& path, const std::string& body);

// Entry point of the command-line tool; returns the process exit code.
// 0 success, 1 usage/config error, 2 run finished with per-sentence errors.
int CliMain(int argc, char** argv);

}  // namespace reflect

#endif  // REFLECT_REPORT_H_
