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

#include <algorithm>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "reflect/config.h"
#include "reflect/pipeline.h"
#include "reflect/providers.h"
#include "reflect/report.h"
#include "reflect/text.h"

namespace reflect {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSentenceErrors = 2;

std::vector<double> ParseThresholds(const std::string& list) {
  std::vector<double> out;
  for (std::string_view part : text::Split(list, ',')) {
    const std::string item(text::Trim(part));
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("thresholds", "not a number: \"" + item + "\"");
    }
  }
  if (out.empty()) throw ConfigError("thresholds", "no thresholds given");
  return out;
}

std::vector<TranslationRecord> LoadLogs(const std::vector<std::string>& logs) {
  std::vector<TranslationRecord> records;
  for (const auto& log : logs) {
    auto part = LoadRecordLog(log);
    records.insert(records.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
  }
  return records;
}

std::filesystem::path OutDirFor(const std::string& out,
                                const std::string& first_log) {
  if (!out.empty()) return out;
  const auto parent = std::filesystem::path(first_log).parent_path();
  return parent.empty() ? std::filesystem::path(".") : parent;
}

void WriteReportArtifacts(const ScoreReport& report,
                          const std::filesystem::path& out_dir) {
  const RenderedTable table = RenderSignificanceTable(report);
  WriteTextFile(out_dir / "significance.txt", table.text);
  WriteTextFile(out_dir / "significance.csv", table.csv);
  const FigureData figures = RenderFigureData(report);
  WriteTextFile(out_dir / "strategy_comparison.csv",
                figures.strategy_comparison_csv);
  if (!report.sweep.empty()) {
    WriteTextFile(out_dir / "threshold_ablation.csv",
                  figures.threshold_ablation_csv);
  }
}

int ExecuteRun(RunConfig config, const std::string& out,
               std::shared_ptr<ChatProvider> provider, const char* verb) {
  if (!out.empty()) config.output_dir = out;
  config.Validate();
  PipelineDeps deps = MakePipelineDeps(config, std::move(provider));
  const RunOutcome outcome = RunPipeline(config, deps);
  const ScoreReport report = BuildScoreReport(outcome.records, config.Hash());
  WriteReportArtifacts(report, config.output_dir);

  const auto refined = std::count_if(
      outcome.records.begin(), outcome.records.end(),
      [](const TranslationRecord& r) { return r.revision.has_value(); });
  std::cout << verb << ": " << outcome.records.size() << " records ("
            << outcome.resumed << " resumed), " << refined << " refined, "
            << outcome.errors << " errors -> "
            << (config.output_dir / kRecordLogName).string() << "\n";
  return outcome.errors > 0 ? kExitSentenceErrors : kExitOk;
}

}  // namespace

int CliMain(int argc, char** argv) {
  CLI::App app{"Reflective translation runner and evaluation harness", "reflect"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::vector<std::string> logs;
  std::string thresholds = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
  std::string format = "text";
  std::string cassette;
  std::string gate_metric = "bleu";

  auto* run = app.add_subcommand("run", "Run the pipeline from a config file");
  run->add_option("--config", config_path, "Run config file")->required();
  run->add_option("--out", out, "Output directory (overrides output_dir)");

  auto* replay = app.add_subcommand("replay", "Re-run offline from a cassette");
  replay->add_option("--config", config_path, "Run config file")->required();
  replay->add_option("--cassette", cassette,
                     "Cassette to replay (defaults to the config's cassette)");
  replay->add_option("--out", out, "Output directory (overrides output_dir)");

  auto* sweep = app.add_subcommand("sweep", "Threshold ablation from a record log");
  sweep->add_option("--log", logs, "Record log of an always-refine run")
      ->required();
  sweep->add_option("--thresholds", thresholds, "Comma-separated, ascending");
  sweep->add_option("--gate-metric", gate_metric, "bleu or semantic");
  sweep->add_option("--out", out, "Output directory (defaults to the log's)");
  sweep->add_option("--format", format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}));

  auto* stats = app.add_subcommand("stats", "Wilcoxon table from record logs");
  stats->add_option("--log", logs, "Record log (repeatable)")->required();
  stats->add_option("--out", out, "Output directory (defaults to the log's)");
  stats->add_option("--format", format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}));

  auto* emit = app.add_subcommand("emit-tuples", "Write the tuple dataset");
  emit->add_option("--log", logs, "Record log")->required();
  emit->add_option("--out", out, "Output directory (defaults to the log's)");

  auto* validate = app.add_subcommand("validate-config", "Check a config file");
  validate->add_option("config,--config", config_path, "Run config file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*run) {
      const RunConfig config = LoadRunConfig(config_path);
      config.Validate();
      return ExecuteRun(config, out, MakeProvider(config), "run");
    }
    if (*replay) {
      RunConfig config = LoadRunConfig(config_path);
      const std::filesystem::path source =
          cassette.empty() ? config.cassette : std::filesystem::path(cassette);
      if (source.empty()) throw ConfigError("cassette", "is required for replay");
      config.cassette.clear();
      return ExecuteRun(config, out, MockProvider::FromFixture(source), "replay");
    }
    if (*sweep) {
      const auto records = LoadLogs(logs);
      const auto values = ParseThresholds(thresholds);
      ScoreReport report;
      report.config_hash = ConfigHashForLog(logs.front());
      report.sweep =
          RunThresholdSweep(records, values, ParseGateMetric(gate_metric));
      const FigureData figures = RenderFigureData(report);
      const auto dir = OutDirFor(out, logs.front());
      WriteTextFile(dir / "threshold_ablation.csv",
                    figures.threshold_ablation_csv);
      if (format == "csv") {
        std::cout << figures.threshold_ablation_csv;
      } else {
        for (const auto& s : report.sweep) {
          std::cout << "threshold " << s.threshold << ": coverage "
                    << s.coverage << " (" << s.n_refined << "/" << s.n_eligible
                    << ")\n";
        }
      }
      std::cout << "sweep: " << values.size() << " thresholds -> "
                << (dir / "threshold_ablation.csv").string() << "\n";
      return kExitOk;
    }
    if (*stats) {
      const auto records = LoadLogs(logs);
      const ScoreReport report =
          BuildScoreReport(records, ConfigHashForLog(logs.front()));
      const auto dir = OutDirFor(out, logs.front());
      WriteReportArtifacts(report, dir);
      const RenderedTable table = RenderSignificanceTable(report);
      std::cout << (format == "csv" ? table.csv : table.text);
      std::cout << "stats: " << records.size() << " records, "
                << report.metrics.size() << " metrics -> "
                << (dir / "significance.txt").string() << "\n";
      return kExitOk;
    }
    if (*emit) {
      const auto records = LoadLogs(logs);
      const auto path = OutDirFor(out, logs.front()) / "tuples.jsonl";
      if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
      }
      const std::size_t n = EmitTupleDataset(records, path);
      std::cout << "emit-tuples: " << n << " tuples -> " << path.string()
                << "\n";
      return kExitOk;
    }
    if (*validate) {
      const RunConfig config = LoadRunConfig(config_path);
      config.Validate();
      std::cout << "validate-config: ok (config_hash=" << config.Hash() << ")\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace reflect
