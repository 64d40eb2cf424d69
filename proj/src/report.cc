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

#include "reflect/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "reflect/text.h"

namespace reflect {
namespace {

std::optional<double> MetricScore(const TranslationRecord& r,
                                  const std::string& metric, bool revision) {
  return GateScore(r, metric == kBleuLabel ? GateMetric::kBleu
                                           : GateMetric::kSemantic,
                   revision);
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string Exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Header(const std::string& hash) {
  return "# config_hash=" + hash + "\n";
}

std::vector<std::string> MetricsPresent(
    std::span<const TranslationRecord> records) {
  std::vector<std::string> metrics = {kBleuLabel};
  if (std::any_of(records.begin(), records.end(), [](const auto& r) {
        return r.draft_semantic.has_value();
      })) {
    metrics.push_back(kSemanticLabel);
  }
  return metrics;
}

}  // namespace

PairedSample PairedScores(std::span<const TranslationRecord> records,
                          const std::string& metric,
                          const std::optional<Strategy>& strategy) {
  PairedSample sample;
  sample.metric_name = metric;
  for (const auto& r : records) {
    if (strategy && r.strategy != *strategy) continue;
    const auto before = MetricScore(r, metric, false);
    const auto after = MetricScore(r, metric, true);
    if (!before || !after) continue;
    sample.first_pass.push_back(*before);
    sample.second_pass.push_back(*after);
  }
  return sample;
}

ScoreReport BuildScoreReport(std::span<const TranslationRecord> records,
                             std::string config_hash) {
  ScoreReport report;
  report.config_hash = std::move(config_hash);
  const auto metrics = MetricsPresent(records);

  for (const std::string& metric : metrics) {
    MetricReport m;
    m.metric = metric;
    std::vector<double> drafts;
    for (const auto& r : records) {
      if (auto s = MetricScore(r, metric, false)) drafts.push_back(*s);
    }
    m.n_first = drafts.size();
    m.first_pass_mean = Mean(drafts);
    const PairedSample paired = PairedScores(records, metric);
    m.n = paired.first_pass.size();
    if (m.n > 0) {
      m.paired_first_mean = Mean(paired.first_pass);
      m.paired_second_mean = Mean(paired.second_pass);
      m.mean_gain = SummarizeGains(paired).mean_gain;
      try {
        m.wilcoxon = WilcoxonSignedRank(paired);
      } catch (const AllZeroDifferences&) {
      }
    }
    report.metrics.push_back(std::move(m));
  }

  std::vector<Strategy> strategies;
  for (const auto& r : records) {
    if (std::find(strategies.begin(), strategies.end(), r.strategy) ==
        strategies.end()) {
      strategies.push_back(r.strategy);
    }
  }
  std::sort(strategies.begin(), strategies.end(), [](Strategy a, Strategy b) {
    return StrategyName(a) < StrategyName(b);
  });
  for (Strategy strategy : strategies) {
    for (const std::string& metric : metrics) {
      const PairedSample paired = PairedScores(records, metric, strategy);
      if (!paired.first_pass.empty()) {
        report.strategy_means.push_back({StrategyName(strategy), metric, 1,
                                         Mean(paired.first_pass),
                                         paired.first_pass.size()});
        report.strategy_means.push_back({StrategyName(strategy), metric, 2,
                                         Mean(paired.second_pass),
                                         paired.second_pass.size()});
        continue;
      }
      // First pass only (e.g. gate_metric = never).
      std::vector<double> drafts;
      for (const auto& r : records) {
        if (r.strategy != strategy) continue;
        if (auto s = MetricScore(r, metric, false)) drafts.push_back(*s);
      }
      if (!drafts.empty()) {
        report.strategy_means.push_back(
            {StrategyName(strategy), metric, 1, Mean(drafts), drafts.size()});
      }
    }
  }
  return report;
}

std::string FormatMedianGain(double gain) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.4f", gain);
  std::string s = buf;
  if (s == "-0.0000") s = "+0.0000";
  return s;
}

std::string FormatPValue(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", p);
  return buf;
}

std::string FormatEffectSize(double r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", r);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

RenderedTable RenderSignificanceTable(const ScoreReport& report) {
  const std::vector<std::string> header = {"Metric", "N", "Median Gain",
                                           "p-value", "Effect Size (r)"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& m : report.metrics) {
    if (m.wilcoxon) {
      rows.push_back({m.metric, std::to_string(m.n),
                      FormatMedianGain(m.wilcoxon->median_gain),
                      FormatPValue(m.wilcoxon->p_value),
                      FormatEffectSize(m.wilcoxon->effect_size_r)});
    } else {
      rows.push_back({m.metric, std::to_string(m.n), "n/a", "n/a", "n/a"});
    }
  }

  RenderedTable out;
  out.csv = Header(report.config_hash);
  auto csv_line = [](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) line += ',';
      line += cells[i];
    }
    return line + "\n";
  };
  out.csv += csv_line(header);
  for (const auto& row : rows) out.csv += csv_line(row);

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  auto text_line = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) line += " | ";
      line += cells[c];
      if (c + 1 < cells.size()) line.append(width[c] - cells[c].size(), ' ');
    }
    return line + "\n";
  };
  out.text = Header(report.config_hash) + text_line(header);
  std::string rule;
  for (std::size_t c = 0; c < width.size(); ++c) {
    if (c > 0) rule += "-+-";
    rule.append(width[c], '-');
  }
  out.text += rule + "\n";
  for (const auto& row : rows) out.text += text_line(row);
  return out;
}

FigureData RenderFigureData(const ScoreReport& report) {
  FigureData out;
  out.strategy_comparison_csv =
      Header(report.config_hash) + "strategy,metric,pass,mean\n";
  for (const auto& s : report.strategy_means) {
    out.strategy_comparison_csv += s.strategy + "," + s.metric + "," +
                                   std::to_string(s.pass) + "," +
                                   Exact(s.mean) + "\n";
  }
  out.threshold_ablation_csv =
      Header(report.config_hash) +
      "threshold,metric,coverage,avg_before,avg_after\n";
  for (const auto& s : report.sweep) {
    for (const auto& [metric, avg] : s.averages) {
      out.threshold_ablation_csv +=
          Exact(s.threshold) + "," + metric + "," + Exact(s.coverage) + "," +
          (avg.before ? Exact(*avg.before) : "") + "," +
          (avg.after ? Exact(*avg.after) : "") + "\n";
    }
  }
  return out;
}

std::string ConfigHashForLog(const std::filesystem::path& log) {
  const auto meta = log.parent_path() / kRunMetaName;
  if (!std::filesystem::is_regular_file(meta)) return "unknown";
  const auto j =
      nlohmann::json::parse(text::ReadFile(meta.string()), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return "unknown";
  return j.value("config_hash", std::string("unknown"));
}

void WriteTextFile(const std::filesystem::path& path, const std::string& body) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << body;
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace reflect
