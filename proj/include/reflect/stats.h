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

#ifndef REFLECT_STATS_H_
#define REFLECT_STATS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reflect/error.h"

namespace reflect {

struct PairedSample {
  std::vector<double> first_pass;
  std::vector<double> second_pass;
  std::string metric_name;
};

enum class WilcoxonMethod { kExact, kNormalApprox };

std::string WilcoxonMethodName(WilcoxonMethod method);

struct WilcoxonResult {
  std::size_t n_used = 0;  // nonzero differences
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0;  // two-sided
  double median_gain = 0.0;  // over all differences, zeros included
  double effect_size_r = 0.0;  // rank-biserial
  WilcoxonMethod method = WilcoxonMethod::kExact;
};

class AllZeroDifferences : public Error {
 public:
  AllZeroDifferences() : Error("every paired difference is zero") {}
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("paired vectors differ in length: " + std::to_string(a) +
              " vs " + std::to_string(b)) {}
};

// Largest n_used for which the exact null distribution is enumerated.
inline constexpr std::size_t kExactWilcoxonMaxN = 25;

// Paired Wilcoxon signed-rank test on second - first. Zero differences are
// dropped; tied magnitudes get average ranks. Uses the exact distribution
// when n_used <= 25 without ties, otherwise the normal approximation with
// tie and continuity corrections.
WilcoxonResult WilcoxonSignedRank(const PairedSample& sample);

// Exact two-sided p-value for a tie-free statistic W+ over n ranks.
double ExactSignedRankPValue(std::size_t n, int64_t w_plus);

// Normal-approximation two-sided p-value. `tie_sizes` lists the size of
// every group of tied magnitudes (groups of one may be omitted).
double NormalSignedRankPValue(std::size_t n, double w_plus,
                              std::span<const std::size_t> tie_sizes);

struct GainSummary {
  std::size_t n = 0;
  double mean_gain = 0.0;
  double median_gain = 0.0;
  double fraction_improved = 0.0;
  double fraction_regressed = 0.0;
  double fraction_unchanged = 0.0;
};

GainSummary SummarizeGains(const PairedSample& sample);

double Median(std::vector<double> values);

}  // namespace reflect

#endif  // REFLECT_STATS_H_
