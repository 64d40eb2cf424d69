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

#include "reflect/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reflect {
namespace {

std::vector<double> Differences(const PairedSample& sample) {
  if (sample.first_pass.size() != sample.second_pass.size()) {
    throw LengthMismatch(sample.first_pass.size(), sample.second_pass.size());
  }
  std::vector<double> d(sample.first_pass.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = sample.second_pass[i] - sample.first_pass[i];
  }
  return d;
}

}  // namespace

std::string WilcoxonMethodName(WilcoxonMethod method) {
  return method == WilcoxonMethod::kExact ? "exact" : "normal-approx";
}

double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

double ExactSignedRankPValue(std::size_t n, int64_t w_plus) {
  // counts[s] = number of sign assignments whose positive ranks sum to s.
  const int64_t max_sum = static_cast<int64_t>(n * (n + 1) / 2);
  std::vector<uint64_t> counts(static_cast<std::size_t>(max_sum) + 1, 0);
  counts[0] = 1;
  for (std::size_t rank = 1; rank <= n; ++rank) {
    for (int64_t s = max_sum; s >= static_cast<int64_t>(rank); --s) {
      counts[static_cast<std::size_t>(s)] +=
          counts[static_cast<std::size_t>(s) - rank];
    }
  }
  uint64_t lower = 0;
  uint64_t upper = 0;
  for (int64_t s = 0; s <= max_sum; ++s) {
    if (s <= w_plus) lower += counts[static_cast<std::size_t>(s)];
    if (s >= w_plus) upper += counts[static_cast<std::size_t>(s)];
  }
  const double total = std::ldexp(1.0, static_cast<int>(n));
  const double tail = static_cast<double>(std::min(lower, upper)) / total;
  return std::min(1.0, 2.0 * tail);
}

double NormalSignedRankPValue(std::size_t n, double w_plus,
                              std::span<const std::size_t> tie_sizes) {
  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
  for (std::size_t t : tie_sizes) {
    const double tt = static_cast<double>(t);
    variance -= (tt * tt * tt - tt) / 48.0;
  }
  // Two-sided: measure from the smaller of W+ and W- like most references.
  const double w_minus = nn * (nn + 1.0) / 2.0 - w_plus;
  double d = std::min(w_plus, w_minus) - mean;
  if (d > 0) {
    d -= 0.5;
  } else if (d < 0) {
    d += 0.5;
  }
  const double z = d / std::sqrt(variance);
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

WilcoxonResult WilcoxonSignedRank(const PairedSample& sample) {
  const std::vector<double> all = Differences(sample);
  std::vector<double> nonzero;
  for (double d : all) {
    if (d != 0.0) nonzero.push_back(d);
  }
  if (nonzero.empty()) throw AllZeroDifferences();

  const std::size_t n = nonzero.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(nonzero[a]) < std::abs(nonzero[b]);
  });

  std::vector<double> ranks(n);
  std::vector<std::size_t> tie_sizes;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(nonzero[order[j]]) == std::abs(nonzero[order[i]])) {
      ++j;
    }
    // Positions i..j-1 share ranks i+1..j.
    const double average = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = average;
    if (j - i > 1) tie_sizes.push_back(j - i);
    i = j;
  }

  WilcoxonResult result;
  result.n_used = n;
  for (std::size_t i = 0; i < n; ++i) {
    (nonzero[i] > 0 ? result.w_plus : result.w_minus) += ranks[i];
  }
  if (n <= kExactWilcoxonMaxN && tie_sizes.empty()) {
    result.method = WilcoxonMethod::kExact;
    result.p_value =
        ExactSignedRankPValue(n, static_cast<int64_t>(std::llround(result.w_plus)));
  } else {
    result.method = WilcoxonMethod::kNormalApprox;
    result.p_value = NormalSignedRankPValue(n, result.w_plus, tie_sizes);
  }
  result.median_gain = Median(all);
  result.effect_size_r =
      (result.w_plus - result.w_minus) / (result.w_plus + result.w_minus);
  return result;
}

GainSummary SummarizeGains(const PairedSample& sample) {
  const std::vector<double> d = Differences(sample);
  GainSummary s;
  s.n = d.size();
  if (d.empty()) return s;
  const double n = static_cast<double>(d.size());
  s.mean_gain = std::accumulate(d.begin(), d.end(), 0.0) / n;
  s.median_gain = Median(d);
  s.fraction_improved =
      static_cast<double>(std::count_if(d.begin(), d.end(), [](double x) { return x > 0; })) / n;
  s.fraction_regressed =
      static_cast<double>(std::count_if(d.begin(), d.end(), [](double x) { return x < 0; })) / n;
  s.fraction_unchanged =
      static_cast<double>(std::count(d.begin(), d.end(), 0.0)) / n;
  return s;
}

}  // namespace reflect
