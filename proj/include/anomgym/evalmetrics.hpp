// Copyright 2026 The anomgym Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "anomgym/matrix.hpp"

namespace anomgym::metrics {

/// Probability that a random anomaly outscores a random normal, ties
/// counting one half. Throws MetricError unless both classes are present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

/// Average precision: sum over descending distinct-score thresholds of
/// (R_k - R_{k-1}) * P_k.
double auc_pr(std::span<const double> scores, std::span<const int> labels);

/// Best raw value gets rank 1, ties share their average rank, ranks are
/// divided by the number of valid cells. Failed cells get 1.0.
std::vector<double> rank_normalize(std::span<const double> raw,
                                   std::span<const std::uint8_t> failed = {});

/// 1 - rank_normalize(raw): higher is better.
std::vector<double> inverse_rank_metric(std::span<const double> raw,
                                        std::span<const std::uint8_t> failed = {});

/// Datasets x pipelines table of one metric for one n_a.
struct PerformanceMatrix {
  std::vector<std::string> datasets;
  std::size_t m_pipelines = 0;
  std::size_t n_a = 0;
  Matrix raw;                         // repeat-averaged metric
  Matrix rank;                        // per-row rank_normalize
  std::vector<std::uint8_t> failed;   // row-major n x m

  PerformanceMatrix() = default;
  PerformanceMatrix(std::vector<std::string> names, std::size_t m, std::size_t n_a);

  std::size_t n_datasets() const noexcept { return datasets.size(); }
  bool is_failed(std::size_t i, std::size_t j) const { return failed[i * m_pipelines + j] != 0; }
  void set(std::size_t i, std::size_t j, double value);
  void set_failed(std::size_t i, std::size_t j);
  /// Fills rank from raw and the failure mask.
  void compute_ranks();
  std::size_t row_index(const std::string& dataset) const;
};

}  // namespace anomgym::metrics
