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
#include "anomgym/evalmetrics.hpp"

#include <algorithm>
#include <numeric>

#include "anomgym/error.hpp"

namespace anomgym::metrics {
namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw MetricError("scores and labels differ in length");
  std::size_t pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw MetricError("labels must be 0/1");
    pos += l == 1;
  }
  if (pos == 0 || pos == labels.size()) throw MetricError("labels contain a single class");
}

std::vector<std::size_t> descending_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  // Mann-Whitney U with mid-ranks over ascending scores.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += mid;
        ++pos;
      }
    }
    i = j;
  }
  const double np = static_cast<double>(pos);
  const double nn = static_cast<double>(scores.size() - pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double auc_pr(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto order = descending_order(scores);
  const double total_pos =
      static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  double tp = 0.0;
  double seen = 0.0;
  double prev_recall = 0.0;
  double ap = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      tp += labels[order[j]] == 1;
      seen += 1.0;
      ++j;
    }
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / seen);
    prev_recall = recall;
    i = j;
  }
  return ap;
}

std::vector<double> rank_normalize(std::span<const double> raw,
                                   std::span<const std::uint8_t> failed) {
  if (!failed.empty() && failed.size() != raw.size()) {
    throw DimensionError("rank_normalize: mask length differs from row length");
  }
  auto is_failed = [&](std::size_t j) { return !failed.empty() && failed[j] != 0; };
  std::vector<std::size_t> valid;
  for (std::size_t j = 0; j < raw.size(); ++j)
    if (!is_failed(j)) valid.push_back(j);
  if (valid.empty()) throw ContractError("rank_normalize: every cell failed");
  std::stable_sort(valid.begin(), valid.end(),
                   [&](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });
  std::vector<double> out(raw.size(), 1.0);
  // Valid cells take ranks 1..m_valid, failed ones sit at m; all divided by m.
  const double m = static_cast<double>(raw.size());
  for (std::size_t i = 0; i < valid.size();) {
    std::size_t j = i;
    while (j < valid.size() && raw[valid[j]] == raw[valid[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) out[valid[k]] = avg_rank / m;
    i = j;
  }
  return out;
}

std::vector<double> inverse_rank_metric(std::span<const double> raw,
                                        std::span<const std::uint8_t> failed) {
  auto r = rank_normalize(raw, failed);
  for (double& v : r) v = 1.0 - v;
  return r;
}

PerformanceMatrix::PerformanceMatrix(std::vector<std::string> names, std::size_t m,
                                     std::size_t n_a_value)
    : datasets(std::move(names)),
      m_pipelines(m),
      n_a(n_a_value),
      raw(datasets.size(), m),
      rank(datasets.size(), m, 1.0),
      failed(datasets.size() * m, 0) {}

void PerformanceMatrix::set(std::size_t i, std::size_t j, double value) {
  raw(i, j) = value;
  failed[i * m_pipelines + j] = 0;
}

void PerformanceMatrix::set_failed(std::size_t i, std::size_t j) {
  raw(i, j) = 0.0;
  failed[i * m_pipelines + j] = 1;
}

void PerformanceMatrix::compute_ranks() {
  for (std::size_t i = 0; i < n_datasets(); ++i) {
    const auto mask = std::span(failed).subspan(i * m_pipelines, m_pipelines);
    if (std::all_of(mask.begin(), mask.end(), [](std::uint8_t f) { return f != 0; })) {
      std::fill(rank.row(i).begin(), rank.row(i).end(), 1.0);
      continue;
    }
    const auto r = rank_normalize(raw.row(i), mask);
    std::copy(r.begin(), r.end(), rank.row(i).begin());
  }
}

std::size_t PerformanceMatrix::row_index(const std::string& dataset) const {
  const auto it = std::find(datasets.begin(), datasets.end(), dataset);
  if (it == datasets.end()) throw ContractError("dataset '" + dataset + "' not in matrix");
  return static_cast<std::size_t>(it - datasets.begin());
}

}  // namespace anomgym::metrics
