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
#include <omp.h>

#include <chrono>

#include "anomgym/error.hpp"
#include "anomgym/evalmetrics.hpp"
#include "anomgym/metasel.hpp"

namespace anomgym::select {

CellResult run_cell(const data::DatasetPtr& ds, const space::PipelineConfig& cfg,
                    std::size_t n_a, std::uint64_t seed) {
  CellResult r;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const data::WeakView view = data::make_weak_view(ds, n_a, seed);
    const auto det = train::train_pipeline(view, cfg, seed);
    r.test_scores = train::score_samples(det, ds->x.select_rows(view.test));
    for (std::size_t i : view.test) r.test_labels.push_back(ds->y[i]);
    r.auc_roc = metrics::auc_roc(r.test_scores, r.test_labels);
    r.auc_pr = metrics::auc_pr(r.test_scores, r.test_labels);
    r.ok = true;
  } catch (const Error& e) {
    r = CellResult{};
    r.error_tag = e.tag();
    r.error_message = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::optional<CellResult> CellCache::find(const CellKey& key) const {
  std::lock_guard lock(mu_);
  const auto it = cells_.find(key);
  if (it == cells_.end()) return std::nullopt;
  return it->second;
}

void CellCache::insert(const CellKey& key, CellResult result) {
  std::lock_guard lock(mu_);
  cells_.insert_or_assign(key, std::move(result));
}

std::size_t CellCache::size() const {
  std::lock_guard lock(mu_);
  return cells_.size();
}

void fill_cells(CellCache& cache, const std::vector<data::DatasetPtr>& datasets,
                const space::DesignSpace& space, std::span<const std::size_t> n_as,
                std::span<const std::uint64_t> seeds, int workers, const CellCallback& on_new) {
  struct Task {
    std::size_t dataset;
    CellKey key;
  };
  std::vector<Task> todo;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t n_a : n_as) {
      for (std::uint64_t seed : seeds) {
        for (std::size_t j = 0; j < space.m_pipelines(); ++j) {
          CellKey key{datasets[d]->name, j, n_a, seed};
          if (!cache.find(key)) todo.push_back({d, std::move(key)});
        }
      }
    }
  }
  std::mutex sink;
  const auto n = static_cast<std::ptrdiff_t>(todo.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, workers))
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const Task& task = todo[static_cast<std::size_t>(t)];
    CellResult r = run_cell(datasets[task.dataset], space.configs[task.key.pipeline],
                            task.key.n_a, task.key.seed);
    std::lock_guard lock(sink);
    if (on_new) on_new(task.key, r);
    cache.insert(task.key, std::move(r));
  }
}

std::vector<metrics::PerformanceMatrix> performance_matrices(
    const CellCache& cache, const std::vector<std::string>& datasets, std::size_t m,
    std::span<const std::size_t> n_as, std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ContractError("performance_matrices: no seeds");
  std::vector<metrics::PerformanceMatrix> out;
  for (std::size_t n_a : n_as) {
    metrics::PerformanceMatrix p(datasets, m, n_a);
    for (std::size_t i = 0; i < datasets.size(); ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0;
        bool failed = false;
        for (std::uint64_t seed : seeds) {
          const auto cell = cache.find({datasets[i], j, n_a, seed});
          if (!cell) {
            throw ContractError("missing cell " + datasets[i] + "/" + std::to_string(j) +
                                "/n_a=" + std::to_string(n_a) + "/seed=" + std::to_string(seed));
          }
          failed = failed || !cell->ok;
          sum += cell->auc_roc;
        }
        if (failed) {
          p.set_failed(i, j);
        } else {
          p.set(i, j, sum / static_cast<double>(seeds.size()));
        }
      }
    }
    p.compute_ranks();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace anomgym::select
