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

#include <algorithm>
#include <fstream>
#include <numeric>

#include "anomgym/error.hpp"
#include "anomgym/evalmetrics.hpp"
#include "anomgym/metasel.hpp"

namespace anomgym::select {
namespace {

double prevalence(const std::vector<int>& labels) {
  return static_cast<double>(std::count(labels.begin(), labels.end(), 1)) /
         static_cast<double>(labels.size());
}

// A pipeline that cannot produce scores is treated like a constant scorer.
SelectorScore score_of(const std::optional<CellResult>& cell, const std::vector<int>& labels) {
  if (!cell || !cell->ok) return {0.5, prevalence(labels), true};
  return {cell->auc_roc, cell->auc_pr, false};
}

struct FoldTask {
  std::size_t dataset;
  std::size_t n_a;
  std::uint64_t seed;
};

}  // namespace

double LodoReport::mean(SelectorScore LodoFold::*which, bool pr) const {
  double s = 0.0;
  double n = 0.0;
  for (const LodoFold& f : folds) {
    if (!f.error.empty()) continue;
    if (which == &LodoFold::ss && !f.ss_error.empty()) continue;
    const SelectorScore& v = f.*which;
    s += pr ? v.auc_pr : v.auc_roc;
    n += 1.0;
  }
  return n > 0 ? s / n : 0.0;
}

std::map<std::string, meta::MetaFeatureVector> dataset_meta_features(
    const std::vector<data::DatasetPtr>& datasets, std::uint64_t seed) {
  std::map<std::string, meta::MetaFeatureVector> out;
  for (const auto& ds : datasets) out.emplace(ds->name, meta::meta_features(ds->x, seed));
  return out;
}

MetaPredictor train_fold_predictor(const MetaTable& full, const std::string& held_out,
                                   Backend backend, MetaLoss loss, std::uint64_t seed) {
  return train_meta_predictor(full.without_dataset(held_out), backend, loss,
                              derive_seed(seed, held_out, "fold"));
}

LodoReport run_lodo(const LodoConfig& cfg, CellCache& cache, const CellCallback& on_new) {
  if (cfg.datasets.size() < 3) throw ConfigError("LODO needs at least 3 datasets");
  if (cfg.n_as.empty() || cfg.seeds.empty()) throw ConfigError("LODO needs n_a values and seeds");
  const std::size_t m = cfg.space.m_pipelines();
  const std::size_t k = std::min(cfg.top_k, m);
  std::vector<std::string> names;
  for (const auto& ds : cfg.datasets) names.push_back(ds->name);

  const auto metafeats = dataset_meta_features(cfg.datasets, cfg.meta_seed);
  fill_cells(cache, cfg.datasets, cfg.space, cfg.n_as, cfg.seeds, cfg.workers, on_new);
  const auto perf = performance_matrices(cache, names, m, cfg.n_as, cfg.seeds);
  const MetaTable full = assemble_meta_table(perf, metafeats, cfg.space);

  // predictors[d][a]: fold predictor for held-out d (per n_a when requested)
  std::vector<std::vector<std::optional<MetaPredictor>>> predictors(names.size());
  std::vector<std::string> fold_errors(names.size());
  for (std::size_t d = 0; d < names.size(); ++d) {
    try {
      if (cfg.per_n_a) {
        const MetaTable rest = full.without_dataset(names[d]);
        for (std::size_t n_a : cfg.n_as) {
          predictors[d].push_back(train_meta_predictor(
              rest.only_n_a(n_a), cfg.backend, cfg.loss,
              derive_seed(derive_seed(cfg.meta_seed, names[d], "fold"), n_a)));
        }
      } else {
        predictors[d].push_back(
            train_fold_predictor(full, names[d], cfg.backend, cfg.loss, cfg.meta_seed));
      }
    } catch (const Error& e) {
      fold_errors[d] = std::string(e.tag()) + ": " + e.what();
    }
  }

  std::vector<FoldTask> tasks;
  for (std::size_t d = 0; d < names.size(); ++d) {
    for (std::size_t a = 0; a < cfg.n_as.size(); ++a) {
      for (std::uint64_t seed : cfg.seeds) tasks.push_back({d, a, seed});
    }
  }
  LodoReport report;
  report.folds.resize(tasks.size());
  const auto n_tasks = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, cfg.workers))
  for (std::ptrdiff_t t = 0; t < n_tasks; ++t) {
    const FoldTask& task = tasks[static_cast<std::size_t>(t)];
    const std::string& name = names[task.dataset];
    const std::size_t n_a = cfg.n_as[task.n_a];
    LodoFold& fold = report.folds[static_cast<std::size_t>(t)];
    fold.dataset = name;
    fold.n_a = n_a;
    fold.seed = task.seed;
    if (!fold_errors[task.dataset].empty()) {
      fold.error = fold_errors[task.dataset];
      continue;
    }
    try {
      const data::WeakView view = data::make_weak_view(cfg.datasets[task.dataset], n_a, task.seed);
      std::vector<int> labels;
      for (std::size_t i : view.test) labels.push_back(view.parent->y[i]);
      auto cell = [&](std::size_t id) { return cache.find({name, id, n_a, task.seed}); };

      const MetaPredictor& f = *predictors[task.dataset][cfg.per_n_a ? task.n_a : 0];
      const auto ranks = predict_pipeline_ranks(f, metafeats.at(name), n_a, cfg.space);
      fold.top_k_ids = select_pipelines(ranks, k);
      fold.top1 = score_of(cell(fold.top_k_ids[0]), labels);

      std::vector<std::vector<double>> scores;
      for (std::size_t id : fold.top_k_ids) {
        const auto c = cell(id);
        if (c && c->ok) scores.push_back(c->test_scores);
      }
      if (scores.empty()) {
        fold.topk = {0.5, prevalence(labels), true};
      } else {
        const auto ens = ensemble_normalized(scores);
        fold.topk = {metrics::auc_roc(ens, labels), metrics::auc_pr(ens, labels), false};
      }

      fold.rs_id = select_random(m, derive_seed(derive_seed(task.seed, name, "rs"), n_a));
      fold.rs = score_of(cell(fold.rs_id), labels);

      std::vector<double> aucs(m, 0.0);
      std::vector<std::uint8_t> failed(m, 0);
      for (std::size_t j = 0; j < m; ++j) {
        const auto c = cell(j);
        failed[j] = !(c && c->ok);
        if (!failed[j]) aucs[j] = c->auc_roc;
      }
      fold.gt_id = select_ground_truth(aucs, failed);
      fold.gt = score_of(cell(fold.gt_id), labels);

      if (cfg.run_supervised) {
        try {
          fold.ss_id = select_supervised(view, cfg.space, task.seed);
          fold.ss = score_of(cell(fold.ss_id), labels);
        } catch (const Error& e) {
          fold.ss_error = std::string(e.tag()) + ": " + e.what();
        }
      } else {
        fold.ss_error = "not run";
      }
    } catch (const Error& e) {
      fold.error = std::string(e.tag()) + ": " + e.what();
    }
  }
  return report;
}

void write_lodo_report(const LodoReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "lodo_folds.csv");
  std::ofstream jsonl(dir / "lodo_folds.jsonl");
  if (!csv || !jsonl) throw LoadError("cannot write LODO report under " + dir.string());
  csv.precision(17);
  csv << "dataset,n_a,seed,selector,pipeline,auc_roc,auc_pr,selection_failed,error\n";
  auto ids_string = [](const std::vector<std::size_t>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? ";" : "") + std::to_string(ids[i]);
    return s;
  };
  for (const LodoFold& f : report.folds) {
    const std::pair<const char*, std::pair<const SelectorScore*, std::string>> rows[] = {
        {"meta_top1", {&f.top1, f.top_k_ids.empty() ? "" : std::to_string(f.top_k_ids[0])}},
        {"meta_topk", {&f.topk, ids_string(f.top_k_ids)}},
        {"rs", {&f.rs, std::to_string(f.rs_id)}},
        {"ss", {&f.ss, std::to_string(f.ss_id)}},
        {"gt", {&f.gt, std::to_string(f.gt_id)}}};
    nlohmann::json j{{"dataset", f.dataset}, {"n_a", f.n_a},       {"seed", f.seed},
                     {"error", f.error},     {"ss_error", f.ss_error}};
    for (const auto& [sel, val] : rows) {
      const SelectorScore& s = *val.first;
      csv << f.dataset << ',' << f.n_a << ',' << f.seed << ',' << sel << ',' << val.second << ','
          << s.auc_roc << ',' << s.auc_pr << ',' << (s.failed ? 1 : 0) << ',' << '"' << f.error
          << '"' << '\n';
      j[sel] = {{"pipeline", val.second},
                {"auc_roc", s.auc_roc},
                {"auc_pr", s.auc_pr},
                {"selection_failed", s.failed}};
    }
    jsonl << j.dump() << '\n';
  }
  std::ofstream summary(dir / "lodo_summary.csv");
  summary.precision(17);
  summary << "selector,mean_auc_roc,mean_auc_pr\n";
  const std::pair<const char*, SelectorScore LodoFold::*> sels[] = {
      {"meta_top1", &LodoFold::top1}, {"meta_topk", &LodoFold::topk}, {"rs", &LodoFold::rs},
      {"ss", &LodoFold::ss},          {"gt", &LodoFold::gt}};
  for (const auto& [name, ptr] : sels) {
    summary << name << ',' << report.mean(ptr) << ',' << report.mean(ptr, true) << '\n';
  }
}

}  // namespace anomgym::select
