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
// Acceptance run: one PASS/FAIL line per criterion, exit status = failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "anomgym/error.hpp"
#include "anomgym/evalmetrics.hpp"
#include "anomgym/gym.hpp"
#include "anomgym/metafeat.hpp"
#include "anomgym/metasel.hpp"
#include "anomgym/synth.hpp"
#include "anomgym/trainer.hpp"
#include "arch_gradcheck.hpp"
#include "loss_gradcheck.hpp"
#include "metric_oracles.hpp"

using namespace anomgym;
using space::Dimension;

namespace {

constexpr int kWorkers = 8;
constexpr std::size_t kPipelines = 64;
constexpr std::size_t kTopK = 5;
const std::vector<std::uint64_t> kSeeds{0, 1, 2};
const data::AnomalyKind kKinds[] = {data::AnomalyKind::kLocal, data::AnomalyKind::kGlobal,
                                   data::AnomalyKind::kCluster, data::AnomalyKind::kDependency};

int failures = 0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

void criterion(int n, const std::string& title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("[%s] criterion %d: %s | %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", n, title.c_str(),
              v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

std::vector<data::DatasetPtr> synthetic_suite() {
  std::vector<data::DatasetPtr> out;
  for (data::AnomalyKind k : kKinds) {
    for (std::uint64_t b : {0, 1}) {
      const data::BaseGenerator gen{400, 6, 2, b};
      const std::string name = std::string(data::to_string(k)) + "_b" + std::to_string(b);
      out.push_back(std::make_shared<const data::Dataset>(
          data::synthesize(gen, data::SynthConfig::defaults(k, b), name)));
    }
  }
  return out;
}

std::vector<std::string> names_of(const std::vector<data::DatasetPtr>& ds) {
  std::vector<std::string> out;
  for (const auto& d : ds) out.push_back(d->name);
  return out;
}

struct RelationalRun {
  select::LodoReport report;
  select::CellCache cache;
  double seconds = 0.0;
};

select::LodoConfig relational_config(const std::vector<data::DatasetPtr>& ds, const space::DesignSpace& sp) {
  select::LodoConfig cfg;
  cfg.datasets = ds;
  cfg.space = sp;
  cfg.n_as = {10};
  cfg.seeds = kSeeds;
  cfg.backend = select::Backend::kGbdt;
  cfg.loss = select::MetaLoss::kMse;
  cfg.top_k = kTopK;
  cfg.meta_seed = 0;
  cfg.workers = kWorkers;
  return cfg;
}

void run_relational(RelationalRun& out, const std::vector<data::DatasetPtr>& ds, const space::DesignSpace& sp) {
  const auto t0 = std::chrono::steady_clock::now();
  out.report = select::run_lodo(relational_config(ds, sp), out.cache);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<gym::RunRecord> records_of(const select::CellCache& cache, const std::vector<data::DatasetPtr>& ds,
                                       const space::DesignSpace& sp, std::size_t n_a) {
  std::vector<gym::RunRecord> out;
  for (const auto& d : ds)
    for (std::size_t j = 0; j < sp.m_pipelines(); ++j)
      for (std::uint64_t s : kSeeds) {
        const select::CellKey key{d->name, j, n_a, s};
        const auto cell = cache.find(key);
        if (cell) out.push_back(gym::make_record(key, sp.configs[j], *cell));
      }
  return out;
}

// Mean inverse rank per loss choice over the given datasets.
std::map<std::size_t, double> loss_inverse_ranks(const std::vector<gym::CellSummary>& cells,
                                                 const std::vector<std::string>& datasets) {
  std::map<std::size_t, double> out;
  for (const auto& g : gym::summarize_choices(cells, Dimension::kLoss, datasets)) out[g.choice] = g.mean_inverse_rank;
  return out;
}

std::string describe(const std::map<std::size_t, double>& m) {
  std::string s;
  for (const auto& [choice, v] : m) {
    if (!s.empty()) s += ' ';
    s += std::string(space::dimension_info(Dimension::kLoss).choices[choice]) + "=" + fmt(v);
  }
  return s;
}

}  // namespace

int main() {
  criterion(1, "finite-difference gradients, 6 losses and 4 architectures x 20 seeds", [] {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t checked = 0, bad_instances = 0;
    double worst = 0.0;
    for (std::uint8_t l = 0; l < 6; ++l)
      for (std::uint64_t s = 0; s < 20; ++s) {
        const auto r = testing::loss_gradcheck(static_cast<space::Loss>(l), s);
        checked += r.checked;
        bad_instances += r.ok() ? 0 : 1;
        worst = std::max(worst, r.worst_rel);
      }
    for (std::uint8_t a = 0; a < 4; ++a)
      for (std::uint64_t s = 0; s < 20; ++s) {
        const auto r = testing::architecture_gradcheck(static_cast<space::Architecture>(a), s);
        checked += r.checked;
        bad_instances += r.ok() ? 0 : 1;
        worst = std::max(worst, r.worst_rel);
      }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Verdict{bad_instances == 0 && secs < 120.0,
                   std::to_string(checked) + " partials, " + std::to_string(bad_instances) +
                       " failing instances, worst rel " + sci(worst)};
  });

  criterion(2, "auc_roc / auc_pr against brute-force oracles on 1000 instances", [] {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto inst = testing::random_instance(rng);
      worst = std::max(worst, std::abs(metrics::auc_roc(inst.scores, inst.labels) - testing::pair_count_auc(inst)));
      worst = std::max(worst, std::abs(metrics::auc_pr(inst.scores, inst.labels) - testing::enumerated_ap(inst)));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Verdict{worst <= 1e-12 && secs < 60.0, "max abs diff " + sci(worst)};
  });

  criterion(3, "rank_normalize contract on 100 random rows", [] {
    Rng rng(3);
    int bad = 0;
    std::string first;
    for (int i = 0; i < 100; ++i) {
      const auto row = testing::random_rank_row(rng);
      const auto v = testing::rank_row_violation(row.raw, row.failed);
      if (!v.empty()) {
        ++bad;
        if (first.empty()) first = v;
      }
    }
    return Verdict{bad == 0, std::to_string(bad) + " violating rows" + (first.empty() ? "" : ": " + first)};
  });

  const auto datasets = synthetic_suite();
  const auto names = names_of(datasets);
  const space::DesignSpace sp = space::sample_space(space::SpaceMode::kSmall, kPipelines, 0);
  RelationalRun first;

  criterion(4, "meta top-5 vs RS/SS/GT, 8 synthetic datasets, 64 pipelines, n_a=10, 3 repeats", [&] {
    run_relational(first, datasets, sp);
    using F = select::LodoFold;
    const double topk = first.report.mean(&F::topk), top1 = first.report.mean(&F::top1);
    const double rs = first.report.mean(&F::rs), ss = first.report.mean(&F::ss), gt = first.report.mean(&F::gt);
    std::size_t errors = 0;
    for (const auto& f : first.report.folds) errors += f.error.empty() ? 0 : 1;
    const bool ok = topk >= rs + 0.02 && topk >= ss && topk <= gt && first.seconds < 1200.0 && errors == 0;
    return Verdict{ok, "top5 " + fmt(topk) + " top1 " + fmt(top1) + " RS " + fmt(rs) + " SS " + fmt(ss) +
                           " GT " + fmt(gt) + ", folds " + std::to_string(first.report.folds.size()) +
                           ", fold errors " + std::to_string(errors) + ", run " + fmt(first.seconds) + "s"};
  });

  const auto cells = gym::summarize_cells(records_of(first.cache, datasets, sp, 10));

  criterion(5, "deviation loss in the top 2 by mean inverse rank on global datasets", [&] {
    std::vector<std::string> global;
    for (const auto& n : names)
      if (n.rfind("global", 0) == 0) global.push_back(n);
    const auto by_loss = loss_inverse_ranks(cells, global);
    const auto dev = static_cast<std::size_t>(space::Loss::kDeviation);
    if (!by_loss.contains(dev)) return Verdict{false, "no deviation pipeline sampled"};
    std::size_t better = 0;
    for (const auto& [choice, v] : by_loss) better += v > by_loss.at(dev) ? 1 : 0;
    return Verdict{better < 2, "place " + std::to_string(better + 1) + ": " + describe(by_loss)};
  });

  criterion(6, "argmax loss differs across anomaly types", [&] {
    std::set<std::size_t> winners;
    std::string detail;
    for (data::AnomalyKind k : kKinds) {
      const std::string prefix = data::to_string(k);
      std::vector<std::string> of_kind;
      for (const auto& n : names)
        if (n.rfind(prefix + "_", 0) == 0) of_kind.push_back(n);
      const auto by_loss = loss_inverse_ranks(cells, of_kind);
      std::size_t best = by_loss.begin()->first;
      for (const auto& [choice, v] : by_loss)
        if (v > by_loss.at(best)) best = choice;
      winners.insert(best);
      detail += prefix + "->" + std::string(space::dimension_info(Dimension::kLoss).choices[best]) + " ";
    }
    return Verdict{winners.size() >= 2, detail + "(" + std::to_string(winners.size()) + " distinct)"};
  });

  criterion(7, "SMOTE fails with InsufficientNeighbors at n_a=5 and never at n_a=10", [&] {
    space::DesignSpace smote = sp;
    smote.configs.clear();
    std::vector<std::size_t> ids;
    for (std::size_t j = 0; j < sp.m_pipelines(); ++j)
      if (sp.configs[j].augmentation() == data::AugmentKind::kSmote) {
        smote.configs.push_back(sp.configs[j]);
        ids.push_back(j);
      }
    if (ids.empty()) return Verdict{false, "no SMOTE pipeline in the sampled space"};
    select::CellCache low;
    select::fill_cells(low, datasets, smote, std::vector<std::size_t>{5}, kSeeds, kWorkers);
    std::size_t low_cells = 0, low_ok = 0;
    for (const auto& n : names)
      for (std::size_t j = 0; j < smote.m_pipelines(); ++j)
        for (std::uint64_t s : kSeeds) {
          const auto c = low.find({n, j, 5, s});
          ++low_cells;
          low_ok += (c && !c->ok && c->error_tag == "InsufficientNeighbors") ? 1 : 0;
        }
    std::size_t high_cells = 0, high_bad = 0;
    for (const auto& n : names)
      for (std::size_t j : ids)
        for (std::uint64_t s : kSeeds) {
          const auto c = first.cache.find({n, j, 10, s});
          ++high_cells;
          high_bad += (!c || c->error_tag == "InsufficientNeighbors") ? 1 : 0;
        }
    return Verdict{low_ok == low_cells && high_bad == 0,
                   "n_a=5: " + std::to_string(low_ok) + "/" + std::to_string(low_cells) +
                       " tagged; n_a=10: " + std::to_string(high_bad) + "/" + std::to_string(high_cells) +
                       " tagged"};
  });

  criterion(8, "perturbations: duplicate x4, ceil(0.3 d) irrelevant columns, floor(0.1 n_train) flips", [&] {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < datasets.size(); ++i) {
      const auto& ds = datasets[i];
      const data::Dataset dup = data::perturb(*ds, data::PerturbKind::kDuplicateAnomalies, i);
      bad += dup.anomalies() == 4 * ds->anomalies() ? 0 : 1;
      const data::Dataset irr = data::perturb(*ds, data::PerturbKind::kIrrelevantFeatures, i);
      bad += irr.d() == ds->d() + static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(ds->d()))) ? 0 : 1;
      const data::WeakView v = data::make_weak_view(ds, 10, i);
      const data::WeakView f = data::flip_train_labels(v, i);
      std::size_t train_changed = 0, test_changed = 0;
      for (std::size_t r : v.test) test_changed += f.parent->y[r] != ds->y[r];
      for (const auto* part : {&v.unlabeled, &v.labeled})
        for (std::size_t r : *part) train_changed += f.parent->y[r] != ds->y[r];
      bad += train_changed == v.train_size() / 10 && test_changed == 0 ? 0 : 1;
    }
    return Verdict{bad == 0, std::to_string(bad) + " violations over " + std::to_string(datasets.size()) + " datasets"};
  });

  criterion(9, "zero-shot prediction trains nothing; folds ignore held-out rows", [&] {
    const auto mf = select::dataset_meta_features(datasets, 0);
    const auto perf = select::performance_matrices(first.cache, names, sp.m_pipelines(), std::vector<std::size_t>{10}, kSeeds);
    const select::MetaTable table = select::assemble_meta_table(perf, mf, sp);
    const auto predictor = select::train_meta_predictor(table, select::Backend::kGbdt, select::MetaLoss::kMse, 0);
    const auto before = train::train_pipeline_calls();
    for (const auto& n : names) select::predict_pipeline_ranks(predictor, mf.at(n), 10, sp);
    const auto calls = train::train_pipeline_calls() - before;

    std::size_t leaks = 0;
    Rng rng(99);
    for (std::size_t d = 0; d < names.size(); ++d) {
      select::MetaTable mutated = table;
      for (double& v : mutated.raw_meta[d]) v = 1e3 * (uniform01(rng) - 0.5);
      for (auto& r : mutated.rows)
        if (r.dataset == d) r.target = uniform01(rng);
      mutated.restandardize();
      for (select::Backend b : {select::Backend::kGbdt, select::Backend::kNeural}) {
        const auto a = select::train_fold_predictor(table, names[d], b, select::MetaLoss::kMse, 0);
        const auto m = select::train_fold_predictor(mutated, names[d], b, select::MetaLoss::kMse, 0);
        leaks += select::predict_pipeline_ranks(a, mf.at(names[d]), 10, sp) ==
                         select::predict_pipeline_ranks(m, mf.at(names[d]), 10, sp)
                     ? 0
                     : 1;
      }
    }
    return Verdict{calls == 0 && leaks == 0,
                   std::to_string(calls) + " training calls, " + std::to_string(leaks) + " leaking folds of " +
                       std::to_string(2 * names.size())};
  });

  criterion(10, "criterion-4 run repeated from scratch is bit-identical", [&] {
    RelationalRun second;
    run_relational(second, datasets, sp);
    std::size_t compared = 0, diffs = 0;
    for (const auto& n : names)
      for (std::size_t j = 0; j < sp.m_pipelines(); ++j)
        for (std::uint64_t s : kSeeds) {
          const auto a = first.cache.find({n, j, 10, s});
          const auto b = second.cache.find({n, j, 10, s});
          ++compared;
          if (!a || !b || a->ok != b->ok || a->error_tag != b->error_tag || a->auc_roc != b->auc_roc ||
              a->auc_pr != b->auc_pr || a->test_scores != b->test_scores) {
            ++diffs;
          }
        }
    const auto& fa = first.report.folds;
    const auto& fb = second.report.folds;
    std::size_t fold_diffs = fa.size() == fb.size() ? 0 : 1;
    for (std::size_t i = 0; i < std::min(fa.size(), fb.size()); ++i) {
      const auto same = [](const select::SelectorScore& x, const select::SelectorScore& y) {
        return x.auc_roc == y.auc_roc && x.auc_pr == y.auc_pr && x.failed == y.failed;
      };
      if (fa[i].top_k_ids != fb[i].top_k_ids || !same(fa[i].topk, fb[i].topk) || !same(fa[i].top1, fb[i].top1) ||
          !same(fa[i].rs, fb[i].rs) || !same(fa[i].ss, fb[i].ss) || !same(fa[i].gt, fb[i].gt)) {
        ++fold_diffs;
      }
    }
    return Verdict{diffs == 0 && fold_diffs == 0, std::to_string(diffs) + "/" + std::to_string(compared) +
                                                      " records differ, " + std::to_string(fold_diffs) +
                                                      " folds differ, rerun " + fmt(second.seconds) + "s"};
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
