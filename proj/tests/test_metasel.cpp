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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "anomgym/error.hpp"
#include "anomgym/evalmetrics.hpp"
#include "anomgym/gbdt.hpp"
#include "anomgym/metasel.hpp"
#include "anomgym/trainer.hpp"
#include "test_support.hpp"

using namespace anomgym;
using namespace anomgym::select;
using space::Dimension;
using space::PipelineConfig;

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j + 1);
    i = j;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(average_ranks(a), average_ranks(b));
}

// Six datasets with random meta-features; target is a fixed function of the
// loss choice, identical for every dataset.
MetaTable learnable_table(const space::DesignSpace& sp) {
  MetaTable t;
  Rng rng(31);
  for (int d = 0; d < 6; ++d) {
    t.datasets.push_back("d" + std::to_string(d));
    std::vector<double> m(meta::kMetaFeatureLength);
    for (double& v : m) v = uniform01(rng) * 10;
    t.raw_meta.push_back(m);
  }
  for (const auto& c : sp.configs) t.encodings.push_back(space::encode_pipeline(c));
  for (std::size_t d = 0; d < 6; ++d)
    for (std::size_t j = 0; j < sp.m_pipelines(); ++j) {
      const double loss = static_cast<double>(sp.configs[j].choice(Dimension::kLoss));
      t.rows.push_back({d, j, 10, (loss + 1) / 6.0});
    }
  t.restandardize();
  return t;
}

std::vector<double> true_targets(const space::DesignSpace& sp) {
  std::vector<double> out;
  for (const auto& c : sp.configs) out.push_back((c.choice(Dimension::kLoss) + 1) / 6.0);
  return out;
}

meta::MetaFeatureVector meta_of(const MetaTable& t, std::size_t d) {
  meta::MetaFeatureVector v;
  v.values = t.raw_meta[d];
  return v;
}

data::DatasetPtr small_dataset(std::uint64_t seed, const std::string& name, double shift) {
  return anomgym::testing::gaussian_dataset(180, 3, 18, seed, name, shift);
}

PipelineConfig cheap(std::size_t loss, std::size_t arch = 0) {
  PipelineConfig c = PipelineConfig::small_mode_defaults();
  c.set(Dimension::kLoss, loss).set(Dimension::kArchitecture, arch).set(Dimension::kEpochs, 0);
  return c;
}

}  // namespace

TEST_CASE("gbdt boosting descends and fits a step function") {
  Rng rng(2);
  Matrix x(400, 3);
  std::vector<double> y(400);
  for (std::size_t i = 0; i < 400; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = uniform01(rng);
    y[i] = (x(i, 1) > 0.5 ? 1.0 : 0.0) + 0.5 * x(i, 0) + 0.05 * (uniform01(rng) - 0.5);
  }
  gbdt::GbdtRegressor g;
  g.fit(x, y);
  const auto& h = g.training_mse();
  CHECK(h.size() == g.params().rounds + 1);
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] + 1e-15);
  CHECK(h.back() < 0.01 * h.front());
  CHECK(g.trees().size() == 100);
  for (const auto& t : g.trees()) {
    // depth bound: a depth-6 tree has at most 127 nodes
    CHECK(t.size() <= 127);
  }
  const auto back = gbdt::GbdtRegressor::from_json(g.to_json());
  CHECK(back.predict(x) == g.predict(x));
  CHECK_THROWS_AS(g.predict_row(std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("quantile cuts") {
  std::vector<double> col;
  for (int i = 0; i < 100; ++i) col.push_back(i % 10);
  const auto cuts = gbdt::quantile_cuts(col, 32);
  CHECK(cuts.size() <= 31);
  CHECK(cuts.size() >= 9);
  CHECK(std::is_sorted(cuts.begin(), cuts.end()));
  CHECK(gbdt::quantile_cuts(std::vector<double>(50, 3.0), 32).empty());
}

TEST_CASE("meta losses") {
  Rng rng(0);
  const std::vector<std::size_t> groups{0, 0};
  const std::vector<double> t{0.2, 0.8};
  const grad::Value p = grad::constant(Matrix(2, 1, std::vector<double>{0.8, 0.2}));
  CHECK(meta_loss(MetaLoss::kRanknet, p, t, groups, 50, rng).item() ==
        doctest::Approx(std::log1p(std::exp(0.6))).epsilon(1e-12));
  CHECK(meta_loss(MetaLoss::kRanknet, p, t, groups, 50, rng).item() == doctest::Approx(1.037).epsilon(1e-3));
  CHECK(meta_loss(MetaLoss::kMse, p, t, groups, 50, rng).item() == doctest::Approx(0.36));
  // weights 1 + (1 - t) + (1 - p): 2.0 and 2.0
  CHECK(meta_loss(MetaLoss::kWeightedMse, p, t, groups, 50, rng).item() == doctest::Approx(0.72));
  CHECK(meta_loss(MetaLoss::kPearson, p, t, groups, 50, rng).item() == doctest::Approx(2.0));
  const grad::Value q = grad::constant(Matrix(2, 1, std::vector<double>{0.1, 0.9}));
  CHECK(std::abs(meta_loss(MetaLoss::kPearson, q, t, groups, 50, rng).item()) < 1e-9);

  for (MetaLoss k : {MetaLoss::kMse, MetaLoss::kPearson, MetaLoss::kRanknet}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      Rng r(s);
      const std::size_t n = 8;
      std::vector<double> target(n);
      std::vector<std::size_t> g(n);
      for (std::size_t i = 0; i < n; ++i) target[i] = uniform01(r), g[i] = i % 2;
      grad::Value pred = grad::parameter(anomgym::testing::random_matrix(n, 1, r), "pred");
      const std::uint64_t ls = r();
      auto f = [&] {
        Rng lr(ls);
        return meta_loss(k, pred, target, g, 50, lr);
      };
      const auto res = anomgym::testing::check_gradients(f, {pred});
      INFO(std::string(to_string(k)) << " " << res.worst);
      CHECK(res.ok());
    }
  }
}

TEST_CASE("weighted mse treats its weights as constants") {
  // gradient of mean(w * (p - t)^2) with w frozen at its forward value
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng r(s);
    const std::size_t n = 8;
    std::vector<double> target(n);
    std::vector<std::size_t> g(n, 0);
    for (double& v : target) v = uniform01(r);
    grad::Value pred = grad::parameter(anomgym::testing::random_matrix(n, 1, r), "pred");
    grad::Value loss = meta_loss(MetaLoss::kWeightedMse, pred, target, g, 50, r);
    grad::backward(loss);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = pred.data()(i, 0);
      const double w = 1.0 + (1.0 - target[i]) + (1.0 - p);
      CHECK(pred.grad()(i, 0) == doctest::Approx(2.0 * w * (p - target[i]) / n).epsilon(1e-12));
    }
  }
}

TEST_CASE("select_pipelines") {
  CHECK(select_pipelines(std::vector<double>{0.5, 0.1, 0.9}, 1) == std::vector<std::size_t>{1});
  CHECK(select_pipelines(std::vector<double>{0.5, 0.1, 0.9}, 3) == std::vector<std::size_t>{1, 0, 2});
  CHECK(select_pipelines(std::vector<double>{0.3, 0.1, 0.1}, 2) == std::vector<std::size_t>{1, 2});
  CHECK_THROWS_AS(select_pipelines(std::vector<double>{0.3}, 2), ContractError);
  CHECK_THROWS_AS(select_pipelines(std::vector<double>{0.3}, 0), ContractError);
}

TEST_CASE("ensemble normalization") {
  const std::vector<int> y{0, 0, 1, 0, 1, 0};
  const std::vector<double> s{0.1, 0.5, 0.9, 0.2, 0.4, 0.3};
  const double single = metrics::auc_roc(s, y);
  CHECK(metrics::auc_roc(ensemble_normalized({s}), y) == single);
  std::vector<double> warped;
  for (double v : s) warped.push_back(100 * v * v * v - 4);
  CHECK(metrics::auc_roc(ensemble_normalized({s, warped}), y) == single);
  std::vector<double> neg;
  for (double v : s) neg.push_back(-v);
  const auto cancel = ensemble_normalized({s, neg});
  for (double v : cancel) CHECK(v == doctest::Approx(0.5));
  const auto toy = anomgym::testing::separable_toy();
  const std::vector<double> ts = toy->x.column(0);
  std::vector<double> tneg;
  for (double v : ts) tneg.push_back(-v);
  CHECK(metrics::auc_roc(ts, toy->y) == 1.0);
  for (double v : ensemble_normalized({ts, tneg})) CHECK(std::abs(v - 0.5) < 1e-12);
  const std::vector<double> bad{1.0, std::nan(""), 0, 0, 0, 0};
  CHECK(ensemble_normalized({s, bad}) == ensemble_normalized({s}));
  CHECK_THROWS_AS(ensemble_normalized({bad}), ContractError);
  CHECK(ensemble_normalized({std::vector<double>(6, 2.0)}) == std::vector<double>(6, 0.0));
}

TEST_CASE("ensemble_scores drops failed detectors") {
  const auto toy = anomgym::testing::separable_toy();
  const data::WeakView v = data::make_weak_view(toy, 10, 1);
  const Matrix xt = toy->x.select_rows(v.test);
  std::vector<std::optional<train::TrainedDetector>> dets;
  dets.emplace_back(train::train_pipeline(v, cheap(0), 0));
  dets.emplace_back(std::nullopt);
  const auto e = ensemble_scores(dets, xt);
  CHECK(e == ensemble_normalized({train::score_samples(*dets[0], xt)}));
  std::vector<std::optional<train::TrainedDetector>> none(2);
  CHECK_THROWS_AS(ensemble_scores(none, xt), ContractError);
}

TEST_CASE("baselines") {
  CHECK(select_random(64, 5) == select_random(64, 5));
  std::set<std::size_t> seen;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const std::size_t id = select_random(8, s);
    CHECK(id < 8);
    seen.insert(id);
  }
  CHECK(seen.size() == 8);

  const std::vector<double> auc{0.6, 0.9, 0.95, 0.7};
  CHECK(select_ground_truth(auc) == 2);
  CHECK(select_ground_truth(auc, std::vector<std::uint8_t>{0, 0, 1, 0}) == 1);

  const auto ds = small_dataset(3, "ss", 3.0);
  const data::WeakView v = data::make_weak_view(ds, 5, 0);
  const SupervisedSplit split = supervised_split(v, 1);
  std::size_t val_anom = 0;
  for (std::size_t i : split.validation) val_anom += split.train.parent->y[i];
  CHECK(val_anom >= 1);
  CHECK(split.train.labeled.size() >= 1);
  CHECK(split.train.labeled.size() + val_anom == 5);
  // the derived dataset knows only the revealed labels
  CHECK(split.train.parent->anomalies() == 5);
  for (std::size_t i : v.test) {
    CHECK(std::find(split.validation.begin(), split.validation.end(), i) == split.validation.end());
    CHECK(std::find(split.train.unlabeled.begin(), split.train.unlabeled.end(), i) == split.train.unlabeled.end());
  }
  CHECK_THROWS_AS(supervised_split(data::make_weak_view(ds, 1, 0), 1), ConfigError);

  space::DesignSpace sp;
  for (std::size_t l = 0; l < 4; ++l) sp.configs.push_back(cheap(l));
  const std::size_t pick = select_supervised(v, sp, 3);
  CHECK(pick < 4);
  CHECK(select_supervised(v, sp, 3) == pick);
}

TEST_CASE("refine_space") {
  space::DesignSpace sp;
  for (std::size_t a = 0; a < 4; ++a) {
    PipelineConfig c = PipelineConfig::small_mode_defaults();
    c.set(Dimension::kAugmentation, a);
    sp.configs.push_back(c);
  }
  metrics::PerformanceMatrix p({"x"}, 4, 10);
  const double means[4] = {0.8, 0.6, 0.7, 0.5};
  for (std::size_t j = 0; j < 4; ++j) p.set(0, j, means[j]);
  p.compute_ranks();
  const auto kept = refined_choices(p, sp);
  CHECK(kept[static_cast<std::size_t>(Dimension::kAugmentation)] == std::vector<std::size_t>{0, 2});
  const auto refined = refine_space(p, sp);
  REQUIRE(refined.configs.size() == 2);
  CHECK(refined.configs[0] == sp.configs[0]);
  CHECK(refined.configs[1] == sp.configs[2]);

  const double sym[4] = {0.4, 0.6, 0.6, 0.8};
  for (std::size_t j = 0; j < 4; ++j) p.set(0, j, sym[j]);
  CHECK(refined_choices(p, sp)[0] == std::vector<std::size_t>{1, 2, 3});

  // random spaces: refinement never leaves the original space
  const auto big = space::sample_space(space::SpaceMode::kSmall, 60, 2);
  metrics::PerformanceMatrix q({"a", "b"}, 60, 10);
  Rng rng(1);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 60; ++j) q.set(i, j, uniform01(rng));
  q.compute_ranks();
  const auto r = refine_space(q, big);
  CHECK(!r.configs.empty());
  for (const auto& c : r.configs)
    CHECK(std::find(big.configs.begin(), big.configs.end(), c) != big.configs.end());
}

TEST_CASE("assemble_meta_table") {
  const auto sp = space::sample_space(space::SpaceMode::kSmall, 10, 1);
  std::vector<metrics::PerformanceMatrix> perf;
  std::map<std::string, meta::MetaFeatureVector> mf;
  Rng rng(4);
  const std::vector<std::string> names{"a", "b", "c"};
  for (const auto& n : names) {
    meta::MetaFeatureVector v;
    v.values.resize(meta::kMetaFeatureLength);
    for (double& x : v.values) x = uniform01(rng) * 100;
    v.values[0] = 5.0;  // constant column
    mf[n] = v;
  }
  for (std::size_t n_a : {5, 10, 20}) {
    metrics::PerformanceMatrix p(names, 10, n_a);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 10; ++j) p.set(i, j, uniform01(rng));
    if (n_a == 20) p.set_failed(1, 4);
    p.compute_ranks();
    perf.push_back(p);
  }
  const MetaTable t = assemble_meta_table(perf, mf, sp);
  CHECK(t.rows.size() == 3 * 10 * 3 - 1);
  for (const MetaRow& r : t.rows) {
    CHECK(r.target > 0.0);
    CHECK(r.target <= 1.0);
    const auto& p = perf[r.n_a == 5 ? 0 : r.n_a == 10 ? 1 : 2];
    CHECK(r.target == p.rank(r.dataset, r.pipeline));
  }
  const Matrix f = t.feature_matrix();
  CHECK(f.cols() == MetaTable::width());
  for (std::size_t c = 0; c < meta::kMetaFeatureLength; ++c) {
    double m = 0, s = 0;
    for (std::size_t r = 0; r < f.rows(); ++r) m += f(r, c) / f.rows();
    for (std::size_t r = 0; r < f.rows(); ++r) s += (f(r, c) - m) * (f(r, c) - m) / f.rows();
    CHECK(std::abs(m) < 1e-9);
    if (c == 0) CHECK(s == 0.0);
    else CHECK(std::abs(std::sqrt(s) - 1.0) < 1e-9);
  }
  CHECK(t.only_n_a(5).rows.size() == 30);
  CHECK(t.without_dataset("b").rows.size() == 2 * 30);

  auto bad = mf;
  bad["a"].schema_version = 99;
  CHECK_THROWS_AS(assemble_meta_table(perf, bad, sp), ContractError);
  bad = mf;
  bad["c"].values.pop_back();
  CHECK_THROWS_AS(assemble_meta_table(perf, bad, sp), ContractError);
}

TEST_CASE("learnable table: held-out fit and rank recovery") {
  const auto sp = space::sample_space(space::SpaceMode::kSmall, 120, 4);
  const MetaTable full = learnable_table(sp);
  const auto truth = true_targets(sp);
  SUBCASE("gbdt") {
    const MetaPredictor f = train_fold_predictor(full, "d5", Backend::kGbdt, MetaLoss::kMse, 1);
    const auto pred = predict_pipeline_ranks(f, meta_of(full, 5), 10, sp);
    CHECK(pred.size() == sp.m_pipelines());
    double mse = 0;
    for (std::size_t j = 0; j < pred.size(); ++j) mse += (pred[j] - truth[j]) * (pred[j] - truth[j]) / pred.size();
    CHECK(mse < 1e-3);
    CHECK(spearman(pred, truth) > 0.95);
    CHECK(predict_pipeline_ranks(f, meta_of(full, 5), 10, sp) == pred);
    const auto h = f.history();
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] + 1e-15);
    const auto back = MetaPredictor::from_json(f.to_json());
    CHECK(predict_pipeline_ranks(back, meta_of(full, 5), 10, sp) == pred);
  }
  SUBCASE("neural, every loss ranks the held-out dataset") {
    for (MetaLoss loss : {MetaLoss::kMse, MetaLoss::kWeightedMse, MetaLoss::kPearson, MetaLoss::kRanknet}) {
      const MetaPredictor f = train_fold_predictor(full, "d5", Backend::kNeural, loss, 1);
      const auto pred = predict_pipeline_ranks(f, meta_of(full, 5), 10, sp);
      INFO(to_string(loss));
      CHECK(spearman(pred, truth) > 0.9);
      const auto back = MetaPredictor::from_json(f.to_json());
      CHECK(predict_pipeline_ranks(back, meta_of(full, 5), 10, sp) == pred);
    }
  }
  CHECK_THROWS_AS(train_meta_predictor(full, Backend::kGbdt, MetaLoss::kPearson, 0), ConfigError);
  meta::MetaFeatureVector wrong = meta_of(full, 0);
  wrong.schema_version = 7;
  const MetaPredictor f = train_meta_predictor(full, Backend::kGbdt, MetaLoss::kMse, 0);
  CHECK_THROWS_AS(predict_pipeline_ranks(f, wrong, 10, sp), ContractError);
}

TEST_CASE("zero-shot prediction trains nothing") {
  const auto sp = space::sample_space(space::SpaceMode::kSmall, 30, 4);
  const MetaTable full = learnable_table(sp);
  const MetaPredictor f = train_meta_predictor(full, Backend::kNeural, MetaLoss::kMse, 0);
  const auto before = train::train_pipeline_calls();
  const auto e = meta::meta_features(small_dataset(1, "new", 2.0)->x, 0);
  predict_pipeline_ranks(f, e, 5, sp);
  CHECK(train::train_pipeline_calls() == before);
}

TEST_CASE("leakage probe: held-out rows never reach the fold predictor") {
  const auto sp = space::sample_space(space::SpaceMode::kSmall, 40, 4);
  const MetaTable full = learnable_table(sp);
  MetaTable mutated = full;
  Rng rng(8);
  for (double& v : mutated.raw_meta[2]) v = uniform01(rng) * -50;
  for (MetaRow& r : mutated.rows)
    if (r.dataset == 2) r.target = uniform01(rng);
  mutated.restandardize();
  const auto probe = meta_of(full, 2);
  for (Backend b : {Backend::kGbdt, Backend::kNeural}) {
    const MetaPredictor f1 = train_fold_predictor(full, "d2", b, MetaLoss::kMse, 3);
    const MetaPredictor f2 = train_fold_predictor(mutated, "d2", b, MetaLoss::kMse, 3);
    CHECK(predict_pipeline_ranks(f1, probe, 10, sp) == predict_pipeline_ranks(f2, probe, 10, sp));
  }
}

TEST_CASE("cells: determinism across worker counts and repeat averaging") {
  const std::vector<data::DatasetPtr> dss{small_dataset(1, "c1", 3.0), small_dataset(2, "c2", 2.0)};
  space::DesignSpace sp;
  sp.configs = {cheap(0), cheap(4, 2), cheap(5)};
  PipelineConfig smote = cheap(0);
  smote.set(Dimension::kAugmentation, 2);
  sp.configs.push_back(smote);
  const std::vector<std::size_t> n_as{5};
  const std::vector<std::uint64_t> seeds{0, 1};
  CellCache one, two;
  std::size_t fresh = 0;
  fill_cells(one, dss, sp, n_as, seeds, 1, [&](const CellKey&, const CellResult&) { ++fresh; });
  fill_cells(two, dss, sp, n_as, seeds, 2);
  CHECK(fresh == 16);
  CHECK(one.size() == 16);
  for (const auto& ds : dss)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::uint64_t s : seeds) {
        const CellKey k{ds->name, j, 5, s};
        const auto a = one.find(k), b = two.find(k);
        REQUIRE(a);
        REQUIRE(b);
        CHECK(a->ok == b->ok);
        CHECK(a->auc_roc == b->auc_roc);
        CHECK(a->test_scores == b->test_scores);
        if (j == 3) CHECK(a->error_tag == "InsufficientNeighbors");
        else CHECK(a->ok);
      }
  fresh = 0;
  fill_cells(one, dss, sp, n_as, seeds, 1, [&](const CellKey&, const CellResult&) { ++fresh; });
  CHECK(fresh == 0);

  const auto perf = performance_matrices(one, {"c1", "c2"}, 4, n_as, seeds);
  REQUIRE(perf.size() == 1);
  const double avg = 0.5 * (one.find({"c1", 1, 5, 0})->auc_roc + one.find({"c1", 1, 5, 1})->auc_roc);
  CHECK(perf[0].raw(0, 1) == avg);
  CHECK(perf[0].is_failed(1, 3));
  CHECK(perf[0].rank(1, 3) == 1.0);
}

TEST_CASE("small lodo run") {
  LodoConfig cfg;
  cfg.datasets = {small_dataset(1, "l1", 3.0), small_dataset(2, "l2", 1.5), small_dataset(3, "l3", 2.5)};
  cfg.space.configs = {cheap(0), cheap(4), cheap(5), cheap(2, 2)};
  cfg.n_as = {5};
  cfg.seeds = {0};
  cfg.top_k = 2;
  CellCache cache;
  const LodoReport rep = run_lodo(cfg, cache);
  CHECK(rep.folds.size() == 3);
  for (const LodoFold& f : rep.folds) {
    CHECK(f.error.empty());
    CHECK(f.top_k_ids.size() == 2);
    CHECK(f.gt.auc_roc >= f.top1.auc_roc);
    CHECK(f.gt.auc_roc >= f.rs.auc_roc);
    CHECK(f.gt.auc_roc >= f.ss.auc_roc);
  }
  const auto dir = std::filesystem::temp_directory_path() / "anomgym_lodo_test";
  std::filesystem::remove_all(dir);
  write_lodo_report(rep, dir);
  CHECK(std::filesystem::exists(dir / "lodo_folds.csv"));
  CHECK(std::filesystem::exists(dir / "lodo_folds.jsonl"));
  CHECK(std::filesystem::exists(dir / "lodo_summary.csv"));
  CHECK_THROWS_AS(
      [&] {
        LodoConfig two = cfg;
        two.datasets.pop_back();
        CellCache c;
        run_lodo(two, c);
      }(),
      ConfigError);
}
