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
#include <algorithm>
#include <cmath>
#include <numeric>

#include "anomgym/error.hpp"
#include "anomgym/evalmetrics.hpp"
#include "anomgym/metasel.hpp"

namespace anomgym::select {

std::vector<double> ensemble_normalized(const std::vector<std::vector<double>>& scores) {
  std::vector<double> out;
  std::size_t used = 0;
  for (const auto& s : scores) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); })) {
      continue;
    }
    if (out.empty()) {
      out.assign(s.size(), 0.0);
    } else if (out.size() != s.size()) {
      throw DimensionError("ensemble: detectors scored different numbers of rows");
    }
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    const double range = *hi - *lo;
    for (std::size_t i = 0; i < s.size(); ++i) {
      out[i] += range > 0.0 ? (s[i] - *lo) / range : 0.0;
    }
    ++used;
  }
  if (used == 0) throw ContractError("ensemble: no detector produced usable scores");
  for (double& v : out) v /= static_cast<double>(used);
  return out;
}

std::vector<double> ensemble_scores(std::span<const std::optional<train::TrainedDetector>> detectors,
                                    const Matrix& x_test) {
  if (detectors.empty()) throw ContractError("ensemble: k must be at least 1");
  std::vector<std::vector<double>> scores;
  for (const auto& det : detectors) {
    if (!det) continue;
    try {
      scores.push_back(train::score_samples(*det, x_test));
    } catch (const Error&) {
      // a detector that cannot score is dropped
    }
  }
  return ensemble_normalized(scores);
}

std::size_t select_random(std::size_t m_pipelines, std::uint64_t seed) {
  if (m_pipelines == 0) throw ContractError("select_random: empty space");
  Rng rng(derive_seed(seed, "baseline", "random"));
  return uniform_index(rng, m_pipelines);
}

SupervisedSplit supervised_split(const data::WeakView& view, std::uint64_t seed) {
  if (view.synthetic.rows() != 0) {
    throw ContractError("supervised_split expects a view without synthetic rows");
  }
  if (view.labeled.size() < 2) {
    throw ConfigError("supervised selection needs n_a >= 2 (one labeled anomaly is held out), got " +
                      std::to_string(view.labeled.size()));
  }
  if (view.unlabeled.size() < 2) throw ConfigError("supervised selection needs >= 2 unlabeled rows");
  const data::Dataset& parent = *view.parent;
  Rng rng(derive_seed(seed, parent.name, "ss_split"));
  auto take = [&](std::vector<std::size_t> pool, std::vector<std::size_t>& fit,
                  std::vector<std::size_t>& hold) {
    std::shuffle(pool.begin(), pool.end(), rng);
    auto n_hold = static_cast<std::size_t>(
        std::llround(kSsValidationFraction * static_cast<double>(pool.size())));
    n_hold = std::clamp<std::size_t>(n_hold, 1, pool.size() - 1);
    hold.insert(hold.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_hold));
    fit.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_hold), pool.end());
    std::sort(fit.begin(), fit.end());
  };
  std::vector<std::size_t> unl_fit, lab_fit, validation;
  take(view.unlabeled, unl_fit, validation);
  take(view.labeled, lab_fit, validation);
  std::sort(validation.begin(), validation.end());

  // Only the revealed labels are visible to the selector.
  auto revealed = std::make_shared<data::Dataset>();
  revealed->name = parent.name + "/revealed";
  revealed->x = parent.x;
  revealed->y.assign(parent.n(), 0);
  for (std::size_t i : view.labeled) revealed->y[i] = 1;
  revealed->provenance = "revealed labels of " + parent.name;
  SupervisedSplit out{data::make_weak_view(revealed, std::move(unl_fit), std::move(lab_fit),
                                           validation, view.seed),
                      validation};
  return out;
}

std::size_t select_supervised(const data::WeakView& view, const space::DesignSpace& space,
                              std::uint64_t seed) {
  const SupervisedSplit split = supervised_split(view, seed);
  const std::size_t m = space.m_pipelines();
  std::vector<std::size_t> candidates(m);
  std::iota(candidates.begin(), candidates.end(), 0);
  if (m > kSsCandidates) {
    Rng rng(derive_seed(seed, view.parent->name, "ss_candidates"));
    for (std::size_t i = 0; i < kSsCandidates; ++i) {
      std::swap(candidates[i], candidates[i + uniform_index(rng, m - i)]);
    }
    candidates.resize(kSsCandidates);
    std::sort(candidates.begin(), candidates.end());
  }
  const data::Dataset& revealed = *split.train.parent;
  const Matrix x_val = revealed.x.select_rows(split.validation);
  std::vector<int> y_val;
  for (std::size_t i : split.validation) y_val.push_back(revealed.y[i]);

  std::size_t best = m;
  double best_auc = -1.0;
  for (std::size_t id : candidates) {
    try {
      const auto det = train::train_pipeline(split.train, space.configs[id], seed);
      const double auc = metrics::auc_roc(train::score_samples(det, x_val), y_val);
      if (auc > best_auc) {
        best_auc = auc;
        best = id;
      }
    } catch (const Error&) {
      // failed candidates are skipped
    }
  }
  if (best == m) throw ContractError("supervised selection: every candidate failed");
  return best;
}

std::size_t select_ground_truth(std::span<const double> test_auc,
                                std::span<const std::uint8_t> failed) {
  std::size_t best = test_auc.size();
  for (std::size_t j = 0; j < test_auc.size(); ++j) {
    if (!failed.empty() && failed[j]) continue;
    if (best == test_auc.size() || test_auc[j] > test_auc[best]) best = j;
  }
  if (best == test_auc.size()) throw ContractError("ground truth: every pipeline failed");
  return best;
}

std::vector<std::vector<std::size_t>> refined_choices(const metrics::PerformanceMatrix& p,
                                                      const space::DesignSpace& space) {
  if (p.m_pipelines != space.m_pipelines()) {
    throw ContractError("refine_space: performance matrix does not cover the space");
  }
  std::vector<std::vector<std::size_t>> kept;
  for (space::Dimension dim : space::all_dimensions()) {
    const std::size_t card = space::cardinality(dim);
    std::vector<double> sum(card, 0.0);
    std::vector<double> cnt(card, 0.0);
    for (std::size_t j = 0; j < space.m_pipelines(); ++j) {
      const std::size_t c = space.configs[j].choice(dim);
      for (std::size_t i = 0; i < p.n_datasets(); ++i) {
        if (p.is_failed(i, j)) continue;
        sum[c] += p.raw(i, j);
        cnt[c] += 1.0;
      }
    }
    std::vector<double> means;
    for (std::size_t c = 0; c < card; ++c) {
      if (cnt[c] > 0) means.push_back(sum[c] / cnt[c]);
    }
    std::vector<std::size_t> keep;
    if (means.empty()) {
      for (const auto& cfg : space.configs) keep.push_back(cfg.choice(dim));
      std::sort(keep.begin(), keep.end());
      keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    } else {
      std::sort(means.begin(), means.end());
      const std::size_t h = means.size() / 2;
      const double median = means.size() % 2 ? means[h] : 0.5 * (means[h - 1] + means[h]);
      for (std::size_t c = 0; c < card; ++c) {
        if (cnt[c] > 0 && sum[c] / cnt[c] >= median) keep.push_back(c);
      }
    }
    kept.push_back(std::move(keep));
  }
  return kept;
}

space::DesignSpace refine_space(const metrics::PerformanceMatrix& p, const space::DesignSpace& sp) {
  const auto kept = refined_choices(p, sp);
  space::DesignSpace out{sp.mode, {}, sp.seed};
  for (const auto& cfg : sp.configs) {
    bool ok = true;
    for (space::Dimension dim : space::all_dimensions()) {
      const auto& k = kept[static_cast<std::size_t>(dim)];
      ok = ok && std::find(k.begin(), k.end(), cfg.choice(dim)) != k.end();
    }
    if (ok) out.configs.push_back(cfg);
  }
  if (out.configs.empty()) {
    std::size_t best = sp.m_pipelines();
    double best_mean = -1.0;
    for (std::size_t j = 0; j < sp.m_pipelines(); ++j) {
      double s = 0.0;
      double n = 0.0;
      for (std::size_t i = 0; i < p.n_datasets(); ++i) {
        if (p.is_failed(i, j)) continue;
        s += p.raw(i, j);
        n += 1.0;
      }
      if (n > 0 && s / n > best_mean) {
        best_mean = s / n;
        best = j;
      }
    }
    if (best == sp.m_pipelines()) throw ContractError("refine_space: every cell failed");
    out.configs.push_back(sp.configs[best]);
  }
  return out;
}

}  // namespace anomgym::select
