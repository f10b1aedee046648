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
#include <unordered_set>

#include "anomgym/datahub.hpp"
#include "anomgym/error.hpp"

namespace anomgym::data {

WeakView make_weak_view(DatasetPtr ds, std::size_t n_a, std::uint64_t seed) {
  if (!ds) throw ContractError("make_weak_view: null dataset");
  ds->validate();
  if (ds->n() < kMinSamples) {
    throw ConfigError(ds->name + ": fewer than " + std::to_string(kMinSamples) + " samples");
  }
  std::vector<std::size_t> anomalies;
  std::vector<std::size_t> normals;
  for (std::size_t i = 0; i < ds->n(); ++i) (ds->y[i] == 1 ? anomalies : normals).push_back(i);

  Rng split_rng(derive_seed(seed, ds->name, "split"));
  std::shuffle(anomalies.begin(), anomalies.end(), split_rng);
  std::shuffle(normals.begin(), normals.end(), split_rng);

  const std::size_t n = ds->n();
  const auto n_test = static_cast<std::size_t>(std::ceil(kTestFraction * static_cast<double>(n)));
  auto test_a = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_test * anomalies.size()) / static_cast<double>(n)));
  test_a = std::clamp<std::size_t>(test_a, 1, anomalies.size() - 1);
  const std::size_t test_n = std::min(n_test - test_a, normals.size() - 1);

  std::vector<std::size_t> test(anomalies.begin(), anomalies.begin() + test_a);
  test.insert(test.end(), normals.begin(), normals.begin() + test_n);
  std::vector<std::size_t> train_a(anomalies.begin() + test_a, anomalies.end());
  if (train_a.size() < n_a) {
    throw ConfigError(ds->name + ": n_a=" + std::to_string(n_a) + " exceeds the " +
                      std::to_string(train_a.size()) + " anomalies in the training split");
  }
  // Revealed anomalies are a prefix of one shuffle, so smaller n_a reveal
  // subsets of larger ones.
  std::sort(train_a.begin(), train_a.end());
  Rng reveal_rng(derive_seed(seed, ds->name, "reveal"));
  std::shuffle(train_a.begin(), train_a.end(), reveal_rng);

  WeakView v;
  v.parent = ds;
  v.labeled.assign(train_a.begin(), train_a.begin() + n_a);
  v.unlabeled.assign(train_a.begin() + n_a, train_a.end());
  v.unlabeled.insert(v.unlabeled.end(), normals.begin() + test_n, normals.end());
  v.test = std::move(test);
  std::sort(v.labeled.begin(), v.labeled.end());
  std::sort(v.unlabeled.begin(), v.unlabeled.end());
  std::sort(v.test.begin(), v.test.end());
  v.n_a = n_a;
  v.seed = seed;
  return v;
}

WeakView make_weak_view(DatasetPtr ds, std::vector<std::size_t> unlabeled,
                        std::vector<std::size_t> labeled, std::vector<std::size_t> test,
                        std::uint64_t seed) {
  if (!ds) throw ContractError("make_weak_view: null dataset");
  std::unordered_set<std::size_t> seen;
  for (const auto* set : {&unlabeled, &labeled, &test}) {
    for (std::size_t i : *set) {
      if (i >= ds->n()) throw ContractError("make_weak_view: index out of range");
      if (!seen.insert(i).second) throw ContractError("make_weak_view: index sets overlap");
    }
  }
  for (std::size_t i : labeled) {
    if (ds->y[i] != 1) throw ContractError("make_weak_view: labeled index is not an anomaly");
  }
  WeakView v;
  v.parent = std::move(ds);
  v.n_a = labeled.size();
  v.unlabeled = std::move(unlabeled);
  v.labeled = std::move(labeled);
  v.test = std::move(test);
  v.seed = seed;
  return v;
}

PreprocessParams PreprocessParams::fit(PreprocessKind kind, const Matrix& train) {
  PreprocessParams p;
  p.kind = kind;
  if (kind == PreprocessKind::kMinMax) {
    const std::size_t d = train.cols();
    p.f_min.assign(d, 0.0);
    p.f_max.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
      double lo = train.rows() ? train(0, c) : 0.0;
      double hi = lo;
      for (std::size_t r = 1; r < train.rows(); ++r) {
        lo = std::min(lo, train(r, c));
        hi = std::max(hi, train(r, c));
      }
      p.f_min[c] = lo;
      p.f_max[c] = hi;
    }
  }
  return p;
}

Matrix PreprocessParams::apply(const Matrix& x) const {
  Matrix out = x;
  if (kind == PreprocessKind::kMinMax) {
    if (x.cols() != f_min.size()) {
      throw DimensionError("preprocess: expected " + std::to_string(f_min.size()) +
                           " columns, got " + std::to_string(x.cols()));
    }
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) {
        const double span = f_max[c] - f_min[c];
        if (span <= 0.0) {
          out(r, c) = range_lo;
          continue;
        }
        const double v = (x(r, c) - f_min[c]) * (range_hi - range_lo) / span + range_lo;
        out(r, c) = std::clamp(v, range_lo, range_hi);
      }
    }
  } else {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      double norm = 0.0;
      for (double v : x.row(r)) norm += v * v;
      norm = std::sqrt(norm);
      if (norm == 0.0) continue;
      for (double& v : out.row(r)) v /= norm;
    }
  }
  return out;
}

Matrix raw_train_matrix(const WeakView& view) {
  const Dataset& ds = *view.parent;
  Matrix x(view.train_size(), ds.d());
  std::size_t r = 0;
  for (const auto* set : {&view.unlabeled, &view.labeled}) {
    for (std::size_t i : *set) std::copy_n(ds.x.row(i).data(), ds.d(), x.row(r++).data());
  }
  for (std::size_t i = 0; i < view.synthetic.rows(); ++i) {
    std::copy_n(view.synthetic.row(i).data(), ds.d(), x.row(r++).data());
  }
  return x;
}

PreparedData preprocess(const WeakView& view, PreprocessKind kind) {
  PreparedData out;
  const Matrix raw = raw_train_matrix(view);
  out.params = PreprocessParams::fit(kind, raw);
  out.x_train = out.params.apply(raw);
  out.n_unlabeled = view.unlabeled.size();
  out.y_train.assign(raw.rows(), 1.0);
  std::fill_n(out.y_train.begin(), out.n_unlabeled, 0.0);
  out.x_test = out.params.apply(view.parent->x.select_rows(view.test));
  out.y_test.reserve(view.test.size());
  for (std::size_t i : view.test) out.y_test.push_back(view.parent->y[i]);
  return out;
}

}  // namespace anomgym::data
