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
#include <numeric>

#include "anomgym/datahub.hpp"
#include "anomgym/error.hpp"
#include "anomgym/kernels.hpp"

namespace anomgym::data {

WeakView augment(const WeakView& view, AugmentKind kind, std::uint64_t seed) {
  WeakView out = view;
  if (kind == AugmentKind::kOrigin) return out;
  const Dataset& ds = *view.parent;
  const std::size_t d = ds.d();
  const std::size_t n_lab = view.labeled.size();
  if (n_lab == 0) throw ContractError("augment: no labeled anomalies");
  if (kind == AugmentKind::kSmote && n_lab < kSmoteNeighbors + 1) {
    throw InsufficientNeighbors("SMOTE needs at least " + std::to_string(kSmoteNeighbors + 1) +
                                " labeled anomalies for " + std::to_string(kSmoteNeighbors) +
                                " neighbours, got " + std::to_string(n_lab));
  }
  const Matrix anchors = ds.x.select_rows(view.labeled);
  const std::size_t target = view.unlabeled.size();
  if (out.synthetic.empty()) out.synthetic = Matrix(0, d);

  Rng rng(derive_seed(seed, ds.name, "augment"));
  std::vector<std::vector<std::size_t>> neighbours;
  if (kind == AugmentKind::kSmote) {
    const Matrix dist = kernels::pairwise_sq_dist(anchors, anchors);
    neighbours.resize(n_lab);
    for (std::size_t i = 0; i < n_lab; ++i) {
      std::vector<std::size_t> order(n_lab);
      std::iota(order.begin(), order.end(), 0);
      std::erase(order, i);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return dist(i, a) < dist(i, b); });
      order.resize(kSmoteNeighbors);
      neighbours[i] = std::move(order);
    }
  }

  std::vector<double> row(d);
  while (out.labeled_count() < target) {
    switch (kind) {
      case AugmentKind::kOversampling: {
        const auto a = anchors.row(uniform_index(rng, n_lab));
        std::copy(a.begin(), a.end(), row.begin());
        break;
      }
      case AugmentKind::kSmote: {
        const std::size_t i = uniform_index(rng, n_lab);
        const std::size_t j = neighbours[i][uniform_index(rng, kSmoteNeighbors)];
        const double u = uniform01(rng);
        for (std::size_t c = 0; c < d; ++c)
          row[c] = anchors(i, c) + u * (anchors(j, c) - anchors(i, c));
        break;
      }
      case AugmentKind::kMixup: {
        const std::size_t i = uniform_index(rng, n_lab);
        const std::size_t j = uniform_index(rng, n_lab);
        const double lambda = beta_sample(rng, kMixupAlpha, kMixupAlpha);
        for (std::size_t c = 0; c < d; ++c)
          row[c] = lambda * anchors(i, c) + (1.0 - lambda) * anchors(j, c);
        break;
      }
      case AugmentKind::kOrigin:
        break;
    }
    out.synthetic.append_row(row);
  }
  return out;
}

}  // namespace anomgym::data
