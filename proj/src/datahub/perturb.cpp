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

namespace anomgym::data {

Dataset perturb(const Dataset& ds, PerturbKind kind, std::uint64_t seed) {
  Dataset out;
  switch (kind) {
    case PerturbKind::kDuplicateAnomalies: {
      out.name = ds.name + "+dup";
      out.x = ds.x;
      out.y = ds.y;
      for (std::size_t r = 0; r < ds.n(); ++r) {
        if (ds.y[r] != 1) continue;
        for (int k = 0; k < kDuplicateCopies; ++k) {
          out.x.append_row(ds.x.row(r));
          out.y.push_back(1);
        }
      }
      out.provenance = "perturbed(duplicate_anomalies," + ds.name + ")";
      break;
    }
    case PerturbKind::kIrrelevantFeatures: {
      // ceil(0.3 * d) in integer arithmetic
      const std::size_t extra = (3 * ds.d() + 9) / 10;
      out.name = ds.name + "+irr";
      out.x = Matrix(ds.n(), ds.d() + extra);
      Rng rng(derive_seed(seed, ds.name, "irrelevant_features"));
      for (std::size_t r = 0; r < ds.n(); ++r) {
        std::copy_n(ds.x.row(r).data(), ds.d(), out.x.row(r).data());
        for (std::size_t c = 0; c < extra; ++c) out.x(r, ds.d() + c) = uniform01(rng);
      }
      out.y = ds.y;
      out.provenance = "perturbed(irrelevant_features," + ds.name + ")";
      break;
    }
    case PerturbKind::kLabelFlip:
      throw ContractError(
          "label_flip acts on the train portion of a weak view; a bare dataset has no train split");
  }
  out.validate();
  return out;
}

WeakView flip_train_labels(const WeakView& view, std::uint64_t seed) {
  if (!view.synthetic.empty()) {
    throw ContractError("flip_train_labels must run before augmentation");
  }
  const Dataset& ds = *view.parent;
  std::vector<std::size_t> train(view.unlabeled);
  train.insert(train.end(), view.labeled.begin(), view.labeled.end());
  std::sort(train.begin(), train.end());
  const std::size_t n_flip = train.size() / 10;  // floor(0.1 * n_train)

  Rng rng(derive_seed(seed, ds.name, "label_flip"));
  std::vector<std::size_t> pick = train;
  std::shuffle(pick.begin(), pick.end(), rng);
  pick.resize(n_flip);

  auto flipped = std::make_shared<Dataset>(ds);
  flipped->name = ds.name + "+flip";
  flipped->provenance = "perturbed(label_flip," + ds.name + ")";
  for (std::size_t i : pick) flipped->y[i] = 1 - flipped->y[i];

  std::vector<std::size_t> anomalies;
  std::vector<std::size_t> rest;
  for (std::size_t i : train) (flipped->y[i] == 1 ? anomalies : rest).push_back(i);
  if (anomalies.size() < view.n_a) {
    throw ConfigError("label flip left " + std::to_string(anomalies.size()) +
                      " train anomalies, fewer than n_a=" + std::to_string(view.n_a));
  }
  std::shuffle(anomalies.begin(), anomalies.end(), rng);
  std::vector<std::size_t> labeled(anomalies.begin(), anomalies.begin() + view.n_a);
  rest.insert(rest.end(), anomalies.begin() + view.n_a, anomalies.end());
  std::sort(labeled.begin(), labeled.end());
  std::sort(rest.begin(), rest.end());
  flipped->validate();
  return make_weak_view(std::move(flipped), std::move(rest), std::move(labeled), view.test,
                        view.seed);
}

}  // namespace anomgym::data
