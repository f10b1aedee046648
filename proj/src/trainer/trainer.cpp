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
#include <atomic>
#include <cmath>

#include "anomgym/error.hpp"
#include "anomgym/optimizer.hpp"
#include "anomgym/trainer.hpp"

namespace anomgym::train {
namespace {

std::atomic<std::uint64_t> g_train_calls{0};

void copy_row(const Matrix& src, std::size_t from, Matrix& dst, std::size_t to) {
  auto in = src.row(from);
  std::copy(in.begin(), in.end(), dst.row(to).begin());
}

}  // namespace

Batch resample_batch(const data::PreparedData& train, std::size_t batch_size, Loss loss,
                     Rng& rng) {
  if (batch_size == 0) throw ContractError("resample_batch: batch_size must be positive");
  const std::size_t n_train = train.x_train.rows();
  if (n_train == 0) throw ContractError("resample_batch: empty training set");
  Batch b{Matrix(batch_size, train.x_train.cols()), std::vector<double>(batch_size)};
  if (loss == Loss::kInverse) {
    for (std::size_t i = 0; i < batch_size; ++i) {
      const std::size_t r = uniform_index(rng, n_train);
      copy_row(train.x_train, r, b.x, i);
      b.y[i] = train.y_train[r];
    }
    return b;
  }
  const std::size_t n_unl = train.n_unlabeled;
  const std::size_t n_lab = n_train - n_unl;
  if (n_unl == 0 || n_lab == 0) {
    throw ContractError("resample_batch: both the unlabeled pool and the labeled set must be non-empty");
  }
  const std::size_t half = batch_size / 2;
  for (std::size_t i = 0; i < batch_size; ++i) {
    const bool labeled = i >= half;
    const std::size_t r = labeled ? n_unl + uniform_index(rng, n_lab) : uniform_index(rng, n_unl);
    copy_row(train.x_train, r, b.x, i);
    b.y[i] = labeled ? 1.0 : 0.0;
  }
  return b;
}

TrainedDetector train_pipeline(const data::WeakView& view, const space::PipelineConfig& cfg,
                               std::uint64_t seed) {
  g_train_calls.fetch_add(1, std::memory_order_relaxed);
  const std::string& name = view.parent->name;

  const data::WeakView augmented =
      data::augment(view, cfg.augmentation(), derive_seed(seed, name, "augment"));
  data::PreparedData prepared = data::preprocess(augmented, cfg.preprocessing());
  // Only the train rows are needed from here on.
  prepared.x_test = Matrix();
  prepared.y_test.clear();

  TrainedDetector det{net::build_network(view.d(), cfg, derive_seed(seed, name, "network")),
                      prepared.params, cfg, {}, seed, view.d()};
  if (cfg.initialization() == space::Initialization::kPretrained) {
    net::pretrain_encoder(det.net, prepared.x_train, cfg.epochs(),
                          derive_seed(seed, name, "pretrain"));
  }

  grad::Optimizer opt({.kind = cfg.optimizer(),
                       .learning_rate = cfg.learning_rate(),
                       .weight_decay = cfg.weight_decay()});
  std::vector<grad::Value> params = det.net.parameter_values();
  LossParams loss;
  loss.kind = cfg.loss();
  const auto batch = static_cast<std::size_t>(cfg.batch_size());
  const std::size_t steps =
      std::min(kMaxStepsPerEpoch, (augmented.train_size() + batch - 1) / batch);

  Rng batch_rng(derive_seed(seed, name, "batches"));
  Rng dropout_rng(derive_seed(seed, name, "dropout"));
  Rng loss_rng(derive_seed(seed, name, "loss"));
  det.history.reserve(static_cast<std::size_t>(cfg.epochs()));
  for (int epoch = 0; epoch < cfg.epochs(); ++epoch) {
    double total = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      Batch b = resample_batch(prepared, batch, cfg.loss(), batch_rng);
      const grad::Value scores =
          det.net.forward(grad::constant(std::move(b.x)), /*train=*/true, dropout_rng);
      const grad::Value value = compute_loss(scores, b.y, loss, loss_rng);
      if (!std::isfinite(value.item())) {
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
      }
      grad::zero_grad(params);
      grad::backward(value);
      opt.step(params);
      total += value.item();
    }
    det.history.push_back(total / static_cast<double>(steps));
  }
  return det;
}

std::vector<double> score_samples(const TrainedDetector& det, const Matrix& x) {
  if (x.cols() != det.input_dim) {
    throw ContractError("score_samples: expected " + std::to_string(det.input_dim) +
                        " features, got " + std::to_string(x.cols()));
  }
  return det.net.score(det.preprocess.apply(x));
}

nlohmann::json to_json(const TrainedDetector& det) {
  nlohmann::json j;
  j["config"] = space::to_json(det.config);
  j["seed"] = det.seed;
  j["input_dim"] = det.input_dim;
  j["preprocess"] = {{"kind", det.preprocess.kind == data::PreprocessKind::kMinMax
                                  ? "minmax"
                                  : "normalization"},
                     {"min", det.preprocess.f_min},
                     {"max", det.preprocess.f_max}};
  j["history"] = det.history;
  j["parameters"] = det.net.to_json();
  return j;
}

std::uint64_t train_pipeline_calls() { return g_train_calls.load(std::memory_order_relaxed); }

}  // namespace anomgym::train
