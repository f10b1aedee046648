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
#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "anomgym/datahub.hpp"
#include "anomgym/designspace.hpp"
#include "anomgym/gradcore.hpp"
#include "anomgym/netbuilder.hpp"

namespace anomgym::train {

using space::Loss;

struct LossParams {
  Loss kind = Loss::kBce;
  double hinge_margin = 1.0;
  double minus_margin = 1.0;
  double deviation_margin = 5.0;
  std::size_t reference_draws = 5000;
  double focal_gamma = 2.0;
  double focal_alpha = 0.25;
  double inverse_eps = 1e-6;
  /// Pins the deviation reference (mean, std) instead of drawing it.
  std::optional<std::pair<double, double>> frozen_reference;
};

/// Mean-reduced loss of raw scores (b x 1) against 0/1 labels. Probabilistic
/// losses apply the sigmoid internally. For the per-class losses a class
/// missing from the batch contributes nothing.
grad::Value compute_loss(const grad::Value& scores, std::span<const double> labels,
                         const LossParams& params, Rng& rng);

struct Batch {
  Matrix x;
  std::vector<double> y;
};

/// Half/half batches: floor(b/2) rows from the unlabeled pool (label 0) and
/// ceil(b/2) from the labeled anomalies (label 1), both with replacement.
/// The inverse loss instead draws uniformly from all training rows and keeps
/// their labels.
Batch resample_batch(const data::PreparedData& train, std::size_t batch_size, Loss loss,
                     Rng& rng);

inline constexpr std::size_t kMaxStepsPerEpoch = 20;

struct TrainedDetector {
  net::DetectorNet net;
  data::PreprocessParams preprocess;
  space::PipelineConfig config;
  std::vector<double> history;  // mean batch loss per epoch
  std::uint64_t seed = 0;
  std::size_t input_dim = 0;
};

/// augment -> preprocess -> build/init (+ pre-training) -> epochs x steps of
/// resample/loss/update. Component errors propagate as exceptions.
TrainedDetector train_pipeline(const data::WeakView& view, const space::PipelineConfig& cfg,
                               std::uint64_t seed);

/// Eval-mode scores of raw (unpreprocessed) rows; higher = more anomalous.
std::vector<double> score_samples(const TrainedDetector& det, const Matrix& x);

nlohmann::json to_json(const TrainedDetector& det);

/// Number of train_pipeline invocations in this process.
std::uint64_t train_pipeline_calls();

}  // namespace anomgym::train
