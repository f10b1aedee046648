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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "anomgym/gradcore.hpp"

namespace anomgym::grad {

enum class OptimizerKind : std::uint8_t { kSgd, kAdam, kRmsprop };

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double rho = 0.99;
  double eps = 1e-8;
};

/// Moment buffers and step counter for one parameter list.
///
/// Weight decay is decoupled for every kind: each step first applies
/// p <- p - lr * wd * p, then the kind's gradient update.
class Optimizer {
 public:
  explicit Optimizer(OptimizerSettings settings) : settings_(settings) {}

  /// Throws NumericError naming the first parameter with a non-finite gradient;
  /// no parameter is modified in that case.
  void step(std::span<Value> params);

  std::uint64_t steps() const noexcept { return step_; }
  const OptimizerSettings& settings() const noexcept { return settings_; }

 private:
  OptimizerSettings settings_;
  std::uint64_t step_ = 0;
  std::vector<Matrix> first_;
  std::vector<Matrix> second_;
};

}  // namespace anomgym::grad
