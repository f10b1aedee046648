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
#include "anomgym/optimizer.hpp"

#include <cmath>

namespace anomgym::grad {

void Optimizer::step(std::span<Value> params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = params[i].grad();
    for (double v : g.values()) {
      if (!std::isfinite(v)) {
        const std::string& n = params[i].name();
        throw NumericError("non-finite gradient in parameter '" +
                           (n.empty() ? std::to_string(i) : n) + "'");
      }
    }
  }
  if (first_.empty()) {
    for (const auto& p : params) {
      first_.emplace_back(p.rows(), p.cols());
      second_.emplace_back(p.rows(), p.cols());
    }
  } else if (first_.size() != params.size()) {
    throw DimensionError("optimizer bound to " + std::to_string(first_.size()) +
                         " parameters, got " + std::to_string(params.size()));
  }
  ++step_;
  const auto& s = settings_;
  const double lr = s.learning_rate;
  const double decay = lr * s.weight_decay;
  const double bias1 = 1.0 - std::pow(s.beta1, static_cast<double>(step_));
  const double bias2 = 1.0 - std::pow(s.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = params[i].mutable_data();
    const Matrix& g = params[i].grad();
    if (!p.same_shape(first_[i])) throw DimensionError("optimizer: parameter shape changed");
    Matrix& m = first_[i];
    Matrix& v = second_[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (decay != 0.0) p[j] -= decay * p[j];
      switch (s.kind) {
        case OptimizerKind::kSgd:
          p[j] -= lr * g[j];
          break;
        case OptimizerKind::kAdam: {
          m[j] = s.beta1 * m[j] + (1.0 - s.beta1) * g[j];
          v[j] = s.beta2 * v[j] + (1.0 - s.beta2) * g[j] * g[j];
          const double mhat = m[j] / bias1;
          const double vhat = v[j] / bias2;
          p[j] -= lr * mhat / (std::sqrt(vhat) + s.eps);
          break;
        }
        case OptimizerKind::kRmsprop:
          v[j] = s.rho * v[j] + (1.0 - s.rho) * g[j] * g[j];
          p[j] -= lr * g[j] / (std::sqrt(v[j]) + s.eps);
          break;
      }
    }
  }
}

}  // namespace anomgym::grad
