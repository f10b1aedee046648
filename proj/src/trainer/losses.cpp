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
#include <cmath>
#include <random>
#include <tuple>

#include "anomgym/error.hpp"
#include "anomgym/trainer.hpp"

namespace anomgym::train {
namespace {

struct Masks {
  grad::Value normal;
  grad::Value anomaly;
  double n_normal = 0.0;
  double n_anomaly = 0.0;
};

Masks class_masks(std::span<const double> labels) {
  Matrix n(labels.size(), 1);
  Matrix a(labels.size(), 1);
  Masks m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) throw ContractError("loss labels must be 0/1");
    (labels[i] == 1.0 ? a : n)(i, 0) = 1.0;
    (labels[i] == 1.0 ? m.n_anomaly : m.n_normal) += 1.0;
  }
  m.normal = grad::constant(std::move(n));
  m.anomaly = grad::constant(std::move(a));
  return m;
}

// sum(term * mask) / count
grad::Value masked_mean(const grad::Value& term, const grad::Value& mask, double count) {
  return grad::scale(grad::sum(grad::mul(term, mask)), 1.0 / count);
}

grad::Value two_sided(const grad::Value& normal_term, const grad::Value& anomaly_term,
                      const Masks& m) {
  grad::Value total;
  if (m.n_normal > 0) total = masked_mean(normal_term, m.normal, m.n_normal);
  if (m.n_anomaly > 0) {
    grad::Value a = masked_mean(anomaly_term, m.anomaly, m.n_anomaly);
    total = total ? grad::add(total, a) : a;
  }
  return total;
}

grad::Value one_minus(const grad::Value& s, double margin) {
  return grad::add_scalar(grad::scale(s, -1.0), margin);
}

}  // namespace

grad::Value compute_loss(const grad::Value& scores, std::span<const double> labels,
                         const LossParams& p, Rng& rng) {
  if (scores.cols() != 1 || scores.rows() != labels.size()) {
    throw DimensionError("compute_loss: scores " + scores.data().shape_string() + " vs " +
                         std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw ContractError("compute_loss: empty batch");
  const Masks m = class_masks(labels);
  const grad::Value& s = scores;
  switch (p.kind) {
    case Loss::kBce: {
      // -[y log sigma(s) + (1-y) log(1 - sigma(s))] = softplus(s) - y s
      return grad::mean(grad::sub(grad::softplus(s), grad::mul(s, m.anomaly)));
    }
    case Loss::kFocal: {
      Matrix sign(labels.size(), 1);
      Matrix alpha_t(labels.size(), 1);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        sign(i, 0) = labels[i] == 1.0 ? 1.0 : -1.0;
        alpha_t(i, 0) = labels[i] == 1.0 ? p.focal_alpha : 1.0 - p.focal_alpha;
      }
      // p_t = sigma(z), 1 - p_t = sigma(-z), -log p_t = softplus(-z)
      const grad::Value neg_z = grad::mul(s, grad::constant(std::move(sign)));
      const grad::Value neg_z_flipped = grad::scale(neg_z, -1.0);
      const grad::Value miss = grad::pow(grad::sigmoid(neg_z_flipped), p.focal_gamma);
      const grad::Value ce = grad::softplus(neg_z_flipped);
      return grad::mean(grad::mul(grad::mul(miss, ce), grad::constant(std::move(alpha_t))));
    }
    case Loss::kMinus:
      return two_sided(s, grad::relu(one_minus(s, p.minus_margin)), m);
    case Loss::kInverse: {
      const grad::Value distance = grad::softplus(s);
      return two_sided(distance, grad::pow(grad::add_scalar(distance, p.inverse_eps), -1.0), m);
    }
    case Loss::kHinge:
      return two_sided(grad::relu(s), grad::relu(one_minus(s, p.hinge_margin)), m);
    case Loss::kDeviation: {
      double mu = 0.0;
      double sigma = 1.0;
      if (p.frozen_reference) {
        std::tie(mu, sigma) = *p.frozen_reference;
      } else {
        // Mean and population std of reference_draws iid N(0,1) samples,
        // drawn from their joint law: mean ~ N(0, 1/n) independent of
        // n * var ~ chi^2(n - 1).
        const auto n = static_cast<double>(p.reference_draws);
        if (p.reference_draws < 2) throw ContractError("deviation loss needs >= 2 reference draws");
        std::normal_distribution<double> z(0.0, 1.0);
        std::chi_squared_distribution<double> chi2(n - 1.0);
        mu = z(rng) / std::sqrt(n);
        sigma = std::sqrt(chi2(rng) / n);
      }
      if (!(sigma >= 1e-12)) throw NumericError("deviation loss: reference std below 1e-12");
      const grad::Value dev = grad::add_scalar(grad::scale(s, 1.0 / sigma), -mu / sigma);
      const grad::Value normal_part = grad::mul(grad::abs(dev), m.normal);
      const grad::Value anomaly_part =
          grad::mul(grad::relu(one_minus(dev, p.deviation_margin)), m.anomaly);
      return grad::mean(grad::add(normal_part, anomaly_part));
    }
  }
  throw ContractError("unknown loss kind");
}

}  // namespace anomgym::train
