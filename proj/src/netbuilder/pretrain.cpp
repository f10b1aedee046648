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
#include "anomgym/netbuilder.hpp"
#include "anomgym/optimizer.hpp"

namespace anomgym::net {
namespace {

struct DecoderLayer {
  grad::Value weight;
  grad::Value bias;
};

std::vector<DecoderLayer> mirror_decoder(const DetectorNet& net, Rng& rng) {
  std::vector<DecoderLayer> layers;
  const auto& L = net.layout();
  if (net.architecture() == Architecture::kAutoencoder) {
    for (const auto& a : L.decoder)
      layers.push_back({net.params()[a.weight].value, net.params()[a.bias].value});
    return layers;
  }
  std::vector<std::size_t> widths;
  if (net.architecture() == Architecture::kFtTransformer) {
    widths = {kTokenDim, net.input_dim()};
  } else {
    for (auto it = L.hidden.rbegin(); it != L.hidden.rend(); ++it) widths.push_back(it->out);
    widths.push_back(net.input_dim());
  }
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[i]));
    std::uniform_real_distribution<double> u(-bound, bound);
    Matrix w(widths[i], widths[i + 1]);
    Matrix b(1, widths[i + 1]);
    for (double& v : w.values()) v = u(rng);
    for (double& v : b.values()) v = u(rng);
    layers.push_back({grad::parameter(std::move(w), "pre_dec" + std::to_string(i) + ".w"),
                      grad::parameter(std::move(b), "pre_dec" + std::to_string(i) + ".b")});
  }
  return layers;
}

grad::Value reconstruct(const DetectorNet& net, const std::vector<DecoderLayer>& dec,
                        const grad::Value& x, bool train, Rng& rng) {
  grad::Value z = net.encode(x, train, rng);
  for (std::size_t i = 0; i < dec.size(); ++i) {
    z = grad::add(grad::matmul(z, dec[i].weight), dec[i].bias);
    if (i + 1 < dec.size()) z = apply_activation(net.activation(), z);
  }
  return z;
}

double full_loss(const DetectorNet& net, const std::vector<DecoderLayer>& dec, const Matrix& x) {
  Rng unused(0);
  const grad::Value in = grad::constant(x);
  const grad::Value diff = grad::sub(reconstruct(net, dec, in, false, unused), in);
  return grad::mean(grad::mul(diff, diff)).item();
}

}  // namespace

PretrainResult pretrain_encoder(DetectorNet& net, const Matrix& x_train, int epochs,
                                std::uint64_t seed) {
  if (x_train.cols() != net.input_dim()) {
    throw DimensionError("pretrain_encoder: data width does not match the network");
  }
  if (x_train.rows() == 0) throw ContractError("pretrain_encoder: no training rows");
  Rng rng(derive_seed(seed, "network", "pretrain"));
  const auto decoder = mirror_decoder(net, rng);

  std::vector<grad::Value> params = net.encoder_parameter_values();
  if (net.architecture() != Architecture::kAutoencoder) {
    for (const auto& l : decoder) {
      params.push_back(l.weight);
      params.push_back(l.bias);
    }
  }
  grad::Optimizer opt({grad::OptimizerKind::kAdam, kPretrainLearningRate, 0.0});

  PretrainResult result;
  result.initial_loss = full_loss(net, decoder, x_train);
  const std::size_t n = x_train.rows();
  const std::size_t batch = std::min(kPretrainBatch, n);
  const std::size_t steps = std::min(kPretrainMaxSteps, (n + batch - 1) / batch);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < batch; ++i) rows.push_back(order[(s * batch + i) % n]);
      const grad::Value xb = grad::constant(x_train.select_rows(rows));
      const grad::Value diff = grad::sub(reconstruct(net, decoder, xb, true, rng), xb);
      const grad::Value loss = grad::mean(grad::mul(diff, diff));
      grad::zero_grad(params);
      grad::backward(loss);
      opt.step(params);
      total += loss.item();
    }
    result.history.push_back(total / static_cast<double>(steps));
  }
  result.final_loss = full_loss(net, decoder, x_train);
  return result;
}

}  // namespace anomgym::net
