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
#include <string>
#include <vector>

#include <json.hpp>

#include "anomgym/designspace.hpp"
#include "anomgym/gradcore.hpp"

namespace anomgym::net {

using space::Activation;
using space::Architecture;
using space::Initialization;

enum class ParamRole : std::uint8_t {
  kWeight,
  kBias,
  kNormGain,  // layer-norm scale, always starts at 1
  kNormBias,  // layer-norm shift, always starts at 0
};

struct Param {
  grad::Value value;
  ParamRole role = ParamRole::kWeight;
  std::size_t fan_in = 1;
  std::size_t fan_out = 1;
  bool encoder = false;  // part of the prefix that pre-training fits
};

struct Affine {
  std::size_t weight = 0;  // index into DetectorNet params
  std::size_t bias = 0;
  bool has_bias = true;
  std::size_t in = 0;
  std::size_t out = 0;
};

/// FT-Transformer hyper-parameters. One block, two heads, 16-wide tokens.
inline constexpr std::size_t kTokenDim = 16;
inline constexpr std::size_t kHeads = 2;
inline constexpr std::size_t kFeedForwardMultiplier = 2;

/// Tabular anomaly detector: maps a b x d batch to b x 1 raw scores, higher
/// meaning more anomalous.
class DetectorNet {
 public:
  Architecture architecture() const noexcept { return arch_; }
  std::size_t input_dim() const noexcept { return d_; }
  Activation activation() const noexcept { return act_; }
  double dropout_rate() const noexcept { return dropout_; }

  grad::Value forward(const grad::Value& x, bool train, Rng& rng) const;
  /// Eval-mode scores of a plain matrix.
  std::vector<double> score(const Matrix& x) const;

  /// Output of the encoder prefix (b x encoding_width()).
  grad::Value encode(const grad::Value& x, bool train, Rng& rng) const;
  std::size_t encoding_width() const;

  std::vector<Param>& params() noexcept { return params_; }
  const std::vector<Param>& params() const noexcept { return params_; }
  std::vector<grad::Value> parameter_values() const;
  std::vector<grad::Value> encoder_parameter_values() const;
  std::size_t parameter_count() const;

  /// Shape-tagged parameter lists: [{"name", "rows", "cols", "values"}...].
  nlohmann::json to_json() const;
  void load_json(const nlohmann::json& j);

  // Layout, filled by build_network.
  struct Layout {
    std::vector<Affine> hidden;       // mlp/autoencoder encoder, resnet blocks
    std::vector<Affine> projections;  // resnet skip projections (has_bias=false)
    std::vector<bool> has_projection;
    std::vector<Affine> decoder;      // autoencoder
    Affine head;
    // fttransformer
    std::size_t token_weight = 0, token_bias = 0, cls = 0;
    std::size_t ln1_gain = 0, ln1_bias = 0, ln2_gain = 0, ln2_bias = 0;
    std::size_t ln_head_gain = 0, ln_head_bias = 0;
    Affine q, k, v, o, ff1, ff2;
  };
  const Layout& layout() const noexcept { return layout_; }

 private:
  friend DetectorNet build_network(std::size_t d, const space::PipelineConfig& cfg,
                                   std::uint64_t seed);
  friend grad::Value apply_affine(const DetectorNet& net, const Affine& a, const grad::Value& x);

  grad::Value activate(const grad::Value& x) const;
  grad::Value transformer_tokens(const grad::Value& x, bool train, Rng& rng) const;

  Architecture arch_ = Architecture::kMlp;
  Activation act_ = Activation::kRelu;
  double dropout_ = 0.0;
  std::size_t d_ = 0;
  std::vector<Param> params_;
  Layout layout_;
};

grad::Value apply_affine(const DetectorNet& net, const Affine& a, const grad::Value& x);
grad::Value apply_activation(Activation act, const grad::Value& x);

inline constexpr double kLeakySlope = 0.01;

/// Builds the architecture and initializes it with cfg.initialization()
/// (pretrained falls back to default; pretrain_encoder does the rest).
DetectorNet build_network(std::size_t d, const space::PipelineConfig& cfg, std::uint64_t seed);

/// default: U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases;
/// xavier_normal: N(0, sqrt(2/(fan_in+fan_out))); kaiming_normal: N(0, sqrt(2/fan_in));
/// biases are zero for the normal initializers. Layer-norm parameters are
/// reset to (1, 0). kPretrained behaves like kDefault.
void init_params(DetectorNet& net, Initialization kind, std::uint64_t seed);

struct PretrainResult {
  double initial_loss = 0.0;  // full-data reconstruction MSE before training
  double final_loss = 0.0;
  std::vector<double> history;  // mean batch loss per epoch
};

inline constexpr double kPretrainLearningRate = 1e-3;
inline constexpr std::size_t kPretrainBatch = 64;
inline constexpr std::size_t kPretrainMaxSteps = 20;

/// Fits encoder + mirrored decoder on reconstruction MSE (Adam, lr 1e-3) and
/// keeps the encoder weights; the score head is left untouched.
PretrainResult pretrain_encoder(DetectorNet& net, const Matrix& x_train, int epochs,
                                std::uint64_t seed);

}  // namespace anomgym::net
