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
#include "anomgym/netbuilder.hpp"

#include <cmath>
#include <numeric>

#include "anomgym/error.hpp"

namespace anomgym::net {
namespace {

std::size_t add_param(std::vector<Param>& params, std::size_t rows, std::size_t cols,
                      ParamRole role, std::size_t fan_in, std::size_t fan_out, bool encoder,
                      std::string name) {
  Param p;
  p.value = grad::parameter(Matrix(rows, cols), std::move(name));
  p.role = role;
  p.fan_in = fan_in;
  p.fan_out = fan_out;
  p.encoder = encoder;
  params.push_back(std::move(p));
  return params.size() - 1;
}

Affine add_affine(std::vector<Param>& params, std::size_t in, std::size_t out, bool encoder,
                  const std::string& name, bool bias = true) {
  Affine a;
  a.in = in;
  a.out = out;
  a.weight = add_param(params, in, out, ParamRole::kWeight, in, out, encoder, name + ".w");
  a.has_bias = bias;
  if (bias) a.bias = add_param(params, 1, out, ParamRole::kBias, in, out, encoder, name + ".b");
  return a;
}

grad::Value layer_norm_affine(const DetectorNet& net, const grad::Value& x, std::size_t gain,
                              std::size_t bias) {
  return grad::add(grad::mul(grad::layer_norm(x), net.params()[gain].value),
                   net.params()[bias].value);
}

std::vector<std::size_t> stride_rows(std::size_t batch, std::size_t stride) {
  std::vector<std::size_t> rows(batch);
  for (std::size_t g = 0; g < batch; ++g) rows[g] = g * stride;
  return rows;
}

}  // namespace

grad::Value apply_activation(Activation act, const grad::Value& x) {
  switch (act) {
    case Activation::kTanh: return grad::tanh(x);
    case Activation::kRelu: return grad::relu(x);
    case Activation::kLeakyRelu: return grad::leaky_relu(x, kLeakySlope);
  }
  return x;
}

grad::Value apply_affine(const DetectorNet& net, const Affine& a, const grad::Value& x) {
  grad::Value y = grad::matmul(x, net.params()[a.weight].value);
  if (a.has_bias) y = grad::add(y, net.params()[a.bias].value);
  return y;
}

grad::Value DetectorNet::activate(const grad::Value& x) const { return apply_activation(act_, x); }

grad::Value DetectorNet::transformer_tokens(const grad::Value& x, bool train, Rng& rng) const {
  const auto& L = layout_;
  const std::size_t t = d_ + 1;
  grad::Value tokens = grad::tokenize(x, params_[L.token_weight].value,
                                      params_[L.token_bias].value, params_[L.cls].value);
  // Attention sub-block (pre-norm).
  const grad::Value a = layer_norm_affine(*this, tokens, L.ln1_gain, L.ln1_bias);
  const grad::Value q = apply_affine(*this, L.q, a);
  const grad::Value k = apply_affine(*this, L.k, a);
  const grad::Value v = apply_affine(*this, L.v, a);
  const std::size_t head_dim = kTokenDim / kHeads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<grad::Value> heads;
  for (std::size_t h = 0; h < kHeads; ++h) {
    const std::size_t b = h * head_dim;
    const std::size_t e = b + head_dim;
    grad::Value scores = grad::scale(
        grad::group_matmul_nt(grad::slice_cols(q, b, e), grad::slice_cols(k, b, e), t), inv_sqrt);
    grad::Value attn = grad::dropout(grad::row_softmax(scores), dropout_, train, rng);
    heads.push_back(grad::group_matmul(attn, grad::slice_cols(v, b, e), t));
  }
  grad::Value mixed = apply_affine(*this, L.o, grad::concat_cols(heads));
  tokens = grad::add(tokens, grad::dropout(mixed, dropout_, train, rng));
  // Feed-forward sub-block.
  grad::Value f = layer_norm_affine(*this, tokens, L.ln2_gain, L.ln2_bias);
  f = grad::dropout(activate(apply_affine(*this, L.ff1, f)), dropout_, train, rng);
  f = apply_affine(*this, L.ff2, f);
  return grad::add(tokens, grad::dropout(f, dropout_, train, rng));
}

grad::Value DetectorNet::encode(const grad::Value& x, bool train, Rng& rng) const {
  if (x.cols() != d_) {
    throw DimensionError("network expects " + std::to_string(d_) + " features, got " +
                         std::to_string(x.cols()));
  }
  const auto& L = layout_;
  switch (arch_) {
    case Architecture::kMlp:
    case Architecture::kAutoencoder: {
      grad::Value h = x;
      for (const auto& a : L.hidden)
        h = grad::dropout(activate(apply_affine(*this, a, h)), dropout_, train, rng);
      return h;
    }
    case Architecture::kResnet: {
      grad::Value h = x;
      for (std::size_t i = 0; i < L.hidden.size(); ++i) {
        grad::Value branch =
            grad::dropout(activate(apply_affine(*this, L.hidden[i], h)), dropout_, train, rng);
        grad::Value skip = L.has_projection[i] ? apply_affine(*this, L.projections[i], h) : h;
        h = grad::add(skip, branch);
      }
      return h;
    }
    case Architecture::kFtTransformer: {
      grad::Value tokens = transformer_tokens(x, train, rng);
      return grad::gather_rows(tokens, stride_rows(x.rows(), d_ + 1));
    }
  }
  return x;
}

std::size_t DetectorNet::encoding_width() const {
  if (arch_ == Architecture::kFtTransformer) return kTokenDim;
  return layout_.hidden.back().out;
}

grad::Value DetectorNet::forward(const grad::Value& x, bool train, Rng& rng) const {
  const auto& L = layout_;
  grad::Value enc = encode(x, train, rng);
  switch (arch_) {
    case Architecture::kMlp:
    case Architecture::kResnet:
      return apply_affine(*this, L.head, enc);
    case Architecture::kAutoencoder: {
      grad::Value z = enc;
      for (std::size_t i = 0; i < L.decoder.size(); ++i) {
        z = apply_affine(*this, L.decoder[i], z);
        if (i + 1 < L.decoder.size()) z = activate(z);
      }
      const grad::Value diff = grad::sub(z, x);
      const grad::Value err =
          grad::scale(grad::row_sum(grad::mul(diff, diff)), 1.0 / static_cast<double>(d_));
      return apply_affine(*this, L.head, grad::concat_cols({enc, err}));
    }
    case Architecture::kFtTransformer: {
      grad::Value h = layer_norm_affine(*this, enc, L.ln_head_gain, L.ln_head_bias);
      return apply_affine(*this, L.head, activate(h));
    }
  }
  return enc;
}

std::vector<double> DetectorNet::score(const Matrix& x) const {
  Rng unused(0);
  const grad::Value out = forward(grad::constant(x), false, unused);
  return {out.data().values().begin(), out.data().values().end()};
}

std::vector<grad::Value> DetectorNet::parameter_values() const {
  std::vector<grad::Value> v;
  v.reserve(params_.size());
  for (const auto& p : params_) v.push_back(p.value);
  return v;
}

std::vector<grad::Value> DetectorNet::encoder_parameter_values() const {
  std::vector<grad::Value> v;
  for (const auto& p : params_)
    if (p.encoder) v.push_back(p.value);
  return v;
}

std::size_t DetectorNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.data().size();
  return n;
}

nlohmann::json DetectorNet::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : params_) {
    const Matrix& m = p.value.data();
    arr.push_back({{"name", p.value.name()},
                   {"rows", m.rows()},
                   {"cols", m.cols()},
                   {"values", m.storage()}});
  }
  return {{"architecture", space::dimension_info(space::Dimension::kArchitecture)
                               .choices[static_cast<std::size_t>(arch_)]},
          {"input_dim", d_},
          {"params", arr}};
}

void DetectorNet::load_json(const nlohmann::json& j) {
  const auto& arr = j.at("params");
  if (arr.size() != params_.size()) throw ContractError("parameter list length mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& e = arr[i];
    Matrix& m = params_[i].value.mutable_data();
    if (e.at("name").get<std::string>() != params_[i].value.name() ||
        e.at("rows").get<std::size_t>() != m.rows() || e.at("cols").get<std::size_t>() != m.cols()) {
      throw ContractError("parameter '" + params_[i].value.name() + "' does not match");
    }
    m = Matrix(m.rows(), m.cols(), e.at("values").get<std::vector<double>>());
  }
}

DetectorNet build_network(std::size_t d, const space::PipelineConfig& cfg, std::uint64_t seed) {
  if (d == 0) throw DimensionError("build_network: d must be at least 1");
  DetectorNet net;
  net.arch_ = cfg.architecture();
  net.act_ = cfg.activation();
  net.dropout_ = cfg.dropout();
  net.d_ = d;
  auto& P = net.params_;
  auto& L = net.layout_;
  const auto widths = cfg.hidden_layers();
  switch (net.arch_) {
    case Architecture::kMlp:
    case Architecture::kAutoencoder: {
      std::size_t in = d;
      for (std::size_t i = 0; i < widths.size(); ++i) {
        L.hidden.push_back(add_affine(P, in, widths[i], true, "enc" + std::to_string(i)));
        in = widths[i];
      }
      if (net.arch_ == Architecture::kAutoencoder) {
        for (std::size_t i = widths.size(); i-- > 0;) {
          const std::size_t out = i == 0 ? d : widths[i - 1];
          L.decoder.push_back(add_affine(P, widths[i], out, true, "dec" + std::to_string(i)));
        }
        L.head = add_affine(P, widths.back() + 1, 1, false, "head");
      } else {
        L.head = add_affine(P, widths.back(), 1, false, "head");
      }
      break;
    }
    case Architecture::kResnet: {
      std::size_t in = d;
      for (std::size_t i = 0; i < widths.size(); ++i) {
        L.hidden.push_back(add_affine(P, in, widths[i], true, "block" + std::to_string(i)));
        const bool proj = in != widths[i];
        L.has_projection.push_back(proj);
        L.projections.push_back(proj ? add_affine(P, in, widths[i], true,
                                                  "skip" + std::to_string(i), false)
                                     : Affine{});
        in = widths[i];
      }
      L.head = add_affine(P, widths.back(), 1, false, "head");
      break;
    }
    case Architecture::kFtTransformer: {
      const std::size_t e = kTokenDim;
      L.token_weight = add_param(P, d, e, ParamRole::kWeight, e, e, true, "tokens.w");
      L.token_bias = add_param(P, d, e, ParamRole::kBias, e, e, true, "tokens.b");
      L.cls = add_param(P, 1, e, ParamRole::kWeight, e, e, true, "tokens.cls");
      L.ln1_gain = add_param(P, 1, e, ParamRole::kNormGain, e, e, true, "ln1.g");
      L.ln1_bias = add_param(P, 1, e, ParamRole::kNormBias, e, e, true, "ln1.b");
      L.q = add_affine(P, e, e, true, "attn.q");
      L.k = add_affine(P, e, e, true, "attn.k");
      L.v = add_affine(P, e, e, true, "attn.v");
      L.o = add_affine(P, e, e, true, "attn.o");
      L.ln2_gain = add_param(P, 1, e, ParamRole::kNormGain, e, e, true, "ln2.g");
      L.ln2_bias = add_param(P, 1, e, ParamRole::kNormBias, e, e, true, "ln2.b");
      L.ff1 = add_affine(P, e, kFeedForwardMultiplier * e, true, "ff1");
      L.ff2 = add_affine(P, kFeedForwardMultiplier * e, e, true, "ff2");
      L.ln_head_gain = add_param(P, 1, e, ParamRole::kNormGain, e, e, false, "ln_head.g");
      L.ln_head_bias = add_param(P, 1, e, ParamRole::kNormBias, e, e, false, "ln_head.b");
      L.head = add_affine(P, e, 1, false, "head");
      break;
    }
  }
  const Initialization init = cfg.initialization() == Initialization::kPretrained
                                  ? Initialization::kDefault
                                  : cfg.initialization();
  init_params(net, init, seed);
  return net;
}

void init_params(DetectorNet& net, Initialization kind, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "network", "init"));
  for (auto& p : net.params()) {
    Matrix& m = p.value.mutable_data();
    const double fan_in = static_cast<double>(p.fan_in);
    const double fan_out = static_cast<double>(p.fan_out);
    if (p.role == ParamRole::kNormGain) {
      m.fill(1.0);
      continue;
    }
    if (p.role == ParamRole::kNormBias) {
      m.fill(0.0);
      continue;
    }
    switch (kind) {
      case Initialization::kDefault:
      case Initialization::kPretrained: {
        const double bound = 1.0 / std::sqrt(fan_in);
        std::uniform_real_distribution<double> u(-bound, bound);
        for (double& v : m.values()) v = u(rng);
        break;
      }
      case Initialization::kXavierNormal:
      case Initialization::kKaimingNormal: {
        if (p.role == ParamRole::kBias) {
          m.fill(0.0);
          break;
        }
        const double sd = kind == Initialization::kXavierNormal
                              ? std::sqrt(2.0 / (fan_in + fan_out))
                              : std::sqrt(2.0 / fan_in);
        std::normal_distribution<double> z(0.0, sd);
        for (double& v : m.values()) v = z(rng);
        break;
      }
    }
  }
}

}  // namespace anomgym::net
