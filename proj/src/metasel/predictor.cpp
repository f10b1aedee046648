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
#include <map>
#include <numeric>

#include "anomgym/error.hpp"
#include "anomgym/metasel.hpp"
#include "anomgym/optimizer.hpp"

namespace anomgym::select {
namespace {

std::map<std::size_t, std::vector<std::size_t>> members(std::span<const std::size_t> groups) {
  std::map<std::size_t, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < groups.size(); ++i) out[groups[i]].push_back(i);
  return out;
}

bool has_multi_row_group(std::span<const std::size_t> groups) {
  for (const auto& [g, rows] : members(groups)) {
    if (rows.size() >= 2) return true;
  }
  return false;
}

grad::Value column_constant(std::span<const double> v) {
  Matrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data());
  return grad::constant(std::move(m));
}

grad::Value accumulate(const grad::Value& total, const grad::Value& term) {
  return total ? grad::add(total, term) : term;
}

struct Mlp {
  std::vector<grad::Value> params;  // W1 b1 W2 b2 W3 b3

  grad::Value forward(const grad::Value& x) const {
    grad::Value h = grad::relu(grad::add(grad::matmul(x, params[0]), params[1]));
    h = grad::relu(grad::add(grad::matmul(h, params[2]), params[3]));
    return grad::add(grad::matmul(h, params[4]), params[5]);
  }
};

Mlp make_mlp(std::size_t in, std::size_t hidden, std::uint64_t seed) {
  Rng rng(seed);
  Mlp mlp;
  const std::size_t dims[4] = {in, hidden, hidden, 1};
  for (std::size_t l = 0; l < 3; ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    std::uniform_real_distribution<double> u(-bound, bound);
    Matrix w(dims[l], dims[l + 1]);
    Matrix b(1, dims[l + 1]);
    for (double& v : w.values()) v = u(rng);
    for (double& v : b.values()) v = u(rng);
    mlp.params.push_back(grad::parameter(std::move(w), "meta.w" + std::to_string(l + 1)));
    mlp.params.push_back(grad::parameter(std::move(b), "meta.b" + std::to_string(l + 1)));
  }
  return mlp;
}

Matrix gather(const Matrix& x, std::span<const std::size_t> rows) { return x.select_rows(rows); }

template <typename T>
std::vector<T> pick(const std::vector<T>& v, std::span<const std::size_t> rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(v[r]);
  return out;
}

}  // namespace

const char* to_string(Backend b) { return b == Backend::kNeural ? "neural" : "gbdt"; }

const char* to_string(MetaLoss l) {
  switch (l) {
    case MetaLoss::kMse: return "mse";
    case MetaLoss::kWeightedMse: return "weighted_mse";
    case MetaLoss::kPearson: return "pearson";
    case MetaLoss::kRanknet: return "ranknet";
  }
  return "?";
}

Backend backend_from_string(const std::string& s) {
  if (s == "neural") return Backend::kNeural;
  if (s == "gbdt") return Backend::kGbdt;
  throw ConfigError("unknown meta-predictor backend '" + s + "' (expected neural or gbdt)");
}

MetaLoss meta_loss_from_string(const std::string& s) {
  for (MetaLoss l : {MetaLoss::kMse, MetaLoss::kWeightedMse, MetaLoss::kPearson, MetaLoss::kRanknet}) {
    if (s == to_string(l)) return l;
  }
  throw ConfigError("unknown meta loss '" + s + "'");
}

grad::Value meta_loss(MetaLoss kind, const grad::Value& pred, std::span<const double> target,
                      std::span<const std::size_t> groups, std::size_t ranknet_pairs, Rng& rng) {
  if (pred.cols() != 1 || pred.rows() != target.size()) {
    throw DimensionError("meta_loss: predictions and targets disagree");
  }
  const grad::Value t = column_constant(target);
  switch (kind) {
    case MetaLoss::kMse:
      return grad::mean(grad::pow(grad::sub(pred, t), 2.0));
    case MetaLoss::kWeightedMse: {
      std::vector<double> w(target.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = 1.0 + kWeightedMseAlpha * (1.0 - target[i]) +
               kWeightedMseAlpha * (1.0 - pred.data()(i, 0));
      }
      return grad::mean(grad::mul(grad::pow(grad::sub(pred, t), 2.0), column_constant(w)));
    }
    case MetaLoss::kPearson: {
      if (groups.size() != target.size()) throw DimensionError("meta_loss: groups length");
      grad::Value total;
      double used = 0.0;
      for (const auto& [g, rows] : members(groups)) {
        if (rows.size() < 2) continue;
        std::vector<double> tc = pick(std::vector<double>(target.begin(), target.end()), rows);
        const double t_mean = std::accumulate(tc.begin(), tc.end(), 0.0) / static_cast<double>(tc.size());
        double t_norm = 0.0;
        for (double& v : tc) {
          v -= t_mean;
          t_norm += v * v;
        }
        t_norm = std::sqrt(t_norm);
        if (t_norm == 0.0) continue;
        const grad::Value pg = grad::gather_rows(pred, rows);
        const grad::Value centred = grad::sub(pg, grad::mean(pg));
        const grad::Value num = grad::sum(grad::mul(centred, column_constant(tc)));
        const grad::Value inv_norm =
            grad::pow(grad::add_scalar(grad::sum(grad::mul(centred, centred)), 1e-12), -0.5);
        const grad::Value rho = grad::scale(grad::mul(num, inv_norm), 1.0 / t_norm);
        total = accumulate(total, grad::add_scalar(grad::scale(rho, -1.0), 1.0));
        used += 1.0;
      }
      if (used == 0.0) throw ContractError("pearson loss: no group with two distinct targets");
      return grad::scale(total, 1.0 / used);
    }
    case MetaLoss::kRanknet: {
      if (groups.size() != target.size()) throw DimensionError("meta_loss: groups length");
      std::vector<std::size_t> is;
      std::vector<std::size_t> js;
      std::vector<double> sign;
      for (const auto& [g, rows] : members(groups)) {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < rows.size(); ++a) {
          for (std::size_t b = a + 1; b < rows.size(); ++b) {
            if (target[rows[a]] != target[rows[b]]) pairs.emplace_back(rows[a], rows[b]);
          }
        }
        if (pairs.size() > ranknet_pairs) {
          for (std::size_t i = 0; i < ranknet_pairs; ++i) {
            std::swap(pairs[i], pairs[i + uniform_index(rng, pairs.size() - i)]);
          }
          pairs.resize(ranknet_pairs);
        }
        for (const auto& [i, j] : pairs) {
          is.push_back(i);
          js.push_back(j);
          // label 1 when i should rank ahead of j (smaller target)
          sign.push_back(target[i] < target[j] ? 1.0 : -1.0);
        }
      }
      if (is.empty()) throw ContractError("ranknet loss: no pair with distinct targets");
      const grad::Value diff =
          grad::sub(grad::gather_rows(pred, js), grad::gather_rows(pred, is));  // p_j - p_i
      return grad::mean(grad::softplus(grad::scale(grad::mul(diff, column_constant(sign)), -1.0)));
    }
  }
  throw ContractError("unknown meta loss");
}

std::vector<double> MetaPredictor::standardize(std::span<const double> raw_meta) const {
  if (raw_meta.size() != meta_mean_.size()) {
    throw ContractError("meta-feature length " + std::to_string(raw_meta.size()) +
                        " does not match the predictor schema (" +
                        std::to_string(meta_mean_.size()) + ")");
  }
  std::vector<double> out(raw_meta.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = (raw_meta[c] - meta_mean_[c]) / meta_std_[c];
  return out;
}

std::vector<double> MetaPredictor::predict(const Matrix& features) const {
  if (features.cols() != MetaTable::width()) {
    throw ContractError("predict: expected " + std::to_string(MetaTable::width()) +
                        " feature columns, got " + std::to_string(features.cols()));
  }
  if (backend_ == Backend::kGbdt) return tree_.predict(features);
  Mlp mlp;
  for (const Matrix& w : weights_) mlp.params.push_back(grad::constant(w));
  const grad::Value out = mlp.forward(grad::constant(features));
  return out.data().column(0);
}

MetaPredictor train_meta_predictor(const MetaTable& table, Backend backend, MetaLoss loss,
                                   std::uint64_t seed, const NeuralSettings& ns,
                                   const gbdt::GbdtParams& tree) {
  if (table.rows.empty()) throw ContractError("train_meta_predictor: empty meta table");
  if (backend == Backend::kGbdt && loss != MetaLoss::kMse) {
    throw ConfigError(std::string("the gbdt backend only supports the mse loss, got ") + to_string(loss));
  }
  MetaPredictor f;
  f.backend_ = backend;
  f.loss_ = loss;
  f.meta_mean_ = table.meta_mean;
  f.meta_std_ = table.meta_std;
  const Matrix x = table.feature_matrix();
  const std::vector<double> y = table.targets();

  if (backend == Backend::kGbdt) {
    f.tree_ = gbdt::GbdtRegressor(tree);
    f.tree_.fit(x, y);
    f.history_ = f.tree_.training_mse();
    return f;
  }

  const std::vector<std::size_t> groups = table.groups();
  const bool grouped = loss == MetaLoss::kPearson || loss == MetaLoss::kRanknet;
  if (grouped && !has_multi_row_group(groups)) {
    throw ContractError("pearson/ranknet losses need at least two rows in a dataset group");
  }

  // Held-out rows for early stopping.
  std::vector<std::size_t> order(table.rows.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(seed, "meta", "split"));
  std::shuffle(order.begin(), order.end(), split_rng);
  std::size_t n_val = static_cast<std::size_t>(
      std::llround(ns.validation_fraction * static_cast<double>(order.size())));
  if (order.size() < 10) n_val = 0;
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val.begin(), val.end());
  std::sort(train.begin(), train.end());
  const Matrix x_val = gather(x, val);
  const std::vector<double> y_val = pick(y, val);
  const std::vector<std::size_t> g_val = pick(groups, val);
  const bool val_usable = n_val > 0 && (!grouped || has_multi_row_group(g_val));

  Mlp mlp = make_mlp(MetaTable::width(), ns.hidden, derive_seed(seed, "meta", "init"));
  grad::Optimizer opt({.kind = grad::OptimizerKind::kAdam, .learning_rate = ns.learning_rate});
  Rng batch_rng(derive_seed(seed, "meta", "batches"));
  Rng loss_rng(derive_seed(seed, "meta", "loss"));

  std::vector<Matrix> best;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  for (std::size_t epoch = 0; epoch < ns.epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), batch_rng);
    for (std::size_t start = 0; start < train.size(); start += ns.batch_size) {
      const std::size_t end = std::min(train.size(), start + ns.batch_size);
      std::vector<std::size_t> rows(train.begin() + static_cast<std::ptrdiff_t>(start),
                                    train.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(rows.begin(), rows.end());
      const std::vector<std::size_t> g = pick(groups, rows);
      if (grouped && !has_multi_row_group(g)) continue;
      const grad::Value pred = mlp.forward(grad::constant(gather(x, rows)));
      const std::vector<double> t = pick(y, rows);
      grad::Value value;
      try {
        value = meta_loss(loss, pred, t, g, ns.ranknet_pairs, loss_rng);
      } catch (const ContractError&) {
        continue;  // batch without a usable group
      }
      grad::zero_grad(mlp.params);
      grad::backward(value);
      opt.step(mlp.params);
    }
    if (!val_usable) continue;
    Rng val_rng(derive_seed(seed, "meta", "validation"));
    double v = 0.0;
    try {
      v = meta_loss(loss, mlp.forward(grad::constant(x_val)), y_val, g_val, ns.ranknet_pairs, val_rng)
              .item();
    } catch (const ContractError&) {
      continue;
    }
    f.history_.push_back(v);
    if (v < best_val) {
      best_val = v;
      stale = 0;
      best.clear();
      for (const auto& p : mlp.params) best.push_back(p.data());
    } else if (++stale >= ns.patience) {
      break;
    }
  }
  if (best.empty()) {
    for (const auto& p : mlp.params) best.push_back(p.data());
  }
  f.weights_ = std::move(best);
  return f;
}

nlohmann::json MetaPredictor::to_json() const {
  nlohmann::json j{{"backend", to_string(backend_)},
                   {"loss", to_string(loss_)},
                   {"meta_schema_version", meta_schema_},
                   {"encoding_schema_version", encoding_schema_},
                   {"meta_mean", meta_mean_},
                   {"meta_std", meta_std_},
                   {"history", history_}};
  if (backend_ == Backend::kGbdt) {
    j["trees"] = tree_.to_json();
  } else {
    nlohmann::json ws = nlohmann::json::array();
    for (const Matrix& w : weights_) {
      ws.push_back({{"rows", w.rows()},
                    {"cols", w.cols()},
                    {"values", std::vector<double>(w.values().begin(), w.values().end())}});
    }
    j["weights"] = std::move(ws);
  }
  return j;
}

MetaPredictor MetaPredictor::from_json(const nlohmann::json& j) {
  MetaPredictor f;
  f.backend_ = backend_from_string(j.at("backend").get<std::string>());
  f.loss_ = meta_loss_from_string(j.at("loss").get<std::string>());
  f.meta_schema_ = j.at("meta_schema_version").get<int>();
  f.encoding_schema_ = j.at("encoding_schema_version").get<int>();
  if (f.meta_schema_ != meta::kMetaSchemaVersion ||
      f.encoding_schema_ != space::kEncodingSchemaVersion) {
    throw ContractError("meta-predictor schema versions do not match this build");
  }
  f.meta_mean_ = j.at("meta_mean").get<std::vector<double>>();
  f.meta_std_ = j.at("meta_std").get<std::vector<double>>();
  f.history_ = j.value("history", std::vector<double>{});
  if (f.backend_ == Backend::kGbdt) {
    f.tree_ = gbdt::GbdtRegressor::from_json(j.at("trees"));
  } else {
    for (const auto& jw : j.at("weights")) {
      Matrix w(jw.at("rows").get<std::size_t>(), jw.at("cols").get<std::size_t>());
      const auto vals = jw.at("values").get<std::vector<double>>();
      if (vals.size() != w.size()) throw ContractError("meta-predictor weight shape mismatch");
      std::copy(vals.begin(), vals.end(), w.data());
      f.weights_.push_back(std::move(w));
    }
    if (f.weights_.size() != 6) throw ContractError("meta-predictor needs 6 weight tensors");
  }
  return f;
}

std::vector<double> predict_pipeline_ranks(const MetaPredictor& f,
                                           const meta::MetaFeatureVector& e_meta,
                                           std::size_t n_a, const space::DesignSpace& space) {
  if (e_meta.schema_version != f.meta_schema_version()) {
    throw ContractError("meta-feature schema version " + std::to_string(e_meta.schema_version) +
                        " differs from the predictor's " + std::to_string(f.meta_schema_version()));
  }
  if (f.encoding_schema_version() != space::kEncodingSchemaVersion) {
    throw ContractError("pipeline encoding schema mismatch");
  }
  const std::vector<double> z = f.standardize(e_meta.values);
  Matrix x(space.m_pipelines(), MetaTable::width());
  for (std::size_t j = 0; j < space.m_pipelines(); ++j) {
    const auto row = feature_row(z, n_a, space::encode_pipeline(space.configs[j]));
    std::copy(row.begin(), row.end(), x.row(j).begin());
  }
  return f.predict(x);
}

std::vector<std::size_t> select_pipelines(std::span<const double> ranks, std::size_t k) {
  if (k < 1 || k > ranks.size()) {
    throw ContractError("select_pipelines: k must lie in [1, " + std::to_string(ranks.size()) + "]");
  }
  std::vector<std::size_t> ids(ranks.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });
  ids.resize(k);
  return ids;
}

}  // namespace anomgym::select
