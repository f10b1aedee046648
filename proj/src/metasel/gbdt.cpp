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
#include "anomgym/gbdt.hpp"
#include "anomgym/kernels.hpp"

namespace anomgym::gbdt {
namespace {

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  std::size_t bin = 0;  // rows with bin <= this go left
  double gain = 0.0;
};

double tree_value(const Tree& t, std::span<const double> row) {
  std::size_t i = 0;
  while (!t[i].leaf) {
    i = static_cast<std::size_t>(row[t[i].feature] <= t[i].threshold ? t[i].left : t[i].right);
  }
  return t[i].value;
}

double mse(std::span<const double> pred, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (pred[i] - y[i]) * (pred[i] - y[i]);
  return s / static_cast<double>(y.size());
}

}  // namespace

std::vector<double> quantile_cuts(std::vector<double> column, std::size_t max_bins) {
  std::sort(column.begin(), column.end());
  column.erase(std::unique(column.begin(), column.end()), column.end());
  std::vector<double> cuts;
  if (column.size() <= 1) return cuts;
  if (column.size() <= max_bins) {
    for (std::size_t i = 0; i + 1 < column.size(); ++i) {
      cuts.push_back(0.5 * (column[i] + column[i + 1]));
    }
    return cuts;
  }
  for (std::size_t b = 1; b < max_bins; ++b) {
    const std::size_t idx = b * column.size() / max_bins;
    cuts.push_back(0.5 * (column[idx - 1] + column[idx]));
  }
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

void GbdtRegressor::fit(const Matrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n == 0 || y.size() != n) throw DimensionError("gbdt fit: rows and targets disagree");
  if (params_.max_bins < 2 || params_.max_bins > 256) {
    throw ConfigError("gbdt: max_bins must lie in [2, 256]");
  }
  n_features_ = p;
  trees_.clear();
  mse_history_.clear();

  // Bin every feature once.
  std::vector<std::vector<double>> cuts(p);
  std::vector<std::uint8_t> bins(n * p);
  for (std::size_t f = 0; f < p; ++f) {
    cuts[f] = quantile_cuts(x.column(f), params_.max_bins);
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = std::lower_bound(cuts[f].begin(), cuts[f].end(), x(i, f));
      bins[i * p + f] = static_cast<std::uint8_t>(it - cuts[f].begin());
    }
  }
  const std::size_t n_bins = params_.max_bins;

  base_score_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> pred(n, base_score_);
  std::vector<double> grad(n);
  std::vector<double> hist(p * n_bins * 2);
  mse_history_.push_back(mse(pred, y));

  for (std::size_t round = 0; round < params_.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - y[i];
    Tree tree;
    // (node index, rows, depth); processed breadth first.
    struct Pending {
      std::size_t node;
      std::vector<std::size_t> rows;
      std::size_t depth;
    };
    std::vector<Pending> queue;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    tree.emplace_back();
    queue.push_back({0, std::move(all), 0});
    for (std::size_t q = 0; q < queue.size(); ++q) {
      Pending cur = std::move(queue[q]);
      double g_total = 0.0;
      for (std::size_t r : cur.rows) g_total += grad[r];
      const auto h_total = static_cast<double>(cur.rows.size());
      tree[cur.node].value = -g_total / (h_total + params_.lambda);
      if (cur.depth >= params_.max_depth || cur.rows.size() < params_.min_rows) continue;

      kernels::build_histogram({bins, p, n_bins, cur.rows, grad}, hist);
      const double parent = g_total * g_total / (h_total + params_.lambda);
      SplitChoice best;
      for (std::size_t f = 0; f < p; ++f) {
        const std::size_t used = cuts[f].size() + 1;
        double gl = 0.0;
        double hl = 0.0;
        const double* hf = hist.data() + f * n_bins * 2;
        for (std::size_t b = 0; b + 1 < used; ++b) {
          gl += hf[2 * b];
          hl += hf[2 * b + 1];
          const double hr = h_total - hl;
          if (hl == 0.0 || hr == 0.0) continue;
          const double gr = g_total - gl;
          const double gain = gl * gl / (hl + params_.lambda) + gr * gr / (hr + params_.lambda) - parent;
          if (gain > best.gain + 1e-12) best = {true, f, b, gain};
        }
      }
      if (!best.found) continue;
      std::vector<std::size_t> left;
      std::vector<std::size_t> right;
      for (std::size_t r : cur.rows) {
        (bins[r * p + best.feature] <= best.bin ? left : right).push_back(r);
      }
      TreeNode& node = tree[cur.node];
      node.leaf = false;
      node.feature = static_cast<std::uint32_t>(best.feature);
      node.threshold = cuts[best.feature][best.bin];
      node.left = static_cast<std::int32_t>(tree.size());
      node.right = node.left + 1;
      tree.emplace_back();
      tree.emplace_back();
      queue.push_back({static_cast<std::size_t>(node.left), std::move(left), cur.depth + 1});
      queue.push_back({static_cast<std::size_t>(tree[cur.node].right), std::move(right), cur.depth + 1});
    }
    for (TreeNode& node : tree) node.value *= params_.learning_rate;
    for (std::size_t i = 0; i < n; ++i) pred[i] += tree_value(tree, x.row(i));
    trees_.push_back(std::move(tree));
    mse_history_.push_back(mse(pred, y));
  }
}

double GbdtRegressor::predict_row(std::span<const double> row) const {
  if (row.size() != n_features_) {
    throw DimensionError("gbdt predict: expected " + std::to_string(n_features_) + " features, got " +
                         std::to_string(row.size()));
  }
  double out = base_score_;
  for (const Tree& t : trees_) out += tree_value(t, row);
  return out;
}

std::vector<double> GbdtRegressor::predict(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict_row(x.row(i));
  return out;
}

nlohmann::json GbdtRegressor::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& t : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& nd : t) {
      if (nd.leaf) {
        nodes.push_back({{"value", nd.value}});
      } else {
        nodes.push_back({{"feature", nd.feature},
                         {"threshold", nd.threshold},
                         {"left", nd.left},
                         {"right", nd.right},
                         {"value", nd.value}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  return {{"rounds", params_.rounds},
          {"max_depth", params_.max_depth},
          {"learning_rate", params_.learning_rate},
          {"max_bins", params_.max_bins},
          {"lambda", params_.lambda},
          {"n_features", n_features_},
          {"base_score", base_score_},
          {"trees", std::move(trees)}};
}

GbdtRegressor GbdtRegressor::from_json(const nlohmann::json& j) {
  GbdtParams params;
  params.rounds = j.at("rounds").get<std::size_t>();
  params.max_depth = j.at("max_depth").get<std::size_t>();
  params.learning_rate = j.at("learning_rate").get<double>();
  params.max_bins = j.at("max_bins").get<std::size_t>();
  params.lambda = j.at("lambda").get<double>();
  GbdtRegressor g(params);
  g.n_features_ = j.at("n_features").get<std::size_t>();
  g.base_score_ = j.at("base_score").get<double>();
  for (const auto& jt : j.at("trees")) {
    Tree t;
    for (const auto& jn : jt) {
      TreeNode nd;
      nd.value = jn.at("value").get<double>();
      if (jn.contains("feature")) {
        nd.leaf = false;
        nd.feature = jn.at("feature").get<std::uint32_t>();
        nd.threshold = jn.at("threshold").get<double>();
        nd.left = jn.at("left").get<std::int32_t>();
        nd.right = jn.at("right").get<std::int32_t>();
      }
      t.push_back(nd);
    }
    g.trees_.push_back(std::move(t));
  }
  return g;
}

}  // namespace anomgym::gbdt
