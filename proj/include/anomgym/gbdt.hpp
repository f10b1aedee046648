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
#include <vector>

#include <json.hpp>

#include "anomgym/matrix.hpp"

namespace anomgym::gbdt {

struct GbdtParams {
  std::size_t rounds = 100;
  std::size_t max_depth = 6;
  double learning_rate = 0.1;
  std::size_t max_bins = 32;
  double lambda = 1.0;         // L2 penalty on leaf values
  std::size_t min_rows = 2;    // smallest node that may still be split
};

struct TreeNode {
  bool leaf = true;
  std::uint32_t feature = 0;
  double threshold = 0.0;  // x <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;
};

using Tree = std::vector<TreeNode>;

/// Squared-error gradient boosting over quantile-binned features.
class GbdtRegressor {
 public:
  GbdtRegressor() = default;
  explicit GbdtRegressor(GbdtParams params) : params_(params) {}

  void fit(const Matrix& x, std::span<const double> y);
  double predict_row(std::span<const double> row) const;
  std::vector<double> predict(const Matrix& x) const;

  /// Training-set MSE before boosting (index 0) and after every round.
  const std::vector<double>& training_mse() const noexcept { return mse_history_; }
  std::size_t n_features() const noexcept { return n_features_; }
  const std::vector<Tree>& trees() const noexcept { return trees_; }
  const GbdtParams& params() const noexcept { return params_; }

  nlohmann::json to_json() const;
  static GbdtRegressor from_json(const nlohmann::json& j);

 private:
  GbdtParams params_;
  std::size_t n_features_ = 0;
  double base_score_ = 0.0;
  std::vector<Tree> trees_;
  std::vector<double> mse_history_;
};

/// Upper cut points of at most max_bins quantile bins; bin(x) = number of
/// cuts strictly below x.
std::vector<double> quantile_cuts(std::vector<double> column, std::size_t max_bins);

}  // namespace anomgym::gbdt
