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

#include "anomgym/matrix.hpp"

namespace anomgym::meta {

inline constexpr int kMetaSchemaVersion = 1;

/// Every aggregated group is (min, max, mean, std, skewness, kurtosis, flag);
/// flag = 1 when any entry of the group had to be imputed with 0.
inline constexpr std::size_t kAggregateWidth = 7;

inline constexpr std::size_t kStatisticalGroups = 32;
inline constexpr std::size_t kStatisticalScalars = 11;
inline constexpr std::size_t kStatisticalWidth =
    kStatisticalGroups * kAggregateWidth + kStatisticalScalars;
inline constexpr std::size_t kIForestWidth = 4 * kAggregateWidth;
inline constexpr std::size_t kHbosWidth = 2 * kAggregateWidth;
inline constexpr std::size_t kLodaWidth = 4 * kAggregateWidth;
inline constexpr std::size_t kPcaWidth = 6;
inline constexpr std::size_t kLandmarkerWidth = kIForestWidth + kHbosWidth + kLodaWidth + kPcaWidth;
inline constexpr std::size_t kMetaFeatureLength = kStatisticalWidth + kLandmarkerWidth;

inline constexpr std::size_t kIForestTrees = 100;
inline constexpr std::size_t kIForestSubsample = 256;
inline constexpr std::size_t kHbosBins = 10;
inline constexpr std::size_t kLodaProjections = 100;
inline constexpr std::size_t kLodaBins = 10;
inline constexpr std::size_t kMaxFeaturePairs = 50;
inline constexpr double kNormalityAlpha = 0.05;

struct BlockOffsets {
  std::size_t statistical = 0;
  std::size_t iforest = kStatisticalWidth;
  std::size_t hbos = iforest + kIForestWidth;
  std::size_t loda = hbos + kHbosWidth;
  std::size_t pca = loda + kLodaWidth;
  std::size_t end = pca + kPcaWidth;
};

struct MetaFeatureVector {
  std::vector<double> values;
  int schema_version = kMetaSchemaVersion;
  BlockOffsets offsets;
};

/// Column names in output order.
const std::vector<std::string>& meta_feature_names();

/// Needs n >= 4. The seed drives the ANOVA halves and, for p > 50, the
/// sampled feature pairs.
std::vector<double> statistical_features(const Matrix& x, std::uint64_t seed = 0);

/// Needs n >= 20. Output layout: iforest | hbos | loda | pca.
std::vector<double> landmarker_features(const Matrix& x, std::uint64_t seed);

/// Rows are put in lexicographic order first, so the result does not depend
/// on the row order of x.
MetaFeatureVector meta_features(const Matrix& x, std::uint64_t seed);

nlohmann::json to_json(const MetaFeatureVector& v);
MetaFeatureVector meta_from_json(const nlohmann::json& j);

// Pieces exposed for testing.

/// (min, max, mean, std, skewness, kurtosis, flag) of values. Skewness and
/// kurtosis (excess) are population moments; undefined entries become 0 and
/// raise the flag, as does any_imputed.
std::vector<double> aggregate(const std::vector<double>& values, bool any_imputed = false);

/// D'Agostino-Pearson K^2 p-value; needs n >= 8 and non-zero variance.
double normality_p_value(const std::vector<double>& column);

/// Per-bin probability mass of a 10-bin equal-width histogram.
std::vector<double> hbos_bin_mass(const std::vector<double>& column);

struct IsolationTreeStats {
  double depth = 0;
  double leaves = 0;
  std::vector<double> split_counts;  // per feature
};
std::vector<IsolationTreeStats> isolation_forest(const Matrix& x, std::uint64_t seed);

/// Sorts rows lexicographically.
Matrix canonical_row_order(const Matrix& x);

}  // namespace anomgym::meta
