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
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "anomgym/matrix.hpp"
#include "anomgym/rng.hpp"

namespace anomgym::data {

/// Feature matrix plus binary labels (1 = anomaly).
struct Dataset {
  std::string name;
  Matrix x;
  std::vector<int> y;
  std::string provenance = "loaded";

  std::size_t n() const noexcept { return x.rows(); }
  std::size_t d() const noexcept { return x.cols(); }
  std::size_t anomalies() const noexcept;

  /// Finite features, binary labels, >= 2 of each class. The 20-row minimum
  /// is enforced when a weak view is built, so tiny files still load.
  void validate() const;
};

using DatasetPtr = std::shared_ptr<const Dataset>;

/// Reads a CSV with a header row whose last column is "label".
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

/// Weakly-supervised partition of a dataset.
///
/// The training portion is the unlabeled pool (treated as normal, may hide
/// anomalies) plus the labeled anomalies plus any synthesized anomalies.
struct WeakView {
  DatasetPtr parent;
  std::vector<std::size_t> unlabeled;
  std::vector<std::size_t> labeled;
  std::vector<std::size_t> test;
  Matrix synthetic;  // rows appended by augmentation, all labeled 1
  std::size_t n_a = 0;
  std::uint64_t seed = 0;

  std::size_t d() const noexcept { return parent->d(); }
  std::size_t labeled_count() const noexcept { return labeled.size() + synthetic.rows(); }
  std::size_t train_size() const noexcept { return unlabeled.size() + labeled_count(); }
};

inline constexpr double kTestFraction = 0.3;
inline constexpr std::size_t kMinSamples = 20;

/// Stratified 70/30 split, then n_a train anomalies revealed as labeled.
/// The split depends on (seed, dataset name); the revealed set additionally
/// on n_a.
WeakView make_weak_view(DatasetPtr ds, std::size_t n_a, std::uint64_t seed);

/// Builds a view from explicit index sets, validating the invariants.
WeakView make_weak_view(DatasetPtr ds, std::vector<std::size_t> unlabeled,
                        std::vector<std::size_t> labeled, std::vector<std::size_t> test,
                        std::uint64_t seed);

// --- preprocessing --------------------------------------------------------

enum class PreprocessKind : std::uint8_t { kMinMax, kNormalization };

struct PreprocessParams {
  PreprocessKind kind = PreprocessKind::kMinMax;
  std::vector<double> f_min;
  std::vector<double> f_max;
  double range_lo = 0.0;
  double range_hi = 1.0;

  static PreprocessParams fit(PreprocessKind kind, const Matrix& train);
  /// Min-max output is clipped to the target range for unseen rows.
  Matrix apply(const Matrix& x) const;
};

/// Train/test matrices ready for a network. Train rows are ordered
/// unlabeled, labeled, synthetic.
struct PreparedData {
  Matrix x_train;
  std::vector<double> y_train;  // 0 for the unlabeled pool, 1 otherwise
  std::size_t n_unlabeled = 0;
  Matrix x_test;
  std::vector<int> y_test;
  PreprocessParams params;
};

/// Fits on the (possibly augmented) training rows only.
PreparedData preprocess(const WeakView& view, PreprocessKind kind);

/// Raw (unscaled) train rows in PreparedData order.
Matrix raw_train_matrix(const WeakView& view);

// --- augmentation ----------------------------------------------------------

enum class AugmentKind : std::uint8_t { kOrigin, kOversampling, kSmote, kMixup };

inline constexpr std::size_t kSmoteNeighbors = 5;
inline constexpr double kMixupAlpha = 0.2;

/// Synthesizes labeled anomalies until the labeled count reaches the size of
/// the unlabeled pool. The test split is never touched.
WeakView augment(const WeakView& view, AugmentKind kind, std::uint64_t seed);

// --- perturbations ----------------------------------------------------------

enum class PerturbKind : std::uint8_t { kDuplicateAnomalies, kIrrelevantFeatures, kLabelFlip };

inline constexpr int kDuplicateCopies = 3;
inline constexpr double kIrrelevantFeatureRatio = 0.3;
inline constexpr double kLabelFlipRatio = 0.1;

/// Dataset-level perturbations. kLabelFlip needs a train split and throws
/// ContractError here; use flip_train_labels.
Dataset perturb(const Dataset& ds, PerturbKind kind, std::uint64_t seed);

/// Inverts floor(0.1 * n_train) ground-truth labels among the view's train
/// rows, then re-reveals n_a labeled anomalies from the flipped labels.
WeakView flip_train_labels(const WeakView& view, std::uint64_t seed);

}  // namespace anomgym::data
