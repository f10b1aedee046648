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
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "anomgym/datahub.hpp"
#include "anomgym/designspace.hpp"
#include "anomgym/evalmetrics.hpp"
#include "anomgym/gbdt.hpp"
#include "anomgym/matrix.hpp"
#include "anomgym/metafeat.hpp"
#include "anomgym/trainer.hpp"

namespace anomgym::select {

// --- meta-training table ----------------------------------------------------

struct MetaRow {
  std::size_t dataset = 0;   // index into MetaTable::datasets
  std::size_t pipeline = 0;  // index into the design space
  std::size_t n_a = 0;
  double target = 0.0;       // normalized rank, in (0, 1]
};

/// Rows of (dataset, E_meta, n_a, E_comp, target). Meta-feature columns are
/// standardized with statistics of the rows held by this table.
struct MetaTable {
  std::vector<std::string> datasets;
  std::vector<std::vector<double>> raw_meta;  // per dataset, unstandardized
  std::vector<space::PipelineEncoding> encodings;  // per pipeline
  std::vector<MetaRow> rows;
  std::vector<double> meta_mean;
  std::vector<double> meta_std;  // 1 for constant columns

  /// standardized meta | n_a | encoding
  static constexpr std::size_t width() {
    return meta::kMetaFeatureLength + 1 + space::kNumDimensions;
  }
  void restandardize();
  Matrix feature_matrix() const;
  std::vector<double> targets() const;
  /// Group id per row: rows sharing (dataset, n_a).
  std::vector<std::size_t> groups() const;

  /// Copy with one dataset's rows (and its standardization contribution) removed.
  MetaTable without_dataset(const std::string& name) const;
  MetaTable only_n_a(std::size_t n_a) const;
};

std::vector<double> feature_row(std::span<const double> meta_standardized, std::size_t n_a,
                                const space::PipelineEncoding& enc);

/// One PerformanceMatrix per n_a, all over the same datasets and space.
/// Failed cells are left out of the table.
MetaTable assemble_meta_table(const std::vector<metrics::PerformanceMatrix>& perf,
                              const std::map<std::string, meta::MetaFeatureVector>& metafeats,
                              const space::DesignSpace& space);

// --- meta-predictor -----------------------------------------------------------

enum class Backend : std::uint8_t { kNeural, kGbdt };
enum class MetaLoss : std::uint8_t { kMse, kWeightedMse, kPearson, kRanknet };

const char* to_string(Backend b);
const char* to_string(MetaLoss l);
Backend backend_from_string(const std::string& s);
MetaLoss meta_loss_from_string(const std::string& s);

struct NeuralSettings {
  std::size_t hidden = 128;
  double learning_rate = 1e-3;
  std::size_t batch_size = 512;
  std::size_t epochs = 100;
  double validation_fraction = 0.1;
  std::size_t patience = 10;
  std::size_t ranknet_pairs = 50;  // per group per batch
};

inline constexpr double kWeightedMseAlpha = 1.0;

/// Loss of predictions against targets for the neural backend. groups gives
/// each row's (dataset, n_a) group; pearson and ranknet only use within-group
/// structure and skip groups with fewer than two rows.
grad::Value meta_loss(MetaLoss kind, const grad::Value& pred, std::span<const double> target,
                      std::span<const std::size_t> groups, std::size_t ranknet_pairs, Rng& rng);

class MetaPredictor {
 public:
  Backend backend() const noexcept { return backend_; }
  MetaLoss loss() const noexcept { return loss_; }
  int meta_schema_version() const noexcept { return meta_schema_; }
  int encoding_schema_version() const noexcept { return encoding_schema_; }
  const std::vector<double>& meta_mean() const noexcept { return meta_mean_; }
  const std::vector<double>& meta_std() const noexcept { return meta_std_; }

  /// Predicted normalized rank for each feature row.
  std::vector<double> predict(const Matrix& features) const;
  std::vector<double> standardize(std::span<const double> raw_meta) const;

  /// Validation loss per epoch for the neural backend, training MSE per
  /// round for the tree backend.
  const std::vector<double>& history() const noexcept { return history_; }

  nlohmann::json to_json() const;
  static MetaPredictor from_json(const nlohmann::json& j);

 private:
  friend MetaPredictor train_meta_predictor(const MetaTable&, Backend, MetaLoss, std::uint64_t,
                                            const NeuralSettings&, const gbdt::GbdtParams&);
  Backend backend_ = Backend::kGbdt;
  MetaLoss loss_ = MetaLoss::kMse;
  int meta_schema_ = meta::kMetaSchemaVersion;
  int encoding_schema_ = space::kEncodingSchemaVersion;
  std::vector<double> meta_mean_;
  std::vector<double> meta_std_;
  std::vector<Matrix> weights_;  // neural: W1, b1, W2, b2, W3, b3
  gbdt::GbdtRegressor tree_;
  std::vector<double> history_;
};

/// The tree backend only supports MetaLoss::kMse.
MetaPredictor train_meta_predictor(const MetaTable& table, Backend backend, MetaLoss loss,
                                   std::uint64_t seed, const NeuralSettings& neural = {},
                                   const gbdt::GbdtParams& tree = {});

/// Zero-shot: one predicted rank per pipeline of the space, no training.
std::vector<double> predict_pipeline_ranks(const MetaPredictor& f,
                                           const meta::MetaFeatureVector& e_meta,
                                           std::size_t n_a, const space::DesignSpace& space);

/// Ids of the k smallest ranks, ties broken by lower id.
std::vector<std::size_t> select_pipelines(std::span<const double> ranks, std::size_t k);

// --- ensembling ---------------------------------------------------------------

/// Min-max normalizes each score vector to [0, 1] (constant vectors map to
/// 0) and averages them. Vectors holding non-finite values are dropped.
std::vector<double> ensemble_normalized(const std::vector<std::vector<double>>& scores);

/// Scores x_test with every detector that is present and does not throw.
std::vector<double> ensemble_scores(std::span<const std::optional<train::TrainedDetector>> detectors,
                                    const Matrix& x_test);

// --- benchmark cells ----------------------------------------------------------

/// One trained-and-scored (dataset, pipeline, n_a, seed) combination.
struct CellKey {
  std::string dataset;
  std::size_t pipeline = 0;
  std::size_t n_a = 0;
  std::uint64_t seed = 0;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CellResult {
  bool ok = false;
  std::string error_tag;
  std::string error_message;
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  double wall_seconds = 0.0;
  std::vector<double> test_scores;
  std::vector<int> test_labels;
};

/// Builds the weak view for (n_a, seed), trains cfg with that seed and scores
/// the test split. Library errors become a failed result.
CellResult run_cell(const data::DatasetPtr& ds, const space::PipelineConfig& cfg,
                    std::size_t n_a, std::uint64_t seed);

/// Thread-safe memo of cell results. Training is deterministic, so a cached
/// cell stands in for retraining the same pipeline on the same view.
class CellCache {
 public:
  std::optional<CellResult> find(const CellKey& key) const;
  void insert(const CellKey& key, CellResult result);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<CellKey, CellResult> cells_;
};

using CellCallback = std::function<void(const CellKey&, const CellResult&)>;

/// Runs every missing cell of datasets x space x n_a x seeds with a pool of
/// workers; on_new is called (serialized) for each freshly computed cell.
void fill_cells(CellCache& cache, const std::vector<data::DatasetPtr>& datasets,
                const space::DesignSpace& space, std::span<const std::size_t> n_as,
                std::span<const std::uint64_t> seeds, int workers,
                const CellCallback& on_new = {});

/// Repeat-averaged AUCROC per n_a. A cell counts as failed when any of its
/// repeats failed.
std::vector<metrics::PerformanceMatrix> performance_matrices(
    const CellCache& cache, const std::vector<std::string>& datasets, std::size_t m_pipelines,
    std::span<const std::size_t> n_as, std::span<const std::uint64_t> seeds);

// --- baselines ------------------------------------------------------------------

std::size_t select_random(std::size_t m_pipelines, std::uint64_t seed);

inline constexpr std::size_t kSsCandidates = 50;
inline constexpr double kSsValidationFraction = 0.2;

struct SupervisedSplit {
  data::WeakView train;  // parent carries the revealed labels only
  std::vector<std::size_t> validation;
};

/// 80/20 split of the view's training rows, stratified on the revealed
/// labels (unlabeled pool = 0, labeled = 1). The validation part holds at
/// least one labeled anomaly.
SupervisedSplit supervised_split(const data::WeakView& view, std::uint64_t seed);

/// Trains up to 50 seeded candidates on the 80% part and returns the id with
/// the best validation AUCROC. Needs n_a >= 2.
std::size_t select_supervised(const data::WeakView& view, const space::DesignSpace& space,
                              std::uint64_t seed);

/// Best test AUCROC among non-failed cells (oracle).
std::size_t select_ground_truth(std::span<const double> test_auc,
                                std::span<const std::uint8_t> failed = {});

/// Keeps, per dimension, the choices whose mean raw performance is at least
/// the median of the choice means, and returns the configurations of space
/// built only from kept choices. If none survive, the best single
/// configuration is returned.
space::DesignSpace refine_space(const metrics::PerformanceMatrix& p_train,
                                const space::DesignSpace& space);

/// Per-dimension kept choice indices computed by refine_space.
std::vector<std::vector<std::size_t>> refined_choices(const metrics::PerformanceMatrix& p_train,
                                                      const space::DesignSpace& space);

// --- leave-one-dataset-out --------------------------------------------------------

struct LodoConfig {
  std::vector<data::DatasetPtr> datasets;
  space::DesignSpace space;
  std::vector<std::size_t> n_as;
  std::vector<std::uint64_t> seeds;
  Backend backend = Backend::kGbdt;
  MetaLoss loss = MetaLoss::kMse;
  std::size_t top_k = 5;
  bool per_n_a = false;  // one predictor per n_a instead of a joint one
  std::uint64_t meta_seed = 0;
  int workers = 1;
  bool run_supervised = true;
};

struct SelectorScore {
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  bool failed = false;  // selected pipeline failed on the view
};

struct LodoFold {
  std::string dataset;
  std::size_t n_a = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> top_k_ids;
  std::size_t rs_id = 0;
  std::size_t ss_id = 0;
  std::size_t gt_id = 0;
  SelectorScore top1, topk, rs, ss, gt;
  std::string error;     // non-empty when the fold could not be evaluated
  std::string ss_error;  // supervised selection could not run
};

struct LodoReport {
  std::vector<LodoFold> folds;
  double mean(SelectorScore LodoFold::*which, bool pr = false) const;
};

/// Meta-features of every dataset, keyed by name.
std::map<std::string, meta::MetaFeatureVector> dataset_meta_features(
    const std::vector<data::DatasetPtr>& datasets, std::uint64_t seed);

/// Predictor for one fold: trained on table rows of every other dataset.
MetaPredictor train_fold_predictor(const MetaTable& full, const std::string& held_out,
                                   Backend backend, MetaLoss loss, std::uint64_t seed);

LodoReport run_lodo(const LodoConfig& cfg, CellCache& cache, const CellCallback& on_new = {});

void write_lodo_report(const LodoReport& report, const std::filesystem::path& dir);

}  // namespace anomgym::select
