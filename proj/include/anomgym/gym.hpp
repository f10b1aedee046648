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
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anomgym/datahub.hpp"
#include "anomgym/designspace.hpp"
#include "anomgym/metasel.hpp"
#include "anomgym/synth.hpp"

namespace anomgym::gym {

inline constexpr int kRecordSchemaVersion = 1;

/// One benchmark cell outcome; the unit of the append-only results store.
struct RunRecord {
  std::string dataset;
  std::size_t pipeline = 0;
  space::PipelineConfig config;
  std::size_t n_a = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error_tag;  // set when !ok
  std::string error_message;
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  double wall_seconds = 0.0;
  std::vector<double> test_scores;  // kept so cached cells can be re-ensembled
  std::vector<int> test_labels;
  int schema_version = kRecordSchemaVersion;

  select::CellKey key() const { return {dataset, pipeline, n_a, seed}; }
};

nlohmann::json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);
RunRecord make_record(const select::CellKey& key, const space::PipelineConfig& cfg,
                      const select::CellResult& cell);
select::CellResult to_cell(const RunRecord& r);

/// JSONL file of RunRecords, one per line, unique on (dataset, pipeline,
/// n_a, seed). Opening drops a truncated trailing line left by an
/// interrupted writer.
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path path);

  bool contains(const select::CellKey& key) const { return index_.contains(key); }
  /// Throws ContractError on a duplicate key.
  void append(const RunRecord& r);
  const std::vector<RunRecord>& records() const noexcept { return records_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::vector<RunRecord> records_;
  std::map<select::CellKey, std::size_t> index_;
  std::ofstream out_;
};

/// Reads a store without opening it for writing.
std::vector<RunRecord> read_records(const std::filesystem::path& path);

// --- benchmark configuration ---------------------------------------------------

struct DatasetSpec {
  std::string name;
  std::optional<std::filesystem::path> path;  // CSV, or else synthetic:
  data::AnomalyKind kind = data::AnomalyKind::kLocal;
  std::optional<double> alpha;
  double anomaly_ratio = 0.05;
  std::uint64_t seed = 0;       // anomaly generation
  data::BaseGenerator base;     // normals
};

struct BenchmarkConfig {
  std::vector<DatasetSpec> datasets;
  space::SpaceMode mode = space::SpaceMode::kSmall;
  std::uint64_t m_pipelines = 64;
  std::uint64_t space_seed = 0;
  std::vector<std::size_t> n_as;
  std::vector<std::uint64_t> seeds;
  int workers = 1;
  // meta-learning defaults used by meta-train
  select::Backend backend = select::Backend::kGbdt;
  select::MetaLoss loss = select::MetaLoss::kMse;
  std::size_t top_k = 5;
  std::uint64_t meta_seed = 0;
};

/// Throws UsageError describing the first problem.
BenchmarkConfig parse_benchmark_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
BenchmarkConfig load_benchmark_config(const std::filesystem::path& file);

data::DatasetPtr materialize(const DatasetSpec& spec);
std::vector<data::DatasetPtr> materialize(const std::vector<DatasetSpec>& specs);

struct BenchmarkOutcome {
  std::vector<data::DatasetPtr> datasets;
  space::DesignSpace space;
  std::shared_ptr<select::CellCache> cache;
  std::size_t new_cells = 0;
  std::size_t total_records = 0;
};

/// Fills every (dataset, pipeline, n_a, seed) cell that the store under
/// out_dir does not have yet, then rewrites the per-dimension summaries.
BenchmarkOutcome run_benchmark(const BenchmarkConfig& cfg, const std::filesystem::path& out_dir);

/// space.json in out_dir, or a fresh sample written there.
space::DesignSpace load_or_create_space(const BenchmarkConfig& cfg, const std::filesystem::path& out_dir);

// --- summaries and reports ------------------------------------------------------

/// Repeat-averaged cell of one (dataset, n_a, pipeline).
struct CellSummary {
  std::string dataset;
  std::size_t n_a = 0;
  std::size_t pipeline = 0;
  space::PipelineConfig config;
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  double rank = 1.0;          // within (dataset, n_a), AUCROC based
  double inverse_rank = 0.0;  // 1 - rank
  bool failed = false;        // some repeat failed
  std::size_t repeats = 0;
};

/// Sorted by (dataset, pipeline, n_a).
std::vector<CellSummary> summarize_cells(const std::vector<RunRecord>& records);

struct ChoiceSummary {
  space::Dimension dimension{};
  std::size_t choice = 0;
  std::size_t n_a = 0;
  double mean_auc_roc = 0.0;  // over non-failed cells
  double mean_auc_pr = 0.0;
  double mean_rank = 0.0;     // over all cells, failed ones ranked worst
  double mean_inverse_rank = 0.0;
  std::size_t cells = 0;
  std::size_t failed = 0;
};

/// Fix one choice, aggregate over everything else. Choices without cells are
/// omitted. An empty dataset filter keeps every dataset.
std::vector<ChoiceSummary> summarize_choices(const std::vector<CellSummary>& cells,
                                             space::Dimension dim,
                                             const std::vector<std::string>& datasets = {});

void write_dimension_summaries(const std::vector<RunRecord>& records,
                               const std::filesystem::path& out_dir);

enum class ReportKind : std::uint8_t { kAll, kPipelines, kChoices };
ReportKind report_kind_from_string(const std::string& s);

/// Writes report_pipelines.csv and/or report_choices.csv; returns the files.
std::vector<std::filesystem::path> report(const std::filesystem::path& results_dir, ReportKind kind);

}  // namespace anomgym::gym
