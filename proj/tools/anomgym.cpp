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
// anomgym command-line driver.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "anomgym/error.hpp"
#include "anomgym/evalmetrics.hpp"
#include "anomgym/gym.hpp"
#include "anomgym/metafeat.hpp"
#include "anomgym/metasel.hpp"
#include "anomgym/synth.hpp"

namespace fs = std::filesystem;
using namespace anomgym;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int workers = 0;  // 0: take it from the config (or 1)
  fs::path out = "results";
};

void write_json(const fs::path& file, const nlohmann::json& j) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw LoadError("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot read " + file.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(file.string() + " is not valid JSON: " + e.what());
  }
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string kind = "local";
  double alpha = -1.0;
  double anomaly_ratio = 0.05;
  std::size_t n_normals = 500;
  std::size_t dim = 8;
  std::size_t components = 2;
  std::uint64_t base_seed = 0;
  std::string base_csv;
  std::string name;
};

void cmd_synth(const Globals& g, const SynthArgs& a) {
  std::vector<data::AnomalyKind> kinds;
  if (a.kind == "all") {
    kinds = {data::AnomalyKind::kLocal, data::AnomalyKind::kGlobal, data::AnomalyKind::kCluster,
             data::AnomalyKind::kDependency};
  } else {
    kinds = {data::anomaly_kind_from_string(a.kind)};
  }
  fs::create_directories(g.out);
  for (data::AnomalyKind kind : kinds) {
    data::SynthConfig cfg = data::SynthConfig::defaults(kind, g.seed);
    if (a.alpha > 0) cfg.alpha = a.alpha;
    cfg.anomaly_ratio = a.anomaly_ratio;
    cfg.gmm_components = a.components;
    std::string name = a.name.empty() ? std::string(data::to_string(kind)) + "_b" +
                                            std::to_string(a.base_seed) + "_s" + std::to_string(g.seed)
                                      : a.name;
    if (!a.name.empty() && kinds.size() > 1) name += "_" + std::string(data::to_string(kind));
    data::Dataset ds = a.base_csv.empty()
                           ? data::synthesize(data::BaseGenerator{a.n_normals, a.dim, a.components, a.base_seed},
                                              cfg, name)
                           : data::synthesize(data::load_dataset(a.base_csv), cfg, name);
    const fs::path file = g.out / (name + ".csv");
    data::save_dataset(ds, file);
    std::printf("%s: %zu rows, %zu features, %zu anomalies\n", file.string().c_str(), ds.n(), ds.d(),
                ds.anomalies());
  }
}

// --- run -------------------------------------------------------------------

gym::BenchmarkConfig config_with_overrides(const Globals& g, const std::string& file) {
  gym::BenchmarkConfig cfg = gym::load_benchmark_config(file);
  if (g.workers > 0) cfg.workers = g.workers;
  return cfg;
}

void cmd_run(const Globals& g, const std::string& config) {
  const gym::BenchmarkConfig cfg = config_with_overrides(g, config);
  const auto outcome = gym::run_benchmark(cfg, g.out);
  std::printf("%zu new cells, %zu records in %s\n", outcome.new_cells, outcome.total_records,
              (g.out / "records.jsonl").string().c_str());
}

// --- meta-train ---------------------------------------------------------------

struct MetaArgs {
  std::string config;
  std::string backend;
  std::string loss;
  bool lodo = false;
  bool per_n_a = false;
  bool skip_ss = false;
};

void cmd_meta_train(const Globals& g, const MetaArgs& a) {
  gym::BenchmarkConfig cfg = config_with_overrides(g, a.config);
  if (!a.backend.empty()) cfg.backend = select::backend_from_string(a.backend);
  if (!a.loss.empty()) cfg.loss = select::meta_loss_from_string(a.loss);
  const auto outcome = gym::run_benchmark(cfg, g.out);
  if (outcome.new_cells > 0) std::printf("filled %zu missing cells\n", outcome.new_cells);

  std::vector<std::string> names;
  for (const auto& ds : outcome.datasets) names.push_back(ds->name);
  const auto metafeats = select::dataset_meta_features(outcome.datasets, cfg.meta_seed);
  const auto perf = select::performance_matrices(*outcome.cache, names, outcome.space.m_pipelines(),
                                                 cfg.n_as, cfg.seeds);
  const select::MetaTable table = select::assemble_meta_table(perf, metafeats, outcome.space);
  const select::MetaPredictor f = select::train_meta_predictor(table, cfg.backend, cfg.loss, cfg.meta_seed);
  write_json(g.out / "meta_model.json",
             {{"predictor", f.to_json()}, {"space", space::to_json(outcome.space)}, {"meta_seed", cfg.meta_seed}});
  std::printf("meta-predictor (%s, %s) trained on %zu rows -> %s\n", select::to_string(cfg.backend),
              select::to_string(cfg.loss), table.rows.size(), (g.out / "meta_model.json").string().c_str());

  if (!a.lodo) return;
  select::LodoConfig lc;
  lc.datasets = outcome.datasets;
  lc.space = outcome.space;
  lc.n_as = cfg.n_as;
  lc.seeds = cfg.seeds;
  lc.backend = cfg.backend;
  lc.loss = cfg.loss;
  lc.top_k = cfg.top_k;
  lc.per_n_a = a.per_n_a;
  lc.meta_seed = cfg.meta_seed;
  lc.workers = cfg.workers;
  lc.run_supervised = !a.skip_ss;
  const auto rep = select::run_lodo(lc, *outcome.cache);
  select::write_lodo_report(rep, g.out / "lodo");
  using F = select::LodoFold;
  std::printf("LODO mean AUCROC: top1 %.4f  top%zu %.4f  RS %.4f  SS %.4f  GT %.4f\n",
              rep.mean(&F::top1), lc.top_k, rep.mean(&F::topk), rep.mean(&F::rs), rep.mean(&F::ss),
              rep.mean(&F::gt));
}

// --- select -----------------------------------------------------------------

struct SelectArgs {
  std::string model;
  std::string data;
  std::size_t n_a = 10;
  std::size_t k = 5;
  bool fit = false;
};

void cmd_select(const Globals& g, const SelectArgs& a) {
  const nlohmann::json model = read_json(a.model);
  const select::MetaPredictor f = select::MetaPredictor::from_json(model.at("predictor"));
  const space::DesignSpace sp = space::space_from_json(model.at("space"));
  auto ds = std::make_shared<const data::Dataset>(data::load_dataset(a.data));
  const auto e_meta = meta::meta_features(ds->x, model.value("meta_seed", std::uint64_t{0}));
  const auto ranks = select::predict_pipeline_ranks(f, e_meta, a.n_a, sp);
  const auto ids = select::select_pipelines(ranks, std::min(a.k, sp.m_pipelines()));
  nlohmann::json out{{"dataset", ds->name}, {"n_a", a.n_a}, {"selected", nlohmann::json::array()}};
  for (std::size_t id : ids) {
    out["selected"].push_back({{"pipeline", id}, {"predicted_rank", ranks[id]}, {"config", space::to_json(sp.configs[id])}});
    std::printf("%4zu  %.4f  %s\n", id, ranks[id], sp.configs[id].describe().c_str());
  }
  if (a.fit) {
    const data::WeakView view = data::make_weak_view(ds, a.n_a, g.seed);
    const Matrix x_test = ds->x.select_rows(view.test);
    std::vector<int> y_test;
    for (std::size_t i : view.test) y_test.push_back(ds->y[i]);
    std::vector<std::optional<train::TrainedDetector>> dets;
    for (std::size_t id : ids) {
      try {
        dets.emplace_back(train::train_pipeline(view, sp.configs[id], g.seed));
      } catch (const Error& e) {
        std::fprintf(stderr, "pipeline %zu failed: [%s] %s\n", id, e.tag().c_str(), e.what());
        dets.emplace_back(std::nullopt);
      }
    }
    const auto scores = select::ensemble_scores(dets, x_test);
    out["test_auc_roc"] = metrics::auc_roc(scores, y_test);
    out["test_auc_pr"] = metrics::auc_pr(scores, y_test);
    std::printf("top-%zu ensemble on the test split: AUCROC %.4f  AUCPR %.4f\n", ids.size(),
                out["test_auc_roc"].get<double>(), out["test_auc_pr"].get<double>());
  }
  write_json(g.out / "selection.json", out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly-supervised tabular anomaly detection pipeline benchmark"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::string out_str = g.out.string();
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--workers", g.workers, "Worker threads for benchmark cells")->check(CLI::PositiveNumber);
  app.add_option("--out", out_str, "Output directory");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate synthetic anomaly datasets as CSV");
  synth->add_option("--kind", sa.kind, "local, global, cluster, dependency or all");
  synth->add_option("--alpha", sa.alpha, "Anomaly strength (defaults depend on the kind)");
  synth->add_option("--anomaly-ratio", sa.anomaly_ratio);
  synth->add_option("--n-normals", sa.n_normals);
  synth->add_option("--dim", sa.dim);
  synth->add_option("--components", sa.components);
  synth->add_option("--base-seed", sa.base_seed, "Seed of the generated normal data");
  synth->add_option("--base", sa.base_csv, "Take the normals from this CSV instead")->check(CLI::ExistingFile);
  synth->add_option("--name", sa.name);

  std::string run_config;
  auto* run = app.add_subcommand("run", "Run (or resume) a benchmark");
  run->add_option("--config", run_config, "Benchmark config (JSON)")->required()->check(CLI::ExistingFile);

  MetaArgs ma;
  auto* mt = app.add_subcommand("meta-train", "Train the meta-predictor on benchmark results");
  mt->add_option("--config", ma.config, "Benchmark config (JSON)")->required()->check(CLI::ExistingFile);
  mt->add_option("--backend", ma.backend, "neural or gbdt");
  mt->add_option("--loss", ma.loss, "mse, weighted_mse, pearson or ranknet");
  mt->add_flag("--lodo", ma.lodo, "Also run leave-one-dataset-out evaluation");
  mt->add_flag("--per-n-a", ma.per_n_a, "Train one predictor per n_a during LODO");
  mt->add_flag("--no-ss", ma.skip_ss, "Skip the supervised-selection baseline");

  SelectArgs sel;
  auto* sl = app.add_subcommand("select", "Zero-shot pipeline selection for a new dataset");
  sl->add_option("--model", sel.model, "meta_model.json from meta-train")->required()->check(CLI::ExistingFile);
  sl->add_option("--data", sel.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  sl->add_option("--n-a", sel.n_a, "Number of labeled anomalies");
  sl->add_option("-k,--top-k", sel.k, "Pipelines to select");
  sl->add_flag("--fit", sel.fit, "Train the selection on a weak view and score its test split");

  std::string report_kind = "all";
  auto* rp = app.add_subcommand("report", "Write CSV reports from a results directory");
  rp->add_option("--kind", report_kind, "all, pipelines or choices");

  CLI11_PARSE(app, argc, argv);
  g.out = out_str;
  try {
    if (*synth) cmd_synth(g, sa);
    if (*run) cmd_run(g, run_config);
    if (*mt) cmd_meta_train(g, ma);
    if (*sl) cmd_select(g, sel);
    if (*rp) {
      for (const auto& f : gym::report(g.out, gym::report_kind_from_string(report_kind))) {
        std::printf("%s\n", f.string().c_str());
      }
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.tag().c_str(), e.what());
    return 1;
  }
  return 0;
}
