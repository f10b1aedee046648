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
#include <fstream>
#include <set>

#include "anomgym/error.hpp"
#include "anomgym/gym.hpp"

namespace anomgym::gym {
namespace {

template <typename T>
T field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw UsageError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError(where + ": '" + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? field<T>(j, key, where) : fallback;
}

DatasetSpec parse_dataset(const nlohmann::json& j, std::size_t index,
                          const std::filesystem::path& base_dir) {
  const std::string where = "datasets[" + std::to_string(index) + "]";
  if (!j.is_object()) throw UsageError(where + " must be an object");
  DatasetSpec s;
  if (j.contains("path")) {
    std::filesystem::path p = field<std::string>(j, "path", where);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    s.path = p;
    s.name = field_or<std::string>(j, "name", p.stem().string(), where);
    return s;
  }
  try {
    s.kind = data::anomaly_kind_from_string(field<std::string>(j, "kind", where));
  } catch (const ConfigError& e) {
    throw UsageError(where + ": " + e.what());
  }
  if (j.contains("alpha")) s.alpha = field<double>(j, "alpha", where);
  s.anomaly_ratio = field_or<double>(j, "anomaly_ratio", 0.05, where);
  s.seed = field_or<std::uint64_t>(j, "seed", 0, where);
  s.base.n_normals = field_or<std::size_t>(j, "n_normals", s.base.n_normals, where);
  s.base.d = field_or<std::size_t>(j, "d", s.base.d, where);
  s.base.components = field_or<std::size_t>(j, "components", s.base.components, where);
  s.base.seed = field_or<std::uint64_t>(j, "base_seed", 0, where);
  s.name = field_or<std::string>(
      j, "name",
      std::string(data::to_string(s.kind)) + "_b" + std::to_string(s.base.seed) + "_s" +
          std::to_string(s.seed),
      where);
  return s;
}

}  // namespace

BenchmarkConfig parse_benchmark_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  BenchmarkConfig c;
  const auto& ds = j.contains("datasets") ? j.at("datasets") : nlohmann::json();
  if (!ds.is_array() || ds.empty()) throw UsageError("config: 'datasets' must be a non-empty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    c.datasets.push_back(parse_dataset(ds[i], i, base_dir));
    if (!names.insert(c.datasets.back().name).second) {
      throw UsageError("config: duplicate dataset name '" + c.datasets.back().name + "'");
    }
  }
  const nlohmann::json sp = j.value("space", nlohmann::json::object());
  try {
    c.mode = space::space_mode_from_string(field_or<std::string>(sp, "mode", "small", "space"));
  } catch (const ConfigError& e) {
    throw UsageError(std::string("space: ") + e.what());
  }
  c.m_pipelines = field_or<std::uint64_t>(sp, "m_pipelines", 64, "space");
  c.space_seed = field_or<std::uint64_t>(sp, "seed", 0, "space");
  if (c.m_pipelines == 0) throw UsageError("space: m_pipelines must be positive");
  c.n_as = field<std::vector<std::size_t>>(j, "n_a", "config");
  c.seeds = field<std::vector<std::uint64_t>>(j, "seeds", "config");
  if (c.n_as.empty()) throw UsageError("config: 'n_a' must list at least one value");
  if (c.seeds.empty()) throw UsageError("config: 'seeds' must list at least one value");
  for (std::size_t n_a : c.n_as) {
    if (n_a == 0) throw UsageError("config: n_a values must be positive");
  }
  c.workers = field_or<int>(j, "workers", 1, "config");
  if (c.workers < 1) throw UsageError("config: workers must be >= 1");
  const nlohmann::json meta = j.value("meta", nlohmann::json::object());
  try {
    c.backend = select::backend_from_string(field_or<std::string>(meta, "backend", "gbdt", "meta"));
    c.loss = select::meta_loss_from_string(field_or<std::string>(meta, "loss", "mse", "meta"));
  } catch (const ConfigError& e) {
    throw UsageError(std::string("meta: ") + e.what());
  }
  c.top_k = field_or<std::size_t>(meta, "top_k", 5, "meta");
  c.meta_seed = field_or<std::uint64_t>(meta, "seed", 0, "meta");
  if (c.top_k == 0) throw UsageError("meta: top_k must be positive");
  return c;
}

BenchmarkConfig load_benchmark_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot read config " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config " + file.string() + " is not valid JSON: " + e.what());
  }
  return parse_benchmark_config(j, file.parent_path());
}

data::DatasetPtr materialize(const DatasetSpec& spec) {
  if (spec.path) {
    data::Dataset ds = data::load_dataset(*spec.path);
    ds.name = spec.name;
    return std::make_shared<const data::Dataset>(std::move(ds));
  }
  data::SynthConfig sc = data::SynthConfig::defaults(spec.kind, spec.seed);
  if (spec.alpha) sc.alpha = *spec.alpha;
  sc.anomaly_ratio = spec.anomaly_ratio;
  sc.gmm_components = spec.base.components;
  return std::make_shared<const data::Dataset>(data::synthesize(spec.base, sc, spec.name));
}

std::vector<data::DatasetPtr> materialize(const std::vector<DatasetSpec>& specs) {
  std::vector<data::DatasetPtr> out;
  for (const auto& s : specs) out.push_back(materialize(s));
  return out;
}

space::DesignSpace load_or_create_space(const BenchmarkConfig& cfg, const std::filesystem::path& out_dir) {
  const auto file = out_dir / "space.json";
  if (std::filesystem::exists(file)) {
    std::ifstream in(file);
    space::DesignSpace sp = space::space_from_json(nlohmann::json::parse(in));
    if (sp.mode != cfg.mode || sp.m_pipelines() != cfg.m_pipelines || sp.seed != cfg.space_seed) {
      throw UsageError(out_dir.string() + " holds results for a different design space");
    }
    return sp;
  }
  space::DesignSpace sp = space::sample_space(cfg.mode, cfg.m_pipelines, cfg.space_seed);
  std::filesystem::create_directories(out_dir);
  std::ofstream(file) << space::to_json(sp).dump(2) << '\n';
  return sp;
}

BenchmarkOutcome run_benchmark(const BenchmarkConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  BenchmarkOutcome out;
  out.space = load_or_create_space(cfg, out_dir);
  out.datasets = materialize(cfg.datasets);
  out.cache = std::make_shared<select::CellCache>();
  ResultStore store(out_dir / "records.jsonl");
  for (const RunRecord& r : store.records()) out.cache->insert(r.key(), to_cell(r));
  select::fill_cells(*out.cache, out.datasets, out.space, cfg.n_as, cfg.seeds, cfg.workers,
                     [&](const select::CellKey& key, const select::CellResult& cell) {
                       store.append(make_record(key, out.space.configs[key.pipeline], cell));
                       ++out.new_cells;
                     });
  out.total_records = store.records().size();
  write_dimension_summaries(store.records(), out_dir);
  return out;
}

}  // namespace anomgym::gym
