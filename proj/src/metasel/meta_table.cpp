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

#include "anomgym/error.hpp"
#include "anomgym/metasel.hpp"

namespace anomgym::select {

std::vector<double> feature_row(std::span<const double> meta_standardized, std::size_t n_a,
                                const space::PipelineEncoding& enc) {
  std::vector<double> row(meta_standardized.begin(), meta_standardized.end());
  row.push_back(static_cast<double>(n_a));
  for (int e : enc) row.push_back(e);
  return row;
}

void MetaTable::restandardize() {
  const std::size_t w = meta::kMetaFeatureLength;
  meta_mean.assign(w, 0.0);
  meta_std.assign(w, 1.0);
  if (rows.empty()) return;
  const auto n = static_cast<double>(rows.size());
  std::vector<double> sq(w, 0.0);
  for (const MetaRow& r : rows) {
    for (std::size_t c = 0; c < w; ++c) meta_mean[c] += raw_meta[r.dataset][c];
  }
  for (double& m : meta_mean) m /= n;
  for (const MetaRow& r : rows) {
    for (std::size_t c = 0; c < w; ++c) {
      const double d = raw_meta[r.dataset][c] - meta_mean[c];
      sq[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < w; ++c) {
    const double sd = std::sqrt(sq[c] / n);
    // Relative threshold: columns equal up to rounding count as constant.
    meta_std[c] = sd > 1e-12 * std::max(1.0, std::abs(meta_mean[c])) ? sd : 1.0;
  }
}

Matrix MetaTable::feature_matrix() const {
  Matrix out(rows.size(), width());
  std::vector<std::vector<double>> standardized(datasets.size());
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    standardized[d].resize(meta::kMetaFeatureLength);
    for (std::size_t c = 0; c < meta::kMetaFeatureLength; ++c) {
      standardized[d][c] = (raw_meta[d][c] - meta_mean[c]) / meta_std[c];
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = feature_row(standardized[rows[i].dataset], rows[i].n_a,
                                 encodings[rows[i].pipeline]);
    std::copy(row.begin(), row.end(), out.row(i).begin());
  }
  return out;
}

std::vector<double> MetaTable::targets() const {
  std::vector<double> t;
  t.reserve(rows.size());
  for (const MetaRow& r : rows) t.push_back(r.target);
  return t;
}

std::vector<std::size_t> MetaTable::groups() const {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(rows.size());
  for (const MetaRow& r : rows) {
    auto [it, inserted] = ids.try_emplace({r.dataset, r.n_a}, ids.size());
    out.push_back(it->second);
  }
  return out;
}

MetaTable MetaTable::without_dataset(const std::string& name) const {
  MetaTable out;
  out.encodings = encodings;
  std::vector<std::size_t> remap(datasets.size(), datasets.size());
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    if (datasets[d] == name) continue;
    remap[d] = out.datasets.size();
    out.datasets.push_back(datasets[d]);
    out.raw_meta.push_back(raw_meta[d]);
  }
  for (const MetaRow& r : rows) {
    if (remap[r.dataset] == datasets.size()) continue;
    MetaRow copy = r;
    copy.dataset = remap[r.dataset];
    out.rows.push_back(copy);
  }
  out.restandardize();
  return out;
}

MetaTable MetaTable::only_n_a(std::size_t n_a) const {
  MetaTable out = *this;
  std::erase_if(out.rows, [n_a](const MetaRow& r) { return r.n_a != n_a; });
  out.restandardize();
  return out;
}

MetaTable assemble_meta_table(const std::vector<metrics::PerformanceMatrix>& perf,
                              const std::map<std::string, meta::MetaFeatureVector>& metafeats,
                              const space::DesignSpace& space) {
  if (perf.empty()) throw ContractError("assemble_meta_table: no performance matrices");
  MetaTable t;
  t.datasets = perf.front().datasets;
  for (const auto& cfg : space.configs) t.encodings.push_back(space::encode_pipeline(cfg));
  for (const std::string& name : t.datasets) {
    const auto it = metafeats.find(name);
    if (it == metafeats.end()) throw ContractError("no meta-features for dataset " + name);
    if (it->second.schema_version != meta::kMetaSchemaVersion ||
        it->second.values.size() != meta::kMetaFeatureLength) {
      throw ContractError("meta-feature schema mismatch for dataset " + name);
    }
    t.raw_meta.push_back(it->second.values);
  }
  for (const auto& p : perf) {
    if (p.datasets != t.datasets) throw ContractError("performance matrices list different datasets");
    if (p.m_pipelines != space.m_pipelines()) {
      throw ContractError("performance matrix has " + std::to_string(p.m_pipelines) +
                          " pipelines, space has " + std::to_string(space.m_pipelines()));
    }
    if (p.rank.rows() != p.n_datasets() || p.rank.cols() != p.m_pipelines) {
      throw ContractError("performance matrix is not rank-normalized");
    }
    for (std::size_t i = 0; i < p.n_datasets(); ++i) {
      for (std::size_t j = 0; j < p.m_pipelines; ++j) {
        if (p.is_failed(i, j)) continue;
        t.rows.push_back({i, j, p.n_a, p.rank(i, j)});
      }
    }
  }
  t.restandardize();
  return t;
}

}  // namespace anomgym::select
