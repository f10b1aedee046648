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

#include <Eigen/Dense>

#include "anomgym/error.hpp"
#include "anomgym/metafeat.hpp"
#include "anomgym/rng.hpp"
#include "metafeat_internal.hpp"

namespace anomgym::meta {
namespace {

struct TreeBuilder {
  const Matrix& x;
  std::size_t height_limit;
  Rng& rng;
  IsolationTreeStats stats;

  void grow(std::vector<std::size_t>& rows, std::size_t depth) {
    stats.depth = std::max(stats.depth, static_cast<double>(depth));
    if (depth >= height_limit || rows.size() <= 1) {
      stats.leaves += 1;
      return;
    }
    // Only features that still vary inside the node can split it.
    std::vector<std::size_t> candidates;
    std::vector<std::pair<double, double>> bounds;
    for (std::size_t f = 0; f < x.cols(); ++f) {
      double lo = x(rows[0], f);
      double hi = lo;
      for (std::size_t r : rows) {
        lo = std::min(lo, x(r, f));
        hi = std::max(hi, x(r, f));
      }
      if (hi > lo) {
        candidates.push_back(f);
        bounds.emplace_back(lo, hi);
      }
    }
    if (candidates.empty()) {
      stats.leaves += 1;
      return;
    }
    const std::size_t pick = uniform_index(rng, candidates.size());
    const std::size_t f = candidates[pick];
    const auto [lo, hi] = bounds[pick];
    double split = lo + uniform01(rng) * (hi - lo);
    if (split <= lo) split = std::nextafter(lo, hi);
    stats.split_counts[f] += 1;
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) (x(r, f) < split ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    grow(left, depth + 1);
    grow(right, depth + 1);
  }
};

// Column values of an equal-width 10-bin histogram: (masses, bin width).
std::pair<std::vector<double>, double> histogram(const std::vector<double>& v, std::size_t bins) {
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double width = (*hi_it - lo) / static_cast<double>(bins);
  std::vector<double> mass(bins, 0.0);
  for (double x : v) {
    std::size_t b = 0;
    if (width > 0.0) {
      b = std::min(bins - 1, static_cast<std::size_t>((x - lo) / width));
    }
    mass[b] += 1.0;
  }
  for (double& m : mass) m /= static_cast<double>(v.size());
  return {mass, width};
}

// Mean and max density of a histogram; undefined for zero width.
bool density_summary(const std::vector<double>& v, std::size_t bins, double& mean_d,
                     double& max_d) {
  const auto [mass, width] = histogram(v, bins);
  if (!(width > 0.0)) {
    mean_d = 0.0;
    max_d = 0.0;
    return false;
  }
  mean_d = 0.0;
  max_d = 0.0;
  for (double m : mass) {
    mean_d += m / width;
    max_d = std::max(max_d, m / width);
  }
  mean_d /= static_cast<double>(bins);
  return true;
}

void append(std::vector<double>& out, const std::vector<double>& block) {
  out.insert(out.end(), block.begin(), block.end());
}

}  // namespace

std::vector<double> hbos_bin_mass(const std::vector<double>& column) {
  if (column.empty()) throw ContractError("hbos_bin_mass: empty column");
  return histogram(column, kHbosBins).first;
}

std::vector<IsolationTreeStats> isolation_forest(const Matrix& x, std::uint64_t seed) {
  const std::size_t n = x.rows();
  const std::size_t psi = std::min(kIForestSubsample, n);
  const auto height = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(psi))));
  Rng rng(derive_seed(seed, "metafeat", "iforest"));
  std::vector<IsolationTreeStats> trees;
  trees.reserve(kIForestTrees);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t t = 0; t < kIForestTrees; ++t) {
    // Partial Fisher-Yates for the subsample; sorted so the tree only
    // depends on which rows were drawn.
    for (std::size_t i = 0; i < psi; ++i) std::swap(all[i], all[i + uniform_index(rng, n - i)]);
    std::vector<std::size_t> rows(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(psi));
    std::sort(rows.begin(), rows.end());
    TreeBuilder b{x, height, rng, {0.0, 0.0, std::vector<double>(x.cols(), 0.0)}};
    b.grow(rows, 0);
    trees.push_back(std::move(b.stats));
  }
  return trees;
}

std::vector<double> landmarker_features(const Matrix& x, std::uint64_t seed) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 20) throw ContractError("landmarker_features needs at least 20 rows");
  if (d == 0) throw ContractError("landmarker_features needs at least one feature");
  std::vector<double> out;
  out.reserve(kLandmarkerWidth);

  // iForest
  {
    const auto trees = isolation_forest(x, seed);
    std::vector<double> depth, leaves;
    std::vector<double> imp_mean(d, 0.0), imp_max(d, 0.0);
    bool imputed = false;
    for (const auto& t : trees) {
      depth.push_back(t.depth);
      leaves.push_back(t.leaves);
      const double splits = std::accumulate(t.split_counts.begin(), t.split_counts.end(), 0.0);
      if (splits == 0.0) {
        imputed = true;
        continue;
      }
      for (std::size_t f = 0; f < d; ++f) {
        const double imp = t.split_counts[f] / splits;
        imp_mean[f] += imp / static_cast<double>(trees.size());
        imp_max[f] = std::max(imp_max[f], imp);
      }
    }
    append(out, aggregate(depth));
    append(out, aggregate(leaves));
    append(out, aggregate(imp_mean, imputed));
    append(out, aggregate(imp_max, imputed));
  }

  // HBOS
  {
    std::vector<double> means, maxes;
    bool imputed = false;
    for (std::size_t f = 0; f < d; ++f) {
      double mean_d = 0.0, max_d = 0.0;
      imputed = !density_summary(x.column(f), kHbosBins, mean_d, max_d) || imputed;
      means.push_back(mean_d);
      maxes.push_back(max_d);
    }
    append(out, aggregate(means, imputed));
    append(out, aggregate(maxes, imputed));
  }

  // LODA
  {
    Rng rng(derive_seed(seed, "metafeat", "loda"));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto nonzero = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    std::vector<double> z_mean, z_max, h_mean, h_max;
    bool imputed = false;
    std::vector<std::size_t> coords(d);
    for (std::size_t r = 0; r < kLodaProjections; ++r) {
      std::iota(coords.begin(), coords.end(), 0);
      std::vector<double> w(d, 0.0);
      double norm = 0.0;
      for (std::size_t i = 0; i < nonzero; ++i) {
        std::swap(coords[i], coords[i + uniform_index(rng, d - i)]);
        w[coords[i]] = gauss(rng);
        norm += w[coords[i]] * w[coords[i]];
      }
      norm = std::sqrt(norm);
      if (norm > 0.0) {
        for (double& v : w) v /= norm;
      }
      std::vector<double> z(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < d; ++f) z[i] += x(i, f) * w[f];
      }
      z_mean.push_back(std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(n));
      z_max.push_back(*std::max_element(z.begin(), z.end()));
      double mean_d = 0.0, max_d = 0.0;
      imputed = !density_summary(z, kLodaBins, mean_d, max_d) || imputed;
      h_mean.push_back(mean_d);
      h_max.push_back(max_d);
    }
    append(out, aggregate(z_mean));
    append(out, aggregate(z_max));
    append(out, aggregate(h_mean, imputed));
    append(out, aggregate(h_max, imputed));
  }

  // PCA on centred data
  {
    Eigen::MatrixXd m(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < d; ++f) m(i, f) = x(i, f);
    }
    m.rowwise() -= m.colwise().mean();
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    const double total = sv.squaredNorm();
    for (std::size_t i = 0; i < 3; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      out.push_back(i < static_cast<std::size_t>(sv.size()) && total > 0.0
                        ? sv(ii) * sv(ii) / total
                        : 0.0);
    }
    for (std::size_t i = 0; i < 3; ++i) {
      out.push_back(i < static_cast<std::size_t>(sv.size()) ? sv(static_cast<Eigen::Index>(i))
                                                            : 0.0);
    }
  }
  return out;
}

const std::vector<std::string>& meta_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    statistical_names(out);
    for (const char* g : {"depth", "leaves", "importance_mean", "importance_max"}) {
      append_group_names(out, std::string("iforest.") + g);
    }
    for (const char* g : {"density_mean", "density_max"}) {
      append_group_names(out, std::string("hbos.") + g);
    }
    for (const char* g : {"value_mean", "value_max", "density_mean", "density_max"}) {
      append_group_names(out, std::string("loda.") + g);
    }
    for (const char* g : {"evr1", "evr2", "evr3", "sv1", "sv2", "sv3"}) {
      out.push_back(std::string("pca.") + g);
    }
    return out;
  }();
  return names;
}

Matrix canonical_row_order(const Matrix& x) {
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = x.row(a);
    const auto rb = x.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return x.select_rows(order);
}

MetaFeatureVector meta_features(const Matrix& x, std::uint64_t seed) {
  const Matrix canon = canonical_row_order(x);
  MetaFeatureVector v;
  v.values = statistical_features(canon, seed);
  append(v.values, landmarker_features(canon, seed));
  if (v.values.size() != kMetaFeatureLength) {
    throw ContractError("meta-feature length " + std::to_string(v.values.size()) +
                        " does not match the schema");
  }
  for (double& e : v.values) {
    if (!std::isfinite(e)) e = 0.0;
  }
  return v;
}

nlohmann::json to_json(const MetaFeatureVector& v) {
  const BlockOffsets& o = v.offsets;
  return {{"schema_version", v.schema_version},
          {"offsets",
           {{"statistical", o.statistical},
            {"iforest", o.iforest},
            {"hbos", o.hbos},
            {"loda", o.loda},
            {"pca", o.pca},
            {"end", o.end}}},
          {"values", v.values}};
}

MetaFeatureVector meta_from_json(const nlohmann::json& j) {
  MetaFeatureVector v;
  v.schema_version = j.at("schema_version").get<int>();
  if (v.schema_version != kMetaSchemaVersion) {
    throw ContractError("meta-feature schema version " + std::to_string(v.schema_version) +
                        " is not supported");
  }
  v.values = j.at("values").get<std::vector<double>>();
  if (v.values.size() != kMetaFeatureLength) throw ContractError("meta-feature length mismatch");
  return v;
}

}  // namespace anomgym::meta
