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
#include "anomgym/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "anomgym/error.hpp"

namespace anomgym::data {
namespace {

constexpr int kEmIterations = 200;
constexpr double kEmTolerance = 1e-8;

double log_sum_exp(std::span<const double> v) {
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// k-means++ seeding.
Matrix seed_means(const Matrix& x, std::size_t k, Rng& rng) {
  Matrix means(k, x.cols());
  std::vector<double> dist(x.rows(), std::numeric_limits<double>::infinity());
  std::size_t pick = uniform_index(rng, x.rows());
  for (std::size_t c = 0; c < k; ++c) {
    std::copy_n(x.row(pick).data(), x.cols(), means.row(c).data());
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      double s = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j) {
        const double diff = x(r, j) - means(c, j);
        s += diff * diff;
      }
      dist[r] = std::min(dist[r], s);
      total += dist[r];
    }
    if (total <= 0.0) {
      pick = uniform_index(rng, x.rows());
      continue;
    }
    double u = uniform01(rng) * total;
    pick = x.rows() - 1;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      u -= dist[r];
      if (u <= 0.0) {
        pick = r;
        break;
      }
    }
  }
  return means;
}

std::size_t sample_component(const DiagonalGmm& g, Rng& rng) {
  double u = uniform01(rng);
  for (std::size_t c = 0; c + 1 < g.weights.size(); ++c) {
    u -= g.weights[c];
    if (u <= 0.0) return c;
  }
  return g.weights.size() - 1;
}

}  // namespace

const char* to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::kLocal: return "local";
    case AnomalyKind::kGlobal: return "global";
    case AnomalyKind::kCluster: return "cluster";
    case AnomalyKind::kDependency: return "dependency";
  }
  return "?";
}

AnomalyKind anomaly_kind_from_string(const std::string& s) {
  for (auto k : {AnomalyKind::kLocal, AnomalyKind::kGlobal, AnomalyKind::kCluster,
                 AnomalyKind::kDependency}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown anomaly kind '" + s + "'");
}

SynthConfig SynthConfig::defaults(AnomalyKind kind, std::uint64_t seed) {
  SynthConfig c;
  c.kind = kind;
  c.alpha = kind == AnomalyKind::kGlobal ? 1.1 : 5.0;
  c.seed = seed;
  return c;
}

void SynthConfig::validate() const {
  if (!(anomaly_ratio > 0.0 && anomaly_ratio < 0.5)) {
    throw ConfigError("anomaly_ratio must lie in (0, 0.5)");
  }
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (kind == AnomalyKind::kGlobal && !(alpha > 1.0)) {
    throw ConfigError("global anomalies need alpha > 1");
  }
  if (gmm_components == 0) throw ConfigError("gmm_components must be positive");
}

DiagonalGmm fit_diagonal_gmm(const Matrix& x, std::size_t components, std::uint64_t seed) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const std::size_t k = std::min(components, n);
  if (n == 0 || k == 0) throw ContractError("fit_diagonal_gmm: empty input");
  Rng rng(seed);
  DiagonalGmm g;
  g.weights.assign(k, 1.0 / static_cast<double>(k));
  g.means = seed_means(x, k, rng);
  g.variances = Matrix(k, d);
  for (std::size_t j = 0; j < d; ++j) {
    double mu = 0.0;
    for (std::size_t r = 0; r < n; ++r) mu += x(r, j);
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) var += (x(r, j) - mu) * (x(r, j) - mu);
    var = std::max(var / static_cast<double>(n), kVarianceFloor);
    for (std::size_t c = 0; c < k; ++c) g.variances(c, j) = var;
  }

  Matrix resp(n, k);
  std::vector<double> logp(k);
  double prev = -std::numeric_limits<double>::infinity();
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (int it = 0; it < kEmIterations; ++it) {
    double ll = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < k; ++c) {
        double s = std::log(std::max(g.weights[c], 1e-300));
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = x(r, j) - g.means(c, j);
          s -= 0.5 * (log2pi + std::log(g.variances(c, j)) + diff * diff / g.variances(c, j));
        }
        logp[c] = s;
      }
      const double lse = log_sum_exp(logp);
      ll += lse;
      for (std::size_t c = 0; c < k; ++c) resp(r, c) = std::exp(logp[c] - lse);
    }
    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0;
      for (std::size_t r = 0; r < n; ++r) nk += resp(r, c);
      g.weights[c] = nk / static_cast<double>(n);
      if (nk <= 1e-12) continue;
      for (std::size_t j = 0; j < d; ++j) {
        double mu = 0.0;
        for (std::size_t r = 0; r < n; ++r) mu += resp(r, c) * x(r, j);
        mu /= nk;
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) var += resp(r, c) * (x(r, j) - mu) * (x(r, j) - mu);
        g.means(c, j) = mu;
        g.variances(c, j) = std::max(var / nk, kVarianceFloor);
      }
    }
    if (std::abs(ll - prev) < kEmTolerance * std::max(1.0, std::abs(ll))) break;
    prev = ll;
  }
  return g;
}

Matrix generate_base_normals(const BaseGenerator& gen) {
  if (gen.d == 0 || gen.components == 0) throw ConfigError("base generator needs d, k > 0");
  Rng rng(derive_seed(gen.seed, "base_normals", "generator"));
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> centre(-4.0, 4.0);
  std::uniform_real_distribution<double> diag(0.5, 1.5);
  const std::size_t d = gen.d;
  std::vector<Matrix> chol;
  Matrix means(gen.components, d);
  std::vector<double> weights(gen.components);
  for (std::size_t c = 0; c < gen.components; ++c) {
    Matrix l(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < i; ++j) l(i, j) = 0.7 * z(rng);
      l(i, i) = diag(rng);
    }
    chol.push_back(std::move(l));
    for (std::size_t j = 0; j < d; ++j) means(c, j) = centre(rng);
    weights[c] = 0.5 + uniform01(rng);
  }
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  Matrix x(gen.n_normals, d);
  std::vector<double> e(d);
  for (std::size_t r = 0; r < gen.n_normals; ++r) {
    double u = uniform01(rng) * wsum;
    std::size_t c = 0;
    while (c + 1 < gen.components && (u -= weights[c]) > 0.0) ++c;
    for (double& v : e) v = z(rng);
    for (std::size_t i = 0; i < d; ++i) {
      double s = means(c, i);
      for (std::size_t j = 0; j <= i; ++j) s += chol[c](i, j) * e[j];
      x(r, i) = s;
    }
  }
  return x;
}

Dataset synthesize(const Matrix& normals, const SynthConfig& cfg, std::string name) {
  cfg.validate();
  if (normals.rows() < 50) throw ConfigError("synthesize: base needs at least 50 normal rows");
  const std::size_t n = normals.rows();
  const std::size_t d = normals.cols();
  const auto n_anom =
      static_cast<std::size_t>(std::llround(cfg.anomaly_ratio * static_cast<double>(n)));
  Rng rng(derive_seed(cfg.seed, name, std::string("synth:") + to_string(cfg.kind)));
  std::normal_distribution<double> z(0.0, 1.0);

  Matrix anomalies(n_anom, d);
  switch (cfg.kind) {
    case AnomalyKind::kLocal:
    case AnomalyKind::kCluster: {
      const DiagonalGmm g =
          fit_diagonal_gmm(normals, cfg.gmm_components, derive_seed(cfg.seed, name, "gmm"));
      const bool local = cfg.kind == AnomalyKind::kLocal;
      for (std::size_t r = 0; r < n_anom; ++r) {
        const std::size_t c = sample_component(g, rng);
        for (std::size_t j = 0; j < d; ++j) {
          const double sd = std::sqrt(g.variances(c, j));
          anomalies(r, j) = local ? g.means(c, j) + cfg.alpha * sd * z(rng)
                                  : cfg.alpha * g.means(c, j) + sd * z(rng);
        }
      }
      break;
    }
    case AnomalyKind::kGlobal: {
      for (std::size_t j = 0; j < d; ++j) {
        double lo = normals(0, j);
        double hi = lo;
        for (std::size_t r = 1; r < n; ++r) {
          lo = std::min(lo, normals(r, j));
          hi = std::max(hi, normals(r, j));
        }
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo) * cfg.alpha;
        std::uniform_real_distribution<double> u(mid - half, mid + half);
        for (std::size_t r = 0; r < n_anom; ++r) anomalies(r, j) = u(rng);
      }
      break;
    }
    case AnomalyKind::kDependency: {
      std::vector<std::size_t> rows(n);
      std::iota(rows.begin(), rows.end(), 0);
      std::shuffle(rows.begin(), rows.end(), rng);
      rows.resize(std::min(n_anom, n));
      while (rows.size() < n_anom) rows.push_back(uniform_index(rng, n));
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<std::size_t> perm = rows;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t r = 0; r < n_anom; ++r) anomalies(r, j) = normals(perm[r], j);
      }
      break;
    }
  }

  Dataset ds;
  ds.name = std::move(name);
  ds.x = Matrix(n + n_anom, d);
  std::copy_n(normals.data(), normals.size(), ds.x.data());
  std::copy_n(anomalies.data(), anomalies.size(), ds.x.data() + normals.size());
  ds.y.assign(n, 0);
  ds.y.resize(n + n_anom, 1);
  ds.provenance = std::string("synthetic(") + to_string(cfg.kind) + ",alpha=" +
                  std::to_string(cfg.alpha) + ",seed=" + std::to_string(cfg.seed) + ")";
  ds.validate();
  return ds;
}

Dataset synthesize(const Dataset& base, const SynthConfig& cfg, std::string name) {
  std::vector<std::size_t> normals;
  for (std::size_t i = 0; i < base.n(); ++i)
    if (base.y[i] == 0) normals.push_back(i);
  return synthesize(base.x.select_rows(normals), cfg, std::move(name));
}

Dataset synthesize(const BaseGenerator& gen, const SynthConfig& cfg, std::string name) {
  return synthesize(generate_base_normals(gen), cfg, std::move(name));
}

}  // namespace anomgym::data
