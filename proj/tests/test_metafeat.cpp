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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anomgym/error.hpp"
#include "anomgym/metafeat.hpp"
#include "test_support.hpp"

using namespace anomgym;
using namespace anomgym::meta;

namespace {

std::size_t index_of(const std::string& name) {
  const auto& names = meta_feature_names();
  const auto it = std::find(names.begin(), names.end(), name);
  REQUIRE_MESSAGE(it != names.end(), name);
  return static_cast<std::size_t>(it - names.begin());
}

double stat(const std::vector<double>& v, const std::string& name) { return v.at(index_of(name)); }

Matrix uniform(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, d);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = uniform01(rng);
  return m;
}

void all_finite(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    INFO(meta_feature_names()[i]);
    CHECK(std::isfinite(v[i]));
  }
}

}  // namespace

TEST_CASE("schema") {
  CHECK(meta_feature_names().size() == kMetaFeatureLength);
  CHECK(kMetaFeatureLength == 311);
  CHECK(BlockOffsets{}.end == kMetaFeatureLength);
  const auto v = meta_features(uniform(60, 4, 1), 0);
  CHECK(v.values.size() == kMetaFeatureLength);
  CHECK(v.schema_version == kMetaSchemaVersion);
  const auto back = meta_from_json(to_json(v));
  CHECK(back.values == v.values);
  auto bad = to_json(v);
  bad["schema_version"] = kMetaSchemaVersion + 1;
  CHECK_THROWS_AS(meta_from_json(bad), ContractError);
}

TEST_CASE("identical constant columns") {
  const Matrix x(40, 3, 2.0);
  const auto v = statistical_features(x);
  CHECK(v.size() == kStatisticalWidth);
  for (const char* agg : {"min", "max", "mean", "std"}) {
    CHECK(stat(v, std::string("stat.var.") + agg) == 0.0);
    CHECK(stat(v, std::string("stat.sparsity.") + agg) ==
          doctest::Approx(std::string(agg) == "std" ? 0.0 : 1.0 / 40).epsilon(1e-12).scale(1.0));
  }
  // skewness is undefined everywhere: imputed 0 with the flag raised
  CHECK(stat(v, "stat.skewness.mean") == 0.0);
  CHECK(stat(v, "stat.skewness.imputed") == 1.0);
  CHECK(stat(v, "stat.mean.mean") == 2.0);
  std::vector<double> full = v;
  const auto lm = landmarker_features(x, 0);
  full.insert(full.end(), lm.begin(), lm.end());
  all_finite(full);
  CHECK(stat(full, "pca.sv1") == 0.0);
}

TEST_CASE("standard normal 1000 x 5") {
  Rng rng(3);
  const Matrix x = anomgym::testing::random_matrix(1000, 5, rng);
  const auto v = statistical_features(x);
  CHECK(std::abs(stat(v, "stat.mean.mean")) < 0.1);
  CHECK(std::abs(stat(v, "stat.pct_outside_3sigma") - 0.0027) < 0.01);
  CHECK(stat(v, "stat.n") == 1000);
  CHECK(stat(v, "stat.p") == 5);
  CHECK(stat(v, "stat.log_n_over_p") == doctest::Approx(std::log(200.0)));
  CHECK(stat(v, "stat.pct_categorical") == 0.0);
  CHECK(stat(v, "stat.normality_pass_fraction") >= 0.6);
  CHECK(std::abs(stat(v, "stat.correlation.mean")) < 0.1);
  CHECK(stat(v, "stat.var.mean") == doctest::Approx(1.0).epsilon(0.1));
  CHECK(v == statistical_features(x));
}

TEST_CASE("normality test separates normal from uniform") {
  Rng rng(5);
  std::normal_distribution<double> nd;
  std::vector<double> normal(2000), flat(2000);
  for (double& v : normal) v = nd(rng);
  for (double& v : flat) v = uniform01(rng);
  CHECK(normality_p_value(normal) > 0.01);
  CHECK(normality_p_value(flat) < 1e-6);
}

TEST_CASE("aggregate") {
  const auto a = aggregate({1.0, 2.0, 3.0});
  CHECK(a.size() == kAggregateWidth);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == 3.0);
  CHECK(a[2] == 2.0);
  CHECK(a[4] == 0.0);  // symmetric
  CHECK(a[6] == 0.0);
  const auto nanny = aggregate({1.0, std::nan(""), 3.0});
  for (double v : nanny) CHECK(std::isfinite(v));
  CHECK(nanny[6] == 1.0);
  CHECK(nanny[2] == 2.0);
}

TEST_CASE("iforest depth on uniform 256 x 2") {
  const auto trees = isolation_forest(uniform(256, 2, 7), 0);
  CHECK(trees.size() == kIForestTrees);
  double depth = 0;
  for (const auto& t : trees) {
    depth += t.depth / trees.size();
    double imp = 0;
    for (double c : t.split_counts) imp += c;
    CHECK(imp > 0);
  }
  CHECK(depth >= 4.0);
  CHECK(depth <= 16.0);
}

TEST_CASE("hbos bin mass on uniform data") {
  Rng rng(2);
  std::vector<double> col(5000);
  for (double& v : col) v = uniform01(rng);
  const auto mass = hbos_bin_mass(col);
  CHECK(mass.size() == kHbosBins);
  for (double m : mass) CHECK(std::abs(m - 0.1) <= 0.05);
}

TEST_CASE("pca on rank-1 data") {
  Rng rng(4);
  Matrix x(100, 4);
  const double dir[4] = {1, -2, 0.5, 3};
  for (std::size_t r = 0; r < 100; ++r) {
    const double t = uniform01(rng) * 10 - 5;
    for (std::size_t j = 0; j < 4; ++j) x(r, j) = t * dir[j] + 7;
  }
  const auto v = meta_features(x, 0).values;
  CHECK(stat(v, "pca.evr1") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(stat(v, "pca.evr2")) < 1e-12);
  CHECK(std::abs(stat(v, "pca.evr3")) < 1e-12);
  CHECK(stat(v, "pca.sv1") > 0.0);
  all_finite(v);
}

TEST_CASE("pca pads when d < 3") {
  const auto v = meta_features(uniform(50, 2, 1), 0).values;
  CHECK(stat(v, "pca.evr3") == 0.0);
  CHECK(stat(v, "pca.sv3") == 0.0);
  CHECK(stat(v, "pca.evr1") + stat(v, "pca.evr2") == doctest::Approx(1.0));
}

TEST_CASE("row permutation invariance, determinism and sensitivity") {
  Rng rng(9);
  const Matrix x = anomgym::testing::random_matrix(80, 4, rng);
  std::vector<std::size_t> perm(80);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto a = meta_features(x, 3);
  CHECK(meta_features(x.select_rows(perm), 3).values == a.values);
  CHECK(meta_features(x, 3).values == a.values);
  Matrix dup(80, 5);
  for (std::size_t r = 0; r < 80; ++r) {
    for (std::size_t j = 0; j < 4; ++j) dup(r, j) = x(r, j);
    dup(r, 4) = x(r, 0);
  }
  CHECK(meta_features(dup, 3).values != a.values);
  all_finite(a.values);
}

TEST_CASE("many features use sampled pairs") {
  const auto v = meta_features(uniform(60, 70, 2), 1).values;
  all_finite(v);
  CHECK(stat(v, "stat.p") == 70);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(statistical_features(Matrix(3, 2, 1.0)), ContractError);
  CHECK_THROWS_AS(landmarker_features(Matrix(19, 2, 1.0), 0), ContractError);
}
