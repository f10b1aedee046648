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
#include <limits>

#include <omp.h>

#include "anomgym/kernels.hpp"
#include "test_support.hpp"

using namespace anomgym;
namespace ref = anomgym::kernels::reference;
namespace par = anomgym::kernels::parallel;
using anomgym::testing::random_matrix;

// Sizes straddle the parallel threshold so both paths run.
TEST_CASE("parallel kernels are bit-identical to the reference") {
  omp_set_num_threads(4);
  Rng rng(12);
  for (std::size_t n : {3, 17, 64, 130}) {
    const std::size_t k = n + 5, m = 2 * n + 1;
    const Matrix a = random_matrix(n, k, rng), b = random_matrix(k, m, rng);
    const Matrix bt = random_matrix(m, k, rng), at = random_matrix(k, n, rng);
    for (bool acc : {false, true}) {
      Matrix c1 = random_matrix(n, m, rng), c2 = c1;
      ref::gemm_nn(a, b, c1, acc);
      par::gemm_nn(a, b, c2, acc);
      CHECK(c1.storage() == c2.storage());
      Matrix d1 = random_matrix(n, m, rng), d2 = d1;
      ref::gemm_nt(a, bt, d1, acc);
      par::gemm_nt(a, bt, d2, acc);
      CHECK(d1.storage() == d2.storage());
      Matrix e1 = random_matrix(n, m, rng), e2 = e1;
      ref::gemm_tn(at, b, e1, acc);
      par::gemm_tn(at, b, e2, acc);
      CHECK(e1.storage() == e2.storage());
    }
    CHECK(ref::pairwise_sq_dist(a, a).storage() == par::pairwise_sq_dist(a, a).storage());
  }
}

TEST_CASE("blocked kernels keep the zero skip of the reference") {
  omp_set_num_threads(4);
  Rng rng(13);
  for (std::size_t n : {4, 9, 66}) {
    Matrix a = random_matrix(n, n + 3, rng), at = random_matrix(n + 3, n, rng);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (uniform01(rng) < 0.4) a[i] = 0.0;
    for (std::size_t i = 0; i < at.size(); ++i)
      if (uniform01(rng) < 0.4) at[i] = 0.0;
    Matrix b = random_matrix(n + 3, 5, rng);
    a(0, 0) = 0.0;
    at(0, 0) = 0.0;
    b(0, 1) = std::numeric_limits<double>::infinity();
    Matrix c1, c2;
    ref::gemm_nn(a, b, c1);
    par::gemm_nn(a, b, c2);
    CHECK(std::isfinite(c1(0, 1)) == std::isfinite(c2(0, 1)));
    for (std::size_t i = 0; i < c1.size(); ++i) CHECK((c1[i] == c2[i] || (std::isnan(c1[i]) && std::isnan(c2[i]))));
    Matrix e1, e2;
    ref::gemm_tn(at, b, e1);
    par::gemm_tn(at, b, e2);
    for (std::size_t i = 0; i < e1.size(); ++i) CHECK((e1[i] == e2[i] || (std::isnan(e1[i]) && std::isnan(e2[i]))));
  }
}

TEST_CASE("gemm agrees with a naive triple loop") {
  Rng rng(3);
  const Matrix a = random_matrix(7, 5, rng), b = random_matrix(5, 9, rng);
  Matrix c(7, 9);
  kernels::gemm_nn(a, b, c);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 9; ++j) {
      double s = 0;
      for (std::size_t t = 0; t < 5; ++t) s += a(i, t) * b(t, j);
      CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-13));
    }
}

TEST_CASE("histogram kernels agree") {
  omp_set_num_threads(4);
  Rng rng(5);
  for (std::size_t n : {50, 5000, 40000}) {
    const std::size_t f = 13, bins = 32;
    std::vector<std::uint8_t> codes(n * f);
    for (auto& c : codes) c = static_cast<std::uint8_t>(uniform_index(rng, bins));
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; i += 1 + uniform_index(rng, 2)) rows.push_back(i);
    std::vector<double> g(n);
    for (double& v : g) v = uniform01(rng) - 0.5;
    const kernels::HistogramArgs args{codes, f, bins, rows, g};
    std::vector<double> h1(f * bins * 2), h2(f * bins * 2);
    ref::build_histogram(args, h1);
    par::build_histogram(args, h2);
    CHECK(h1 == h2);
    double count = 0;
    for (std::size_t b = 0; b < bins; ++b) count += h1[2 * b + 1];
    CHECK(count == static_cast<double>(rows.size()));
  }
}
