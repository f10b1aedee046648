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
// Reference vs OpenMP kernels. Run with OMP_NUM_THREADS=N to see scaling.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "anomgym/kernels.hpp"

namespace {

using anomgym::Matrix;
namespace ref = anomgym::kernels::reference;
namespace par = anomgym::kernels::parallel;

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

// square-ish layer: batch x in -> out
template <void (*Gemm)(const Matrix&, const Matrix&, Matrix&, bool)>
void BM_gemm_nn(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Matrix a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
  Matrix c(n, n);
  for (auto _ : st) {
    Gemm(a, b, c, false);
    benchmark::DoNotOptimize(c.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}

template <void (*Gemm)(const Matrix&, const Matrix&, Matrix&, bool)>
void BM_gemm_nt(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Matrix a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
  Matrix c(n, n);
  for (auto _ : st) {
    Gemm(a, b, c, false);
    benchmark::DoNotOptimize(c.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}

template <void (*Gemm)(const Matrix&, const Matrix&, Matrix&, bool)>
void BM_gemm_tn(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Matrix a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
  Matrix c(n, n);
  for (auto _ : st) {
    Gemm(a, b, c, false);
    benchmark::DoNotOptimize(c.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}

template <Matrix (*Dist)(const Matrix&, const Matrix&)>
void BM_pairwise(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const Matrix a = random_matrix(n, 16, 3);
  for (auto _ : st) {
    Matrix d = Dist(a, a);
    benchmark::DoNotOptimize(d.data());
  }
}

template <void (*Hist)(const anomgym::kernels::HistogramArgs&, std::span<double>)>
void BM_histogram(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  constexpr std::size_t features = 325, n_bins = 32;
  std::mt19937_64 rng(4);
  std::vector<std::uint8_t> bins(n * features);
  for (auto& b : bins) b = static_cast<std::uint8_t>(rng() % n_bins);
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  std::vector<double> grad(n, 0.5);
  std::vector<double> hist(features * n_bins * 2);
  const anomgym::kernels::HistogramArgs args{bins, features, n_bins, rows, grad};
  for (auto _ : st) {
    Hist(args, hist);
    benchmark::DoNotOptimize(hist.data());
  }
}

}  // namespace

BENCHMARK(BM_gemm_nn<ref::gemm_nn>)->Name("gemm_nn/reference")->Arg(64)->Arg(256);
BENCHMARK(BM_gemm_nn<par::gemm_nn>)->Name("gemm_nn/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_gemm_nt<ref::gemm_nt>)->Name("gemm_nt/reference")->Arg(64)->Arg(256);
BENCHMARK(BM_gemm_nt<par::gemm_nt>)->Name("gemm_nt/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_gemm_tn<ref::gemm_tn>)->Name("gemm_tn/reference")->Arg(64)->Arg(256);
BENCHMARK(BM_gemm_tn<par::gemm_tn>)->Name("gemm_tn/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_pairwise<ref::pairwise_sq_dist>)->Name("pairwise_sq_dist/reference")->Arg(512);
BENCHMARK(BM_pairwise<par::pairwise_sq_dist>)->Name("pairwise_sq_dist/parallel")->Arg(512);
BENCHMARK(BM_histogram<ref::build_histogram>)->Name("build_histogram/reference")->Arg(20000);
BENCHMARK(BM_histogram<par::build_histogram>)->Name("build_histogram/parallel")->Arg(20000);

BENCHMARK_MAIN();
