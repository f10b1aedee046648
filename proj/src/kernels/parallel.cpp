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
#include <omp.h>

#include <algorithm>

#include "anomgym/kernels.hpp"
#include "kernels_common.hpp"

namespace anomgym::kernels::parallel {
namespace {

// Below this many multiply-adds the fork/join overhead dominates. Calls made
// from inside an already-parallel region (benchmark cell workers) stay serial.
constexpr std::size_t kMinParallelWork = 1 << 16;

bool go_parallel(std::size_t work) {
  return work >= kMinParallelWork && !omp_in_parallel() && omp_get_max_threads() > 1;
}

constexpr std::size_t kBlock = 4;

// Rows i0..i0+kBlock of C = A B. Each c(i, j) still sums over p in order, so
// the result matches gemm_nn_row exactly; B rows are loaded once per block.
void gemm_nn_block(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i0) {
  const std::size_t k = a.cols();
  const std::size_t m = b.cols();
  const double* __restrict a0 = a.data() + i0 * k;
  const double* __restrict a1 = a0 + k;
  const double* __restrict a2 = a1 + k;
  const double* __restrict a3 = a2 + k;
  double* __restrict c0 = c.data() + i0 * m;
  double* __restrict c1 = c0 + m;
  double* __restrict c2 = c1 + m;
  double* __restrict c3 = c2 + m;
  for (std::size_t p = 0; p < k; ++p) {
    const double* __restrict bp = b.data() + p * m;
    const double v0 = a0[p], v1 = a1[p], v2 = a2[p], v3 = a3[p];
    if (v0 != 0.0 && v1 != 0.0 && v2 != 0.0 && v3 != 0.0) {
      for (std::size_t j = 0; j < m; ++j) {
        const double bv = bp[j];
        c0[j] += v0 * bv;
        c1[j] += v1 * bv;
        c2[j] += v2 * bv;
        c3[j] += v3 * bv;
      }
      continue;
    }
    // zero entries are skipped, as in the row kernel
    const double v[kBlock] = {v0, v1, v2, v3};
    double* const cr[kBlock] = {c0, c1, c2, c3};
    for (std::size_t r = 0; r < kBlock; ++r) {
      if (v[r] == 0.0) continue;
      double* __restrict ci = cr[r];
      for (std::size_t j = 0; j < m; ++j) ci[j] += v[r] * bp[j];
    }
  }
}

// Rows p0..p0+kBlock of C = A^T B.
void gemm_tn_block(const Matrix& a, const Matrix& b, Matrix& c, std::size_t p0) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  const std::size_t m = b.cols();
  double* __restrict c0 = c.data() + p0 * m;
  double* __restrict c1 = c0 + m;
  double* __restrict c2 = c1 + m;
  double* __restrict c3 = c2 + m;
  for (std::size_t i = 0; i < n; ++i) {
    const double* __restrict ai = a.data() + i * k + p0;
    const double* __restrict bi = b.data() + i * m;
    const double v0 = ai[0], v1 = ai[1], v2 = ai[2], v3 = ai[3];
    if (v0 != 0.0 && v1 != 0.0 && v2 != 0.0 && v3 != 0.0) {
      for (std::size_t j = 0; j < m; ++j) {
        const double bv = bi[j];
        c0[j] += v0 * bv;
        c1[j] += v1 * bv;
        c2[j] += v2 * bv;
        c3[j] += v3 * bv;
      }
      continue;
    }
    const double v[kBlock] = {v0, v1, v2, v3};
    double* const cr[kBlock] = {c0, c1, c2, c3};
    for (std::size_t r = 0; r < kBlock; ++r) {
      if (v[r] == 0.0) continue;
      double* __restrict cp = cr[r];
      for (std::size_t j = 0; j < m; ++j) cp[j] += v[r] * bi[j];
    }
  }
}

}  // namespace

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  detail::check_gemm(a.rows(), a.cols(), b.rows(), b.cols(), c, accumulate, "gemm_nn");
  const auto blocks = static_cast<std::ptrdiff_t>(a.rows() / kBlock);
#pragma omp parallel for schedule(static) if (go_parallel(a.size() * b.cols()))
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) gemm_nn_block(a, b, c, static_cast<std::size_t>(blk) * kBlock);
  for (std::size_t i = static_cast<std::size_t>(blocks) * kBlock; i < a.rows(); ++i) detail::gemm_nn_row(a, b, c, i);
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  detail::check_gemm(a.rows(), a.cols(), b.cols(), b.rows(), c, accumulate, "gemm_nt");
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static) if (go_parallel(a.size() * b.rows()))
  for (std::ptrdiff_t i = 0; i < n; ++i) detail::gemm_nt_row(a, b, c, i);
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  detail::check_gemm(a.cols(), a.rows(), b.rows(), b.cols(), c, accumulate, "gemm_tn");
  const auto blocks = static_cast<std::ptrdiff_t>(a.cols() / kBlock);
#pragma omp parallel for schedule(static) if (go_parallel(a.size() * b.cols()))
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) gemm_tn_block(a, b, c, static_cast<std::size_t>(blk) * kBlock);
  for (std::size_t p = static_cast<std::size_t>(blocks) * kBlock; p < a.cols(); ++p) detail::gemm_tn_row(a, b, c, p);
}

void build_histogram(const HistogramArgs& args, std::span<double> hist) {
  std::fill(hist.begin(), hist.end(), 0.0);
  const auto nf = static_cast<std::ptrdiff_t>(args.n_features);
#pragma omp parallel for schedule(static) if (go_parallel(args.rows.size() * args.n_features))
  for (std::ptrdiff_t f = 0; f < nf; ++f) {
    double* hf = hist.data() + f * args.n_bins * 2;
    for (std::size_t r : args.rows) {
      const std::size_t bin = args.bins[r * args.n_features + f];
      hf[2 * bin] += args.gradients[r];
      hf[2 * bin + 1] += 1.0;
    }
  }
}

Matrix pairwise_sq_dist(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("pairwise_sq_dist: width mismatch");
  Matrix out(a.rows(), b.rows());
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static) if (go_parallel(a.size() * b.rows()))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const double d = a(i, k) - b(j, k);
        s += d * d;
      }
      out(i, j) = s;
    }
  }
  return out;
}

}  // namespace anomgym::kernels::parallel
