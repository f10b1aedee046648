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

#include <string>

#include "anomgym/error.hpp"
#include "anomgym/matrix.hpp"

namespace anomgym::kernels::detail {

inline void check_gemm(std::size_t ar, std::size_t ak, std::size_t bk, std::size_t bc,
                       Matrix& c, bool accumulate, const char* name) {
  if (ak != bk) {
    throw DimensionError(std::string(name) + ": inner dimensions " + std::to_string(ak) +
                         " and " + std::to_string(bk) + " differ");
  }
  if (accumulate) {
    if (c.rows() != ar || c.cols() != bc) {
      throw DimensionError(std::string(name) + ": accumulator has shape " + c.shape_string());
    }
  } else if (c.rows() != ar || c.cols() != bc) {
    c = Matrix(ar, bc);
  } else {
    c.fill(0.0);
  }
}

// Row-level bodies shared by both implementations so the summation order is
// identical.
inline void gemm_nn_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
  const std::size_t k = a.cols();
  const std::size_t m = b.cols();
  double* __restrict ci = c.data() + i * m;
  const double* __restrict ai = a.data() + i * k;
  for (std::size_t p = 0; p < k; ++p) {
    const double av = ai[p];
    if (av == 0.0) continue;
    const double* __restrict bp = b.data() + p * m;
    for (std::size_t j = 0; j < m; ++j) ci[j] += av * bp[j];
  }
}

inline void gemm_nt_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
  const std::size_t k = a.cols();
  const std::size_t m = b.rows();
  const double* __restrict ai = a.data() + i * k;
  double* __restrict ci = c.data() + i * m;
  for (std::size_t j = 0; j < m; ++j) {
    const double* __restrict bj = b.data() + j * k;
    // four interleaved partial sums, combined pairwise
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
      s0 += ai[p] * bj[p];
      s1 += ai[p + 1] * bj[p + 1];
      s2 += ai[p + 2] * bj[p + 2];
      s3 += ai[p + 3] * bj[p + 3];
    }
    for (; p < k; ++p) s0 += ai[p] * bj[p];
    ci[j] += (s0 + s1) + (s2 + s3);
  }
}

// Row p of A^T * B.
inline void gemm_tn_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t p) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  const std::size_t m = b.cols();
  double* __restrict cp = c.data() + p * m;
  const double* __restrict ad = a.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double av = ad[i * k + p];
    if (av == 0.0) continue;
    const double* __restrict bi = b.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) cp[j] += av * bi[j];
  }
}

}  // namespace anomgym::kernels::detail
