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

#include "anomgym/kernels.hpp"
#include "kernels_common.hpp"

namespace anomgym::kernels::reference {

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  detail::check_gemm(a.rows(), a.cols(), b.rows(), b.cols(), c, accumulate, "gemm_nn");
  for (std::size_t i = 0; i < a.rows(); ++i) detail::gemm_nn_row(a, b, c, i);
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  detail::check_gemm(a.rows(), a.cols(), b.cols(), b.rows(), c, accumulate, "gemm_nt");
  for (std::size_t i = 0; i < a.rows(); ++i) detail::gemm_nt_row(a, b, c, i);
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  detail::check_gemm(a.cols(), a.rows(), b.rows(), b.cols(), c, accumulate, "gemm_tn");
  for (std::size_t p = 0; p < a.cols(); ++p) detail::gemm_tn_row(a, b, c, p);
}

void build_histogram(const HistogramArgs& args, std::span<double> hist) {
  std::fill(hist.begin(), hist.end(), 0.0);
  for (std::size_t f = 0; f < args.n_features; ++f) {
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
  for (std::size_t i = 0; i < a.rows(); ++i) {
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

}  // namespace anomgym::kernels::reference
