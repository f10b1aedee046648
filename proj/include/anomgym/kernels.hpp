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

// Data-parallel inner loops. Every kernel has a serial reference
// implementation and an OpenMP implementation that splits the outer loop over
// independent outputs, so both produce bit-identical results.

#include <cstddef>
#include <cstdint>
#include <span>

#include "anomgym/matrix.hpp"

namespace anomgym::kernels {

// C (+)= A * B
// C (+)= A * B^T
// C (+)= A^T * B
// The accumulate flag adds into C instead of overwriting it.

/// Gradient/hessian histogram for one tree node: for every feature, sums the
/// gradients and counts of the node's rows per bin.
/// bins is row-major n_rows x n_features; hist is n_features x n_bins x 2.
struct HistogramArgs {
  std::span<const std::uint8_t> bins;
  std::size_t n_features = 0;
  std::size_t n_bins = 0;
  std::span<const std::size_t> rows;
  std::span<const double> gradients;
};

namespace reference {
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
void build_histogram(const HistogramArgs& args, std::span<double> hist);
/// Squared Euclidean distances between every row of a and every row of b.
Matrix pairwise_sq_dist(const Matrix& a, const Matrix& b);
}  // namespace reference

namespace parallel {
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
void build_histogram(const HistogramArgs& args, std::span<double> hist);
Matrix pairwise_sq_dist(const Matrix& a, const Matrix& b);
}  // namespace parallel

// The library calls these; they dispatch to the parallel kernels.
using parallel::build_histogram;
using parallel::gemm_nn;
using parallel::gemm_nt;
using parallel::gemm_tn;
using parallel::pairwise_sq_dist;

}  // namespace anomgym::kernels
