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

#include <cstdint>
#include <string>
#include <vector>

#include "anomgym/datahub.hpp"

namespace anomgym::data {

enum class AnomalyKind : std::uint8_t { kLocal, kGlobal, kCluster, kDependency };

struct SynthConfig {
  AnomalyKind kind = AnomalyKind::kLocal;
  double alpha = 5.0;
  double anomaly_ratio = 0.05;  // anomalies appended per normal
  std::size_t gmm_components = 2;
  std::uint64_t seed = 0;

  /// alpha = 5 for local/cluster, 1.1 for global.
  static SynthConfig defaults(AnomalyKind kind, std::uint64_t seed);
  void validate() const;
};

/// Random correlated Gaussian-mixture normals used when no real base dataset
/// is supplied.
struct BaseGenerator {
  std::size_t n_normals = 500;
  std::size_t d = 8;
  std::size_t components = 2;
  std::uint64_t seed = 0;
};

struct DiagonalGmm {
  std::vector<double> weights;
  Matrix means;      // k x d
  Matrix variances;  // k x d, floored at 1e-6
};

inline constexpr double kVarianceFloor = 1e-6;

DiagonalGmm fit_diagonal_gmm(const Matrix& x, std::size_t components, std::uint64_t seed);

Matrix generate_base_normals(const BaseGenerator& gen);

/// Appends round(anomaly_ratio * n_normals) anomalies of the configured kind
/// after the normals.
Dataset synthesize(const Matrix& normals, const SynthConfig& cfg, std::string name);
/// Uses the label-0 rows of base as normals.
Dataset synthesize(const Dataset& base, const SynthConfig& cfg, std::string name);
Dataset synthesize(const BaseGenerator& gen, const SynthConfig& cfg, std::string name);

const char* to_string(AnomalyKind kind);
AnomalyKind anomaly_kind_from_string(const std::string& s);

}  // namespace anomgym::data
