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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "anomgym/datahub.hpp"
#include "anomgym/optimizer.hpp"

namespace anomgym::space {

/// Bumped whenever dimension order or choice order changes.
inline constexpr int kEncodingSchemaVersion = 1;

// Declared order is the encoding order.
enum class Dimension : std::uint8_t {
  kAugmentation,
  kPreprocessing,
  kArchitecture,
  kHiddenLayers,
  kActivation,
  kDropout,
  kInitialization,
  kLoss,
  kOptimizer,
  kEpochs,
  kBatchSize,
  kLearningRate,
  kWeightDecay,
};
inline constexpr std::size_t kNumDimensions = 13;

enum class Architecture : std::uint8_t { kMlp, kAutoencoder, kResnet, kFtTransformer };
enum class Activation : std::uint8_t { kTanh, kRelu, kLeakyRelu };
enum class Initialization : std::uint8_t { kDefault, kXavierNormal, kKaimingNormal, kPretrained };
enum class Loss : std::uint8_t { kBce, kFocal, kMinus, kInverse, kHinge, kDeviation };

enum class SpaceMode : std::uint8_t { kSmall, kLarge };

struct DimensionInfo {
  std::string_view key;                   // snake_case JSON key
  std::vector<std::string_view> choices;  // display names in encoding order
};

const DimensionInfo& dimension_info(Dimension dim);
std::size_t cardinality(Dimension dim);
const std::array<Dimension, kNumDimensions>& all_dimensions();

/// Dimensions varied in small mode; the rest sit at small_mode_default().
bool varied_in_small_mode(Dimension dim);
std::size_t small_mode_default(Dimension dim);

/// One choice per design dimension, stored as label-encoded indices.
class PipelineConfig {
 public:
  /// First declared choice everywhere.
  PipelineConfig() { choice_.fill(0); }

  static PipelineConfig small_mode_defaults();

  std::size_t choice(Dimension dim) const { return choice_[static_cast<std::size_t>(dim)]; }
  PipelineConfig& set(Dimension dim, std::size_t index);

  data::AugmentKind augmentation() const;
  data::PreprocessKind preprocessing() const;
  Architecture architecture() const;
  std::vector<std::size_t> hidden_layers() const;
  Activation activation() const;
  double dropout() const;
  Initialization initialization() const;
  Loss loss() const;
  grad::OptimizerKind optimizer() const;
  int epochs() const;
  int batch_size() const;
  double learning_rate() const;
  double weight_decay() const;

  std::string_view choice_name(Dimension dim) const {
    return dimension_info(dim).choices[choice(dim)];
  }
  std::string describe() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
  friend auto operator<=>(const PipelineConfig&, const PipelineConfig&) = default;

 private:
  std::array<std::uint8_t, kNumDimensions> choice_{};
};

/// E_comp: one integer per dimension, in Dimension order.
using PipelineEncoding = std::array<int, kNumDimensions>;

PipelineEncoding encode_pipeline(const PipelineConfig& cfg);
PipelineConfig decode_pipeline(const PipelineEncoding& enc);

nlohmann::json to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_from_json(const nlohmann::json& j);

struct DesignSpace {
  SpaceMode mode = SpaceMode::kSmall;
  std::vector<PipelineConfig> configs;
  std::uint64_t seed = 0;

  std::size_t m_pipelines() const noexcept { return configs.size(); }
};

/// Size of the Cartesian product for a mode (1728 small, 2239488 large).
std::uint64_t space_cardinality(SpaceMode mode);

/// m distinct configurations drawn uniformly without replacement.
DesignSpace sample_space(SpaceMode mode, std::uint64_t m_pipelines, std::uint64_t seed);
/// Every configuration of the mode, in mixed-radix order.
DesignSpace enumerate_space(SpaceMode mode);

nlohmann::json to_json(const DesignSpace& space);
DesignSpace space_from_json(const nlohmann::json& j);

const char* to_string(SpaceMode mode);
SpaceMode space_mode_from_string(const std::string& s);

}  // namespace anomgym::space
