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
#include "anomgym/designspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "anomgym/error.hpp"
#include "anomgym/rng.hpp"

namespace anomgym::space {
namespace {

const std::array<DimensionInfo, kNumDimensions>& table() {
  static const std::array<DimensionInfo, kNumDimensions> t = {{
      {"augmentation", {"origin", "oversampling", "smote", "mixup"}},
      {"preprocessing", {"minmax", "normalization"}},
      {"architecture", {"mlp", "autoencoder", "resnet", "fttransformer"}},
      {"hidden_layers", {"[20]", "[100,20]", "[100,50,20]"}},
      {"activation", {"tanh", "relu", "leakyrelu"}},
      {"dropout", {"0.0", "0.1", "0.3"}},
      {"initialization", {"default", "xavier_normal", "kaiming_normal", "pretrained"}},
      {"loss", {"bce", "focal", "minus", "inverse", "hinge", "deviation"}},
      {"optimizer", {"sgd", "adam", "rmsprop"}},
      {"epochs", {"20", "50", "100"}},
      {"batch_size", {"16", "64", "256"}},
      {"learning_rate", {"1e-2", "1e-3"}},
      {"weight_decay", {"1e-2", "1e-4"}},
  }};
  return t;
}

constexpr std::array<double, 3> kDropouts = {0.0, 0.1, 0.3};
constexpr std::array<int, 3> kEpochs = {20, 50, 100};
constexpr std::array<int, 3> kBatchSizes = {16, 64, 256};
constexpr std::array<double, 2> kLearningRates = {1e-2, 1e-3};
constexpr std::array<double, 2> kWeightDecays = {1e-2, 1e-4};

std::vector<Dimension> varied_dimensions(SpaceMode mode) {
  std::vector<Dimension> dims;
  for (Dimension d : all_dimensions())
    if (mode == SpaceMode::kLarge || varied_in_small_mode(d)) dims.push_back(d);
  return dims;
}

PipelineConfig decode_index(SpaceMode mode, std::uint64_t index) {
  PipelineConfig cfg = mode == SpaceMode::kSmall ? PipelineConfig::small_mode_defaults()
                                                 : PipelineConfig();
  auto dims = varied_dimensions(mode);
  for (auto it = dims.rbegin(); it != dims.rend(); ++it) {
    const std::size_t card = cardinality(*it);
    cfg.set(*it, index % card);
    index /= card;
  }
  return cfg;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

const DimensionInfo& dimension_info(Dimension dim) {
  return table()[static_cast<std::size_t>(dim)];
}

std::size_t cardinality(Dimension dim) { return dimension_info(dim).choices.size(); }

const std::array<Dimension, kNumDimensions>& all_dimensions() {
  static const std::array<Dimension, kNumDimensions> dims = [] {
    std::array<Dimension, kNumDimensions> d{};
    for (std::size_t i = 0; i < kNumDimensions; ++i) d[i] = static_cast<Dimension>(i);
    return d;
  }();
  return dims;
}

bool varied_in_small_mode(Dimension dim) {
  switch (dim) {
    case Dimension::kAugmentation:
    case Dimension::kArchitecture:
    case Dimension::kActivation:
    case Dimension::kLoss:
    case Dimension::kOptimizer:
    case Dimension::kLearningRate:
      return true;
    default:
      return false;
  }
}

std::size_t small_mode_default(Dimension dim) {
  switch (dim) {
    case Dimension::kHiddenLayers: return 1;    // [100,20]
    case Dimension::kDropout: return 1;         // 0.1
    case Dimension::kEpochs: return 1;          // 50
    case Dimension::kBatchSize: return 1;       // 64
    case Dimension::kWeightDecay: return 1;     // 1e-4
    default: return 0;  // minmax, default init; varied dimensions start at 0
  }
}

PipelineConfig PipelineConfig::small_mode_defaults() {
  PipelineConfig c;
  for (Dimension d : all_dimensions()) c.set(d, small_mode_default(d));
  return c;
}

PipelineConfig& PipelineConfig::set(Dimension dim, std::size_t index) {
  if (index >= cardinality(dim)) {
    throw ConfigError(std::string(dimension_info(dim).key) + ": choice index " +
                      std::to_string(index) + " out of range");
  }
  choice_[static_cast<std::size_t>(dim)] = static_cast<std::uint8_t>(index);
  return *this;
}

data::AugmentKind PipelineConfig::augmentation() const {
  return static_cast<data::AugmentKind>(choice(Dimension::kAugmentation));
}
data::PreprocessKind PipelineConfig::preprocessing() const {
  return static_cast<data::PreprocessKind>(choice(Dimension::kPreprocessing));
}
Architecture PipelineConfig::architecture() const {
  return static_cast<Architecture>(choice(Dimension::kArchitecture));
}
std::vector<std::size_t> PipelineConfig::hidden_layers() const {
  switch (choice(Dimension::kHiddenLayers)) {
    case 0: return {20};
    case 1: return {100, 20};
    default: return {100, 50, 20};
  }
}
Activation PipelineConfig::activation() const {
  return static_cast<Activation>(choice(Dimension::kActivation));
}
double PipelineConfig::dropout() const { return kDropouts[choice(Dimension::kDropout)]; }
Initialization PipelineConfig::initialization() const {
  return static_cast<Initialization>(choice(Dimension::kInitialization));
}
Loss PipelineConfig::loss() const { return static_cast<Loss>(choice(Dimension::kLoss)); }
grad::OptimizerKind PipelineConfig::optimizer() const {
  return static_cast<grad::OptimizerKind>(choice(Dimension::kOptimizer));
}
int PipelineConfig::epochs() const { return kEpochs[choice(Dimension::kEpochs)]; }
int PipelineConfig::batch_size() const { return kBatchSizes[choice(Dimension::kBatchSize)]; }
double PipelineConfig::learning_rate() const {
  return kLearningRates[choice(Dimension::kLearningRate)];
}
double PipelineConfig::weight_decay() const {
  return kWeightDecays[choice(Dimension::kWeightDecay)];
}

std::string PipelineConfig::describe() const {
  std::string s;
  for (Dimension d : all_dimensions()) {
    if (!s.empty()) s += ' ';
    s += dimension_info(d).key;
    s += '=';
    s += choice_name(d);
  }
  return s;
}

PipelineEncoding encode_pipeline(const PipelineConfig& cfg) {
  PipelineEncoding e{};
  for (Dimension d : all_dimensions())
    e[static_cast<std::size_t>(d)] = static_cast<int>(cfg.choice(d));
  return e;
}

PipelineConfig decode_pipeline(const PipelineEncoding& enc) {
  PipelineConfig cfg;
  for (Dimension d : all_dimensions()) {
    const int v = enc[static_cast<std::size_t>(d)];
    if (v < 0) throw ConfigError("negative encoding entry");
    cfg.set(d, static_cast<std::size_t>(v));
  }
  return cfg;
}

nlohmann::json to_json(const PipelineConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (Dimension d : all_dimensions()) {
    const std::string key(dimension_info(d).key);
    switch (d) {
      case Dimension::kHiddenLayers: j[key] = cfg.hidden_layers(); break;
      case Dimension::kDropout: j[key] = cfg.dropout(); break;
      case Dimension::kEpochs: j[key] = cfg.epochs(); break;
      case Dimension::kBatchSize: j[key] = cfg.batch_size(); break;
      case Dimension::kLearningRate: j[key] = cfg.learning_rate(); break;
      case Dimension::kWeightDecay: j[key] = cfg.weight_decay(); break;
      default: j[key] = std::string(cfg.choice_name(d)); break;
    }
  }
  return j;
}

PipelineConfig pipeline_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
  PipelineConfig cfg;
  for (Dimension d : all_dimensions()) {
    const std::string key(dimension_info(d).key);
    if (!j.contains(key)) throw ConfigError("pipeline config lacks key '" + key + "'");
    const auto& v = j.at(key);
    std::size_t found = cardinality(d);
    for (std::size_t i = 0; i < cardinality(d) && found == cardinality(d); ++i) {
      PipelineConfig probe;
      probe.set(d, i);
      switch (d) {
        case Dimension::kHiddenLayers:
          if (v.is_array() && v.get<std::vector<std::size_t>>() == probe.hidden_layers()) found = i;
          break;
        case Dimension::kDropout:
          if (v.is_number() && near(v.get<double>(), probe.dropout())) found = i;
          break;
        case Dimension::kEpochs:
          if (v.is_number() && v.get<double>() == probe.epochs()) found = i;
          break;
        case Dimension::kBatchSize:
          if (v.is_number() && v.get<double>() == probe.batch_size()) found = i;
          break;
        case Dimension::kLearningRate:
          if (v.is_number() && near(v.get<double>(), probe.learning_rate())) found = i;
          break;
        case Dimension::kWeightDecay:
          if (v.is_number() && near(v.get<double>(), probe.weight_decay())) found = i;
          break;
        default:
          if (v.is_string() && v.get<std::string>() == probe.choice_name(d)) found = i;
          break;
      }
    }
    if (found == cardinality(d)) {
      throw ConfigError("'" + key + "': undeclared choice " + v.dump());
    }
    cfg.set(d, found);
  }
  return cfg;
}

std::uint64_t space_cardinality(SpaceMode mode) {
  std::uint64_t p = 1;
  for (Dimension d : varied_dimensions(mode)) p *= cardinality(d);
  return p;
}

DesignSpace sample_space(SpaceMode mode, std::uint64_t m_pipelines, std::uint64_t seed) {
  const std::uint64_t total = space_cardinality(mode);
  if (m_pipelines > total) {
    throw ConfigError("requested " + std::to_string(m_pipelines) + " pipelines but the " +
                      to_string(mode) + " space has only " + std::to_string(total) +
                      " configurations");
  }
  Rng rng(derive_seed(seed, to_string(mode), "sample_space"));
  std::vector<std::uint64_t> picks;
  picks.reserve(m_pipelines);
  if (2 * m_pipelines >= total) {
    std::vector<std::uint64_t> all(total);
    std::iota(all.begin(), all.end(), 0);
    // Partial Fisher-Yates.
    for (std::uint64_t i = 0; i < m_pipelines; ++i) {
      const auto j = i + std::uniform_int_distribution<std::uint64_t>(0, total - 1 - i)(rng);
      std::swap(all[i], all[j]);
      picks.push_back(all[i]);
    }
  } else {
    std::unordered_set<std::uint64_t> seen;
    std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
    while (picks.size() < m_pipelines) {
      const std::uint64_t v = pick(rng);
      if (seen.insert(v).second) picks.push_back(v);
    }
  }
  DesignSpace s;
  s.mode = mode;
  s.seed = seed;
  s.configs.reserve(picks.size());
  for (auto idx : picks) s.configs.push_back(decode_index(mode, idx));
  return s;
}

DesignSpace enumerate_space(SpaceMode mode) {
  DesignSpace s;
  s.mode = mode;
  const auto total = space_cardinality(mode);
  s.configs.reserve(total);
  for (std::uint64_t i = 0; i < total; ++i) s.configs.push_back(decode_index(mode, i));
  return s;
}

nlohmann::json to_json(const DesignSpace& space) {
  nlohmann::json configs = nlohmann::json::array();
  for (const auto& c : space.configs) configs.push_back(to_json(c));
  nlohmann::json dims = nlohmann::json::array();
  for (Dimension d : all_dimensions()) dims.push_back(std::string(dimension_info(d).key));
  return {{"schema_version", kEncodingSchemaVersion},
          {"mode", to_string(space.mode)},
          {"m_pipelines", space.m_pipelines()},
          {"seed", space.seed},
          {"dimension_order", dims},
          {"configs", configs}};
}

DesignSpace space_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", -1) != kEncodingSchemaVersion) {
    throw ConfigError("design space schema version mismatch");
  }
  DesignSpace s;
  s.mode = space_mode_from_string(j.at("mode").get<std::string>());
  s.seed = j.value("seed", std::uint64_t{0});
  for (const auto& c : j.at("configs")) s.configs.push_back(pipeline_from_json(c));
  if (j.contains("m_pipelines") && j.at("m_pipelines").get<std::size_t>() != s.configs.size()) {
    throw ConfigError("design space header m_pipelines disagrees with config count");
  }
  return s;
}

const char* to_string(SpaceMode mode) { return mode == SpaceMode::kSmall ? "small" : "large"; }

SpaceMode space_mode_from_string(const std::string& s) {
  if (s == "small") return SpaceMode::kSmall;
  if (s == "large") return SpaceMode::kLarge;
  throw ConfigError("unknown space mode '" + s + "'");
}

}  // namespace anomgym::space
