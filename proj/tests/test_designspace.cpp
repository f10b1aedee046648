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

#include <set>

#include "anomgym/designspace.hpp"
#include "anomgym/error.hpp"

using namespace anomgym;
using namespace anomgym::space;

TEST_CASE("cardinalities") {
  CHECK(space_cardinality(SpaceMode::kSmall) == 4 * 4 * 3 * 6 * 3 * 2);
  CHECK(space_cardinality(SpaceMode::kSmall) == 1728);
  std::uint64_t large = 1;
  for (Dimension d : all_dimensions()) large *= cardinality(d);
  CHECK(space_cardinality(SpaceMode::kLarge) == large);
  CHECK(cardinality(Dimension::kLoss) == 6);
  CHECK(cardinality(Dimension::kInitialization) == 4);
  CHECK(enumerate_space(SpaceMode::kSmall).configs.size() == 1728);
}

TEST_CASE("sample_space") {
  const DesignSpace a = sample_space(SpaceMode::kSmall, 1000, 42);
  const DesignSpace b = sample_space(SpaceMode::kSmall, 1000, 42);
  CHECK(a.configs == b.configs);
  CHECK(std::set<PipelineConfig>(a.configs.begin(), a.configs.end()).size() == 1000);
  CHECK(sample_space(SpaceMode::kSmall, 1000, 43).configs != a.configs);
  const PipelineConfig defaults = PipelineConfig::small_mode_defaults();
  for (const auto& c : a.configs) {
    for (Dimension d : all_dimensions()) {
      if (!varied_in_small_mode(d)) CHECK(c.choice(d) == defaults.choice(d));
    }
  }
  CHECK(defaults.hidden_layers() == std::vector<std::size_t>{100, 20});
  CHECK(defaults.dropout() == 0.1);
  CHECK(defaults.epochs() == 50);
  CHECK(defaults.batch_size() == 64);
  CHECK(defaults.weight_decay() == 1e-4);
  CHECK(defaults.initialization() == Initialization::kDefault);
  CHECK_THROWS_AS(sample_space(SpaceMode::kSmall, 1000000000, 0), ConfigError);
  CHECK_THROWS_AS(sample_space(SpaceMode::kSmall, 1729, 0), ConfigError);
  CHECK(sample_space(SpaceMode::kLarge, 500, 1).configs.size() == 500);
}

TEST_CASE("encoding") {
  CHECK(encode_pipeline(PipelineConfig{}) == PipelineEncoding{});
  PipelineConfig a, b;
  b.set(Dimension::kLoss, 5);
  const auto ea = encode_pipeline(a), eb = encode_pipeline(b);
  for (std::size_t i = 0; i < kNumDimensions; ++i) {
    CHECK((ea[i] != eb[i]) == (i == static_cast<std::size_t>(Dimension::kLoss)));
  }
  for (const auto& c : sample_space(SpaceMode::kLarge, 100, 7).configs) {
    const auto e = encode_pipeline(c);
    for (Dimension d : all_dimensions()) CHECK(e[static_cast<std::size_t>(d)] < static_cast<int>(cardinality(d)));
    CHECK(decode_pipeline(e) == c);
    CHECK(pipeline_from_json(to_json(c)) == c);
  }
  CHECK_THROWS(PipelineConfig{}.set(Dimension::kLoss, 6));
}

TEST_CASE("json") {
  PipelineConfig c;
  c.set(Dimension::kLoss, 5).set(Dimension::kLearningRate, 1);
  const auto j = to_json(c);
  CHECK(j.at("loss") == "deviation");
  CHECK(j.at("learning_rate") == 1e-3);
  const DesignSpace s = sample_space(SpaceMode::kSmall, 20, 3);
  const DesignSpace back = space_from_json(to_json(s));
  CHECK(back.configs == s.configs);
  CHECK(back.seed == s.seed);
  CHECK(back.mode == s.mode);
  auto bad = to_json(c);
  bad["loss"] = "ordinal";
  CHECK_THROWS(pipeline_from_json(bad));
}
