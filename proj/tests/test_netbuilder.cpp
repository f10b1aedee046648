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

#include "anomgym/netbuilder.hpp"
#include "arch_gradcheck.hpp"
#include "test_support.hpp"

using namespace anomgym;
using namespace anomgym::net;
using space::Dimension;
using space::PipelineConfig;

namespace {

PipelineConfig with_arch(Architecture a) {
  PipelineConfig c = PipelineConfig::small_mode_defaults();
  c.set(Dimension::kArchitecture, static_cast<std::size_t>(a));
  return c;
}

constexpr Architecture kAll[] = {Architecture::kMlp, Architecture::kAutoencoder,
                                 Architecture::kResnet, Architecture::kFtTransformer};

double sample_std(const std::vector<double>& v) {
  double m = 0, s = 0;
  for (double x : v) m += x / v.size();
  for (double x : v) s += (x - m) * (x - m) / (v.size() - 1);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("mlp parameter count") {
  PipelineConfig c = with_arch(Architecture::kMlp);
  c.set(Dimension::kHiddenLayers, 1);  // [100, 20]
  CHECK(build_network(10, c, 0).parameter_count() == 3141);
}

TEST_CASE("every architecture maps b x d to b x 1, deterministically") {
  Rng rng(1);
  const Matrix x = anomgym::testing::random_matrix(7, 5, rng);
  for (Architecture a : kAll) {
    for (std::size_t h = 0; h < 3; ++h) {
      PipelineConfig c = with_arch(a);
      c.set(Dimension::kHiddenLayers, h);
      const DetectorNet n1 = build_network(5, c, 3), n2 = build_network(5, c, 3);
      const auto s = n1.score(x);
      CHECK(s.size() == 7);
      CHECK(s == n2.score(x));
      CHECK(s == n1.score(x));
      for (double v : s) CHECK(std::isfinite(v));
      CHECK(n1.to_json() == n2.to_json());
      CHECK(build_network(5, c, 4).to_json() != n1.to_json());
    }
  }
}

TEST_CASE("json round trip") {
  for (Architecture a : kAll) {
    const DetectorNet src = build_network(4, with_arch(a), 1);
    DetectorNet dst = build_network(4, with_arch(a), 2);
    dst.load_json(src.to_json());
    Rng rng(2);
    const Matrix x = anomgym::testing::random_matrix(3, 4, rng);
    CHECK(dst.score(x) == src.score(x));
  }
}

TEST_CASE("initialization statistics") {
  PipelineConfig c = with_arch(Architecture::kMlp);
  c.set(Dimension::kHiddenLayers, 2);  // [100, 50, 20]
  SUBCASE("xavier normal, fan_in = fan_out = 100") {
    DetectorNet n = build_network(100, c, 0);
    init_params(n, Initialization::kXavierNormal, 5);
    const Param& w = n.params()[n.layout().hidden[0].weight];
    CHECK(w.fan_in == 100);
    CHECK(w.fan_out == 100);
    const auto v = w.value.data().storage();
    CHECK(v.size() == 10000);
    CHECK(sample_std(v) == doctest::Approx(std::sqrt(2.0 / 200)).epsilon(0.1));
    for (const Param& p : n.params())
      if (p.role == ParamRole::kBias) CHECK(std::all_of(p.value.data().storage().begin(), p.value.data().storage().end(), [](double b) { return b == 0.0; }));
  }
  SUBCASE("kaiming normal, fan_in = 50") {
    DetectorNet n = build_network(50, c, 0);
    init_params(n, Initialization::kKaimingNormal, 5);
    // first layer is 50 x 100: 5000 draws
    const auto v = n.params()[n.layout().hidden[0].weight].value.data().storage();
    CHECK(sample_std(v) == doctest::Approx(0.2).epsilon(0.1));
  }
  SUBCASE("default uniform bound") {
    DetectorNet n = build_network(30, c, 0);
    init_params(n, Initialization::kDefault, 5);
    for (const Param& p : n.params()) {
      if (p.role != ParamRole::kWeight && p.role != ParamRole::kBias) continue;
      const double bound = 1.0 / std::sqrt(static_cast<double>(p.fan_in));
      for (double v : p.value.data().storage()) CHECK(std::abs(v) <= bound);
    }
  }
}

TEST_CASE("architecture gradients match central differences") {
  for (Architecture a : kAll) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto res = anomgym::testing::architecture_gradcheck(a, s);
      INFO(static_cast<int>(a) << " seed " << s << " " << res.worst);
      CHECK(res.ok());
    }
  }
}

TEST_CASE("resnet with zeroed blocks is affine in its input") {
  PipelineConfig c = with_arch(Architecture::kResnet);
  for (std::size_t h = 0; h < 3; ++h) {
    c.set(Dimension::kHiddenLayers, h);
    DetectorNet n = build_network(6, c, 2);
    for (const Affine& blk : n.layout().hidden) {
      n.params()[blk.weight].value.mutable_data().fill(0.0);
      n.params()[blk.bias].value.mutable_data().fill(0.0);
    }
    Rng rng(h);
    const Matrix a = anomgym::testing::random_matrix(1, 6, rng);
    const Matrix b = anomgym::testing::random_matrix(1, 6, rng);
    Matrix sum(1, 6), zero(1, 6);
    for (std::size_t j = 0; j < 6; ++j) sum(0, j) = a(0, j) + b(0, j);
    const double lhs = n.score(sum)[0] - n.score(b)[0];
    const double rhs = n.score(a)[0] - n.score(zero)[0];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("eval mode ignores dropout, train mode does not") {
  PipelineConfig c = with_arch(Architecture::kMlp);
  c.set(Dimension::kDropout, 2);
  const DetectorNet n = build_network(4, c, 0);
  Rng rng(0);
  const auto x = grad::constant(anomgym::testing::random_matrix(16, 4, rng));
  Rng r1(1), r2(2);
  CHECK(n.forward(x, false, r1).data().storage() == n.forward(x, false, r2).data().storage());
  CHECK(n.forward(x, true, r1).data().storage() != n.forward(x, true, r2).data().storage());
}

TEST_CASE("pretraining") {
  Rng rng(4);
  const Matrix x = anomgym::testing::random_matrix(120, 5, rng);
  for (Architecture a : kAll) {
    CAPTURE(static_cast<int>(a));
    PipelineConfig c = with_arch(a);
    c.set(Dimension::kInitialization, 3);
    DetectorNet n1 = build_network(5, c, 9);
    DetectorNet n2 = build_network(5, c, 9);
    const auto head_before = n1.params()[n1.layout().head.weight].value.data().storage();
    const PretrainResult r1 = pretrain_encoder(n1, x, 20, 11);
    const PretrainResult r2 = pretrain_encoder(n2, x, 20, 11);
    CHECK(r1.final_loss <= r1.initial_loss);
    CHECK(r1.history.size() == 20);
    CHECK(n1.to_json() == n2.to_json());
    CHECK(r1.final_loss == r2.final_loss);
    CHECK(n1.params()[n1.layout().head.weight].value.data().storage() == head_before);
  }
  SUBCASE("constant feature reconstructs exactly") {
    PipelineConfig c = with_arch(Architecture::kMlp);
    c.set(Dimension::kHiddenLayers, 0).set(Dimension::kDropout, 0);
    DetectorNet n = build_network(1, c, 0);
    const PretrainResult r = pretrain_encoder(n, Matrix(1280, 1, 0.5), 100, 0);
    CHECK(r.final_loss < 1e-6);
  }
}
