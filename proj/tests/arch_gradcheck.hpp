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
// Finite-difference check of a full detector network on a random small shape.

#pragma once

#include "anomgym/designspace.hpp"
#include "anomgym/netbuilder.hpp"
#include "test_support.hpp"

namespace anomgym::testing {

// Smooth activation and a replayed dropout mask keep the network differentiable
// along the finite-difference path.
inline GradCheckResult architecture_gradcheck(space::Architecture arch, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "arch", "gradcheck"));
  const std::size_t d = 2 + uniform_index(rng, 3);
  const std::size_t b = 3 + uniform_index(rng, 3);
  space::PipelineConfig cfg;
  cfg.set(space::Dimension::kArchitecture, static_cast<std::size_t>(arch))
      .set(space::Dimension::kActivation, 0)  // tanh
      .set(space::Dimension::kHiddenLayers, uniform_index(rng, 2))
      .set(space::Dimension::kDropout, uniform_index(rng, 3))
      .set(space::Dimension::kInitialization, uniform_index(rng, 3));
  net::DetectorNet net = net::build_network(d, cfg, seed);
  const grad::Value x = grad::constant(random_matrix(b, d, rng));
  const grad::Value w = grad::constant(random_matrix(b, 1, rng));
  const std::uint64_t mask_seed = rng();
  auto f = [&] {
    Rng mask(mask_seed);
    return grad::sum(grad::mul(net.forward(x, true, mask), w));
  };
  return check_gradients(f, net.parameter_values());
}

}  // namespace anomgym::testing
