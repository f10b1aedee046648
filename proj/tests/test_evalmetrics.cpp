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

#include "anomgym/error.hpp"
#include "anomgym/evalmetrics.hpp"
#include "metric_oracles.hpp"

using namespace anomgym;
using namespace anomgym::metrics;
using namespace anomgym::testing;

TEST_CASE("auc_roc examples") {
  CHECK(auc_roc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}) == 0.75);
  CHECK(auc_roc(std::vector<double>{0, 1, 2, 3}, std::vector<int>{0, 0, 1, 1}) == 1.0);
  CHECK(auc_roc(std::vector<double>(5, 2.0), std::vector<int>{0, 1, 0, 1, 0}) == 0.5);
  CHECK_THROWS_AS(auc_roc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), MetricError);
  CHECK_THROWS_AS(auc_roc(std::vector<double>{1, 2}, std::vector<int>{1}), MetricError);
}

TEST_CASE("auc_pr examples") {
  CHECK(auc_pr(std::vector<double>{0, 1, 2, 3}, std::vector<int>{0, 0, 1, 1}) == 1.0);
  CHECK(auc_pr(std::vector<double>{0.9, 0.1}, std::vector<int>{0, 1}) == 0.5);
  CHECK_THROWS_AS(auc_pr(std::vector<double>{1, 2}, std::vector<int>{0, 0}), MetricError);
}

TEST_CASE("metrics match brute-force oracles") {
  Rng rng(17);
  for (int t = 0; t < 300; ++t) {
    const auto inst = random_instance(rng);
    CHECK(std::abs(auc_roc(inst.scores, inst.labels) - pair_count_auc(inst)) <= 1e-12);
    CHECK(std::abs(auc_roc(inst.scores, inst.labels) - trapezoid_auc(inst)) <= 1e-12);
    CHECK(std::abs(auc_pr(inst.scores, inst.labels) - enumerated_ap(inst)) <= 1e-12);
  }
}

TEST_CASE("auc_roc is invariant to strictly increasing transforms") {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto inst = random_instance(rng);
    std::vector<double> warped;
    for (double s : inst.scores) warped.push_back(std::exp(3 * s) - 7);
    CHECK(auc_roc(warped, inst.labels) == auc_roc(inst.scores, inst.labels));
  }
}

TEST_CASE("auc_pr of random scores approaches the prevalence") {
  Rng rng(8);
  const std::size_t n = 4000, anomalies = 400;
  double total = 0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> s(n);
    std::vector<int> y(n, 0);
    for (std::size_t i = 0; i < n; ++i) s[i] = uniform01(rng), y[i] = i < anomalies;
    total += auc_pr(s, y);
  }
  CHECK(std::abs(total / trials - 0.1) < 0.1 * 0.1);
}

TEST_CASE("rank_normalize examples") {
  const auto r = rank_normalize(std::vector<double>{0.9, 0.7, 0.8});
  CHECK(r[0] == doctest::Approx(1.0 / 3));
  CHECK(r[1] == 1.0);
  CHECK(r[2] == doctest::Approx(2.0 / 3));
  CHECK(rank_normalize(std::vector<double>{0.5, 0.5}) == std::vector<double>{0.75, 0.75});
  CHECK(rank_normalize(std::vector<double>{0.9, 0.0}, std::vector<std::uint8_t>{0, 1}) ==
        std::vector<double>{0.5, 1.0});
  CHECK(rank_normalize(std::vector<double>{0.3, 0.9, 0.5, 0.1}, std::vector<std::uint8_t>{0, 0, 1, 0}) ==
        std::vector<double>{0.5, 0.25, 1.0, 0.75});
  CHECK_THROWS_AS(rank_normalize(std::vector<double>{0.2, 0.3}, std::vector<std::uint8_t>{1, 1}),
                  ContractError);
}

TEST_CASE("inverse_rank_metric examples") {
  const auto v = inverse_rank_metric(std::vector<double>{0.9, 0.7, 0.8});
  CHECK(v[0] == doctest::Approx(2.0 / 3));
  CHECK(v[1] == 0.0);
  CHECK(v[2] == doctest::Approx(1.0 / 3));
  const auto flat = inverse_rank_metric(std::vector<double>(4, 0.6));
  CHECK(std::adjacent_find(flat.begin(), flat.end(), std::not_equal_to<>()) == flat.end());
}

TEST_CASE("rank contract on random rows") {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto row = random_rank_row(rng);
    CHECK(rank_row_violation(row.raw, row.failed).empty());
  }
}

TEST_CASE("performance matrix") {
  PerformanceMatrix p({"a", "b"}, 3, 10);
  p.set(0, 0, 0.9);
  p.set(0, 1, 0.7);
  p.set_failed(0, 2);
  p.set(1, 0, 0.1);
  p.set(1, 1, 0.2);
  p.set(1, 2, 0.3);
  PerformanceMatrix q({"dead"}, 2, 5);
  q.set_failed(0, 0);
  q.set_failed(0, 1);
  q.compute_ranks();
  CHECK(q.rank.storage() == std::vector<double>{1.0, 1.0});
  p.compute_ranks();
  CHECK(p.rank(0, 0) == doctest::Approx(1.0 / 3));
  CHECK(p.rank(0, 1) == doctest::Approx(2.0 / 3));
  CHECK(p.rank(0, 2) == 1.0);
  CHECK(p.rank(1, 2) == doctest::Approx(1.0 / 3));
  CHECK(p.is_failed(0, 2));
  CHECK(p.row_index("b") == 1);
  CHECK_THROWS_AS(p.row_index("c"), ContractError);
}
