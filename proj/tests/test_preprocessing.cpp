// Copyright 2026 The MGCLP Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mgclp/preprocessing.hpp"

#include <catch2/catch.hpp>

#include "mgclp/heuristics.hpp"
#include "test_util.hpp"

using namespace mgclp;
using mgclp::testing::brute_force_capped;
using mgclp::testing::make_rng;
using mgclp::testing::random_instance;

namespace {

Instance from_rows(const std::vector<std::vector<double>>& rows, int K,
                   double theta) {
  Instance inst;
  inst.f = Matrix(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      inst.f(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  inst.w.assign(rows[0].size(), 1.0);
  inst.K = K;
  inst.theta = theta;
  return inst;
}

}  // namespace

TEST_CASE("dominance removes strictly weaker rows", "[preprocessing]") {
  const Instance inst = from_rows({{0.9, 0.5}, {0.4, 0.5}, {0.4, 0.1}}, 2, 0.5);
  FixingMask mask = FixingMask::all_open(inst);
  dominance_filter(inst, mask);
  CHECK_FALSE(mask.removed(0));
  CHECK(mask.removed(1));
  CHECK(mask.removed(2));
}

TEST_CASE("dominance keeps the smallest index among identical rows", "[preprocessing]") {
  const Instance inst = from_rows({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}, 2, 0.5);
  FixingMask mask = FixingMask::all_open(inst);
  dominance_filter(inst, mask);
  CHECK_FALSE(mask.removed(0));
  CHECK(mask.removed(1));
  CHECK(mask.removed(2));
}

TEST_CASE("dominance compares exactly, with no tolerance", "[preprocessing]") {
  const Instance inst =
      from_rows({{0.5, 0.5}, {0.5 + 1e-12, 0.5 - 1e-12}}, 1, 0.5);
  FixingMask mask = FixingMask::all_open(inst);
  dominance_filter(inst, mask);
  CHECK_FALSE(mask.removed(0));
  CHECK_FALSE(mask.removed(1));
}

TEST_CASE("incomparable rows both survive", "[preprocessing]") {
  const Instance inst = from_rows({{0.9, 0.1}, {0.1, 0.9}}, 1, 0.5);
  FixingMask mask = FixingMask::all_open(inst);
  dominance_filter(inst, mask);
  CHECK_FALSE(mask.removed(0));
  CHECK_FALSE(mask.removed(1));
}

TEST_CASE("the binary rule caps only all-binary rows", "[preprocessing]") {
  const Instance inst = from_rows({{1.0, 0.0}, {1.0, 0.5}, {0.0, 0.0}}, 3, 0.2);
  FixingMask mask = FixingMask::all_open(inst);
  binary_colocation_rule(inst, mask);
  CHECK(mask.max_copies[0] == 1);
  CHECK(mask.max_copies[1] == 3);
  CHECK(mask.max_copies[2] == 1);
}

TEST_CASE("the binary rule never lifts an existing cap", "[preprocessing]") {
  const Instance inst = from_rows({{1.0, 0.0}}, 3, 0.2);
  FixingMask mask = FixingMask::all_open(inst);
  mask.max_copies[0] = 0;
  binary_colocation_rule(inst, mask);
  CHECK(mask.max_copies[0] == 0);
}

TEST_CASE("dominance and the binary rule preserve the optimum", "[preprocessing]") {
  std::mt19937 rng = make_rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = random_instance(rng, 6, 6, 3);
    FixingMask mask = FixingMask::all_open(inst);
    dominance_filter(inst, mask);
    binary_colocation_rule(inst, mask);
    const double capped = brute_force_capped(inst, mask.max_copies);
    const double opt = brute_force_opt(inst).value;
    CHECK(capped == Approx(opt).margin(1e-12));
  }
}

TEST_CASE("size-limited bounds start at zero and grow with the budget",
          "[preprocessing]") {
  std::mt19937 rng = make_rng(32);
  const Instance inst = random_instance(rng, 6, 6, 3);
  const GreedyResult greedy = greedy_lazy(inst);
  const CopyGainTable table = make_copy_gain_table(inst);
  CHECK(upper_bound_kprime(inst, 0, greedy.step_values, table) == 0.0);
  double prev = 0.0;
  for (int k = 1; k <= inst.K; ++k) {
    const double ub = upper_bound_kprime(inst, k, greedy.step_values, table);
    CHECK(ub >= prev - 1e-12);
    prev = ub;
  }
}

TEST_CASE("the single-facility bound is exact", "[preprocessing]") {
  std::mt19937 rng = make_rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = random_instance(rng, 6, 6, 3);
    const GreedyResult greedy = greedy_lazy(inst);
    const CopyGainTable table = make_copy_gain_table(inst);
    const double ub1 = upper_bound_kprime(inst, 1, greedy.step_values, table);
    Instance one = inst;
    one.K = 1;
    CHECK(ub1 == Approx(brute_force_opt(one).value).margin(1e-9));
  }
}

TEST_CASE("size-limited bounds dominate the exact size-limited optimum",
          "[preprocessing]") {
  std::mt19937 rng = make_rng(34);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = random_instance(rng, 6, 6, 3);
    const GreedyResult greedy = greedy_lazy(inst);
    const CopyGainTable table = make_copy_gain_table(inst);
    for (int k = 1; k <= inst.K; ++k) {
      Instance sub = inst;
      sub.K = k;
      const double opt_k = brute_force_opt(sub).value;
      CHECK(upper_bound_kprime(inst, k, greedy.step_values, table) >=
            opt_k - 1e-9);
    }
  }
}

TEST_CASE("position capping keeps every optimal plan reachable", "[preprocessing]") {
  std::mt19937 rng = make_rng(35);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = random_instance(rng, 6, 6, 3);
    const GreedyResult greedy = greedy_lazy(inst);
    const CopyGainTable table = make_copy_gain_table(inst);
    const auto ub_fn = [&](int kprime) {
      return upper_bound_kprime(inst, kprime, greedy.step_values, table);
    };
    FixingMask mask = FixingMask::all_open(inst);
    colocation_position_bound(inst, greedy.value(), ub_fn, mask);
    const double capped = brute_force_capped(inst, mask.max_copies);
    const double opt = brute_force_opt(inst).value;
    CHECK(capped == Approx(opt).margin(1e-12));
  }
}

TEST_CASE("the full preprocessing pipeline preserves the optimum", "[preprocessing]") {
  std::mt19937 rng = make_rng(36);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = random_instance(rng, 6, 6, 3);
    FixingMask mask = FixingMask::all_open(inst);
    binary_colocation_rule(inst, mask);
    dominance_filter(inst, mask);
    const GreedyResult greedy = greedy_lazy(inst);
    const CopyGainTable table = make_copy_gain_table(inst);
    const auto ub_fn = [&](int kprime) {
      return upper_bound_kprime(inst, kprime, greedy.step_values, table);
    };
    colocation_position_bound(inst, greedy.value(), ub_fn, mask);
    const double capped = brute_force_capped(inst, mask.max_copies);
    CHECK(capped == Approx(brute_force_opt(inst).value).margin(1e-12));
  }
}

TEST_CASE("position capping trims hopeless co-location under max-only blending",
          "[preprocessing]") {
  const Instance inst = from_rows({{0.5, 0.5}, {0.4, 0.4}}, 3, 1.0);
  const GreedyResult greedy = greedy_lazy(inst);
  REQUIRE(greedy.value() == Approx(1.0).margin(1e-12));
  const CopyGainTable table = make_copy_gain_table(inst);
  const auto ub_fn = [&](int kprime) {
    return upper_bound_kprime(inst, kprime, greedy.step_values, table);
  };
  FixingMask mask = FixingMask::all_open(inst);
  colocation_position_bound(inst, greedy.value(), ub_fn, mask);
  CHECK(mask.max_copies[0] == 3);
  CHECK(mask.max_copies[1] == 2);
  CHECK(brute_force_capped(inst, mask.max_copies) == Approx(1.0).margin(1e-12));
}
