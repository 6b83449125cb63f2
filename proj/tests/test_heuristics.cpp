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

#include "mgclp/heuristics.hpp"

#include <catch2/catch.hpp>
#include <cmath>

#include "test_util.hpp"

using namespace mgclp;
using mgclp::testing::make_rng;
using mgclp::testing::objective_reference;
using mgclp::testing::random_instance;

namespace {

// Plain eager greedy: full rescan each step, smallest location on ties.
GreedyResult greedy_eager(const Instance& inst) {
  CoverageState state(inst);
  GreedyResult res;
  for (int step = 0; step < inst.K; ++step) {
    int best = 0;
    double best_gain = marginal_gain(state, 0);
    for (int i = 1; i < inst.num_locations(); ++i) {
      const double g = marginal_gain(state, i);
      if (g > best_gain) {
        best_gain = g;
        best = i;
      }
    }
    apply_add(state, best);
    res.order.push_back(best);
    res.step_values.push_back(state.value());
  }
  res.plan = state.plan();
  return res;
}

Instance two_locations(double weak, double strong, int K, double theta) {
  Instance inst;
  inst.f = Matrix(2, 1);
  inst.f(0, 0) = weak;
  inst.f(1, 0) = strong;
  inst.w = {1.0};
  inst.K = K;
  inst.theta = theta;
  return inst;
}

}  // namespace

TEST_CASE("value memo collapses values on its grid", "[heuristics]") {
  ValueMemo memo;
  CHECK_FALSE(memo.contains(1.25));
  CHECK(memo.insert(1.25));
  CHECK(memo.contains(1.25));
  CHECK_FALSE(memo.insert(1.25));
  CHECK_FALSE(memo.insert(1.25 + 1e-14));
  CHECK(memo.insert(1.25 + 1e-9));
}

TEST_CASE("greedy picks the strongest singleton first", "[heuristics]") {
  Instance inst;
  inst.f = Matrix(3, 2);
  inst.f(0, 0) = 0.4;
  inst.f(1, 0) = 0.9;
  inst.f(1, 1) = 0.2;
  inst.f(2, 1) = 0.8;
  inst.w = {1.0, 1.0};
  inst.K = 2;
  inst.theta = 0.5;
  const GreedyResult res = greedy_lazy(inst);
  REQUIRE(res.order.size() == 2);
  CHECK(res.order[0] == 1);
  CHECK(res.order[1] == 2);
}

TEST_CASE("greedy breaks gain ties toward the smaller location", "[heuristics]") {
  Instance inst;
  inst.f = Matrix(2, 1, 0.5);
  inst.w = {1.0};
  inst.K = 2;
  inst.theta = 0.0;
  const GreedyResult res = greedy_lazy(inst);
  CHECK(res.plan.count(0) == 2);
  CHECK(res.value() == Approx(0.75).margin(1e-12));
}

TEST_CASE("greedy keeps selecting once everything is covered", "[heuristics]") {
  Instance inst;
  inst.f = Matrix(2, 1);
  inst.f(0, 0) = 1.0;
  inst.f(1, 0) = 1.0;
  inst.w = {1.0};
  inst.K = 3;
  inst.theta = 1.0;
  const GreedyResult res = greedy_lazy(inst);
  CHECK(res.plan.total == 3);
  CHECK(res.order[0] == 0);
  CHECK(res.value() == Approx(1.0).margin(1e-12));
}

TEST_CASE("lazy greedy equals the eager rescan", "[heuristics]") {
  std::mt19937 rng = make_rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance inst = random_instance(rng, 10, 8, 5);
    const GreedyResult lazy = greedy_lazy(inst);
    const GreedyResult eager = greedy_eager(inst);
    CHECK(lazy.order == eager.order);
    REQUIRE(lazy.step_values.size() == eager.step_values.size());
    for (size_t s = 0; s < lazy.step_values.size(); ++s)
      CHECK(lazy.step_values[s] == Approx(eager.step_values[s]).margin(1e-12));
  }
}

TEST_CASE("greedy step values are consistent and nondecreasing", "[heuristics]") {
  std::mt19937 rng = make_rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = random_instance(rng);
    const GreedyResult res = greedy_lazy(inst);
    REQUIRE(static_cast<int>(res.step_values.size()) == inst.K);
    REQUIRE(res.plan.total == inst.K);
    double prev = 0.0;
    for (double v : res.step_values) {
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
    CHECK(res.value() ==
          Approx(objective_reference(inst, res.plan.counts)).margin(1e-10));
  }
}

TEST_CASE("greedy reaches the constant-factor guarantee", "[heuristics]") {
  std::mt19937 rng = make_rng(23);
  const double factor = 1.0 - 1.0 / std::exp(1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = random_instance(rng, 7, 7, 3);
    const GreedyResult res = greedy_lazy(inst);
    const double opt = brute_force_opt(inst).value;
    CHECK(res.value() >= factor * opt - 1e-9);
  }
}

TEST_CASE("local search repairs a poor starting plan", "[heuristics]") {
  const Instance inst = two_locations(0.1, 0.9, 1, 1.0);
  std::vector<int> seq = {0};
  ValueMemo memo;
  const double value = local_search(inst, seq, memo);
  CHECK(value == Approx(0.9).margin(1e-12));
  CHECK(seq == std::vector<int>{1});
}

TEST_CASE("local search returns immediately on a memoized start", "[heuristics]") {
  const Instance inst = two_locations(0.1, 0.9, 1, 1.0);
  std::vector<int> seq = {0};
  ValueMemo memo;
  memo.insert(objective(inst, plan_from_sequence(seq)));
  const double value = local_search(inst, seq, memo);
  CHECK(value == Approx(0.1).margin(1e-12));
  CHECK(seq == std::vector<int>{0});
}

TEST_CASE("local search stops a run that hits a memoized value", "[heuristics]") {
  Instance inst;
  inst.f = Matrix(3, 1);
  inst.f(0, 0) = 0.1;
  inst.f(1, 0) = 0.5;
  inst.f(2, 0) = 0.9;
  inst.w = {1.0};
  inst.K = 1;
  inst.theta = 1.0;
  std::vector<int> seq = {0};
  ValueMemo memo;
  memo.insert(0.5);
  const double value = local_search(inst, seq, memo);
  CHECK(value == Approx(0.5).margin(1e-12));
  CHECK(seq == std::vector<int>{1});
}

TEST_CASE("local search never loses value and terminates", "[heuristics]") {
  std::mt19937 rng = make_rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = random_instance(rng);
    std::uniform_int_distribution<int> loc(0, inst.num_locations() - 1);
    std::vector<int> seq;
    for (int t = 0; t < inst.K; ++t) seq.push_back(loc(rng));
    const double start = objective(inst, plan_from_sequence(seq));
    ValueMemo memo;
    const double value = local_search(inst, seq, memo);
    CHECK(value >= start - 1e-12);
    CHECK(value ==
          Approx(objective(inst, plan_from_sequence(seq))).margin(1e-10));
    CHECK(value <= brute_force_opt(inst).value + 1e-9);
  }
}

TEST_CASE("greedy plus local search stays within the exact optimum", "[heuristics]") {
  std::mt19937 rng = make_rng(25);
  for (int trial = 0; trial < 60; ++trial) {
    const Instance inst = random_instance(rng, 7, 7, 3);
    GreedyResult greedy = greedy_lazy(inst);
    std::vector<int> seq = greedy.order;
    ValueMemo memo;
    const double value = local_search(inst, seq, memo);
    CHECK(value >= greedy.value() - 1e-12);
    CHECK(value <= brute_force_opt(inst).value + 1e-9);
  }
}

TEST_CASE("fractional rounding follows the opening weights", "[heuristics]") {
  const Instance inst = two_locations(0.3, 0.9, 2, 0.0);
  Matrix x(2, 2);
  x(0, 0) = 1.0;
  x(0, 1) = 1.0;
  const std::vector<int> seq = fractional_rounding(inst, x);
  CHECK(seq == std::vector<int>{0, 0});
}

TEST_CASE("fractional rounding falls back to greedy on zero weights", "[heuristics]") {
  std::mt19937 rng = make_rng(26);
  for (int trial = 0; trial < 40; ++trial) {
    const Instance inst = random_instance(rng);
    const Matrix x(inst.num_locations(), inst.K);
    const std::vector<int> seq = fractional_rounding(inst, x);
    CHECK(seq == greedy_lazy(inst).order);
  }
}

TEST_CASE("fractional rounding skips zero-weight locations when scores exist",
          "[heuristics]") {
  const Instance inst = two_locations(0.3, 0.9, 1, 0.5);
  Matrix x(2, 1);
  x(0, 0) = 0.4;
  const std::vector<int> seq = fractional_rounding(inst, x);
  CHECK(seq == std::vector<int>{0});
}

TEST_CASE("the rounding heuristic ends at least as good as its rounding",
          "[heuristics]") {
  std::mt19937 rng = make_rng(27);
  for (int trial = 0; trial < 60; ++trial) {
    const Instance inst = random_instance(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix x(inst.num_locations(), inst.K);
    for (int i = 0; i < x.rows(); ++i)
      for (int k = 0; k < x.cols(); ++k) x(i, k) = unit(rng);
    ValueMemo memo;
    const HeuristicResult res = fractional_primal_heuristic(inst, x, memo);
    const double rounded =
        objective(inst, plan_from_sequence(fractional_rounding(inst, x)));
    CHECK(res.value >= rounded - 1e-12);
    CHECK(res.value ==
          Approx(objective(inst, plan_from_sequence(res.seq))).margin(1e-10));
  }
}
