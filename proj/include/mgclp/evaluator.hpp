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

#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "mgclp/errors.hpp"
#include "mgclp/instance.hpp"

namespace mgclp {

// Absolute tolerance for objective-value comparisons.
constexpr double kValueTol = 1e-9;

// A multiset of opened facility locations. Co-location is represented as a
// multiplicity per location; copy positions only exist at the LP layer.
struct OpenPlan {
  std::map<int, int> counts;
  int total = 0;

  void add(int location, int times = 1) {
    counts[location] += times;
    total += times;
  }

  int count(int location) const {
    auto it = counts.find(location);
    return it == counts.end() ? 0 : it->second;
  }

  bool empty() const { return total == 0; }

  // Expanded location sequence in ascending order, repeats included.
  std::vector<int> sorted_sequence() const {
    std::vector<int> seq;
    seq.reserve(total);
    for (const auto& [loc, c] : counts)
      for (int t = 0; t < c; ++t) seq.push_back(loc);
    return seq;
  }

  // Number of locations hosting two or more facilities.
  int num_colocated() const {
    int n = 0;
    for (const auto& [loc, c] : counts)
      if (c >= 2) ++n;
    return n;
  }

  // Largest multiplicity at a single location (0 for the empty plan).
  int max_multiplicity() const {
    int m = 0;
    for (const auto& [loc, c] : counts) m = std::max(m, c);
    return m;
  }

  bool operator==(const OpenPlan& other) const { return counts == other.counts; }
};

// Joint coverage of one customer by a collection of facilities with the given
// coverage fractions: theta * max + (1 - theta) * (1 - prod(1 - f)).
inline double jcf_value(double theta, std::span<const double> coverages) {
  if (coverages.empty()) return 0.0;
  double best = 0.0;
  double surv = 1.0;
  for (double f : coverages) {
    best = std::max(best, f);
    surv *= 1.0 - f;
  }
  return theta * best + (1.0 - theta) * (1.0 - surv);
}

// Running per-customer coverage aggregates for a plan under construction.
// Keeps the current max coverage and the survival product prod(1 - f), which
// make marginal gains an O(|J|) scan. Single-owner mutable; copy to probe.
class CoverageState {
 public:
  explicit CoverageState(const Instance& inst)
      : inst_(&inst),
        best_(inst.num_customers(), 0.0),
        surv_(inst.num_customers(), 1.0) {}

  const Instance& instance() const { return *inst_; }
  const OpenPlan& plan() const { return plan_; }
  double value() const { return value_; }
  double best(int j) const { return best_[j]; }
  double survival(int j) const { return surv_[j]; }

  friend double marginal_gain(const CoverageState& state, int location);
  friend void apply_add(CoverageState& state, int location);

 private:
  const Instance* inst_;
  std::vector<double> best_;
  std::vector<double> surv_;
  OpenPlan plan_;
  double value_ = 0.0;
};

// W(theta, plan + {location}) - W(theta, plan), without rebuilding.
inline double marginal_gain(const CoverageState& state, int location) {
  const Instance& inst = *state.inst_;
  const double theta = inst.theta;
  const int nj = inst.num_customers();
  double gain = 0.0;
  for (int j = 0; j < nj; ++j) {
    const double f = inst.f(location, j);
    const double max_up = std::max(0.0, f - state.best_[j]);
    const double prod_up = state.surv_[j] * f;
    gain += inst.w[j] * (theta * max_up + (1.0 - theta) * prod_up);
  }
  return gain;
}

// Opens one more facility copy at the given location.
inline void apply_add(CoverageState& state, int location) {
  const Instance& inst = *state.inst_;
  state.value_ += marginal_gain(state, location);
  const int nj = inst.num_customers();
  for (int j = 0; j < nj; ++j) {
    const double f = inst.f(location, j);
    state.best_[j] = std::max(state.best_[j], f);
    state.surv_[j] *= 1.0 - f;
  }
  state.plan_.add(location);
}

inline CoverageState make_state(const Instance& inst, const OpenPlan& plan) {
  CoverageState state(inst);
  for (const auto& [loc, c] : plan.counts)
    for (int t = 0; t < c; ++t) apply_add(state, loc);
  return state;
}

// W(theta, plan): weighted sum of per-customer joint coverage. Co-located
// copies contribute one survival factor each and leave the max part alone.
inline double objective(const Instance& inst, const OpenPlan& plan) {
  return make_state(inst, plan).value();
}

struct BruteForceResult {
  double value = 0.0;
  OpenPlan plan;
};

namespace detail {

inline void brute_force_rec(const CoverageState& state, int min_location,
                            BruteForceResult& best) {
  const Instance& inst = state.instance();
  if (state.plan().total >= inst.K) return;
  for (int i = min_location; i < inst.num_locations(); ++i) {
    CoverageState next = state;
    apply_add(next, i);
    if (next.value() > best.value) {
      best.value = next.value();
      best.plan = next.plan();
    }
    brute_force_rec(next, i, best);
  }
}

}  // namespace detail

// Exact optimum by enumerating every multiset of size <= K over the
// locations, in lexicographic order so ties resolve to the smallest plan.
// Guarded: refuses instances beyond |I| = 15 or K = 4.
inline BruteForceResult brute_force_opt(const Instance& inst) {
  if (inst.num_locations() > 15 || inst.K > 4)
    throw GuardError("brute force refused: requires |I| <= 15 and K <= 4");
  BruteForceResult best;  // empty plan, value 0
  CoverageState empty(inst);
  detail::brute_force_rec(empty, 0, best);
  return best;
}

}  // namespace mgclp
