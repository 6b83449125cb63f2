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

#include <queue>
#include <unordered_set>
#include <vector>

#include "mgclp/evaluator.hpp"
#include "mgclp/instance.hpp"

namespace mgclp {

// Set of objective values already visited, on a 1e-12 grid. Shared across
// local-search runs so repeated searches stop on previously seen values.
class ValueMemo {
 public:
  bool contains(double v) const { return seen_.count(key(v)) != 0; }

  // True when the value was new.
  bool insert(double v) { return seen_.insert(key(v)).second; }

 private:
  static long long key(double v) { return std::llround(v * 1e12); }

  std::unordered_set<long long> seen_;
};

struct GreedyResult {
  OpenPlan plan;
  std::vector<int> order;        // locations in the order they were added
  std::vector<double> step_values;  // objective after each addition

  double value() const { return step_values.empty() ? 0.0 : step_values.back(); }
};

// Greedy construction of a K-facility plan with lazy gain evaluation.
// Cached gains only shrink as the plan grows, so an entry whose cached gain
// is current at the top of the queue is the true argmax. Ties pick the
// smallest location, which makes the result identical to the eager scan.
inline GreedyResult greedy_lazy(const Instance& inst) {
  struct Entry {
    double gain;
    int location;
    int stamp;
    bool operator<(const Entry& o) const {
      if (gain != o.gain) return gain < o.gain;
      return location > o.location;
    }
  };

  CoverageState state(inst);
  std::priority_queue<Entry> queue;
  for (int i = 0; i < inst.num_locations(); ++i)
    queue.push({marginal_gain(state, i), i, 0});

  GreedyResult res;
  for (int step = 0; step < inst.K; ++step) {
    for (;;) {
      Entry top = queue.top();
      queue.pop();
      if (top.stamp == step) {
        apply_add(state, top.location);
        res.order.push_back(top.location);
        res.step_values.push_back(state.value());
        queue.push({marginal_gain(state, top.location), top.location, step + 1});
        break;
      }
      top.gain = marginal_gain(state, top.location);
      top.stamp = step;
      queue.push(top);
    }
  }
  res.plan = state.plan();
  return res;
}

// One-swap descent over facility positions, last added first. Each pass
// replaces the first position whose best swap strictly improves the
// objective and then moves on within the same pass; passes repeat until no
// position improves. The memo cuts off runs that revisit a known value.
inline double local_search(const Instance& inst, std::vector<int>& seq,
                           ValueMemo& memo) {
  CoverageState full(inst);
  for (int loc : seq) apply_add(full, loc);
  double value = full.value();
  if (!memo.insert(value)) return value;

  bool improved = true;
  while (improved) {
    improved = false;
    for (int k = static_cast<int>(seq.size()) - 1; k >= 0; --k) {
      CoverageState base(inst);
      for (size_t idx = 0; idx < seq.size(); ++idx)
        if (static_cast<int>(idx) != k) apply_add(base, seq[idx]);
      for (int i = 0; i < inst.num_locations(); ++i) {
        const double cand = base.value() + marginal_gain(base, i);
        if (cand > value + kValueTol) {
          seq[k] = i;
          value = cand;
          improved = true;
          if (!memo.insert(value)) return value;
          break;
        }
      }
    }
  }
  return value;
}

// Rounds a fractional opening matrix (locations x copy positions) to a
// K-facility sequence. Each step scores location i by the LP weight of its
// next copy times the objective after adding it; when no score is positive
// the step falls back to the plain greedy choice. Ties pick the smallest
// location.
inline std::vector<int> fractional_rounding(const Instance& inst, const Matrix& x) {
  CoverageState state(inst);
  std::vector<int> seq;
  seq.reserve(inst.K);
  for (int step = 0; step < inst.K; ++step) {
    int best_loc = -1;
    double best_score = 0.0;
    int fallback_loc = 0;
    double fallback_total = -1.0;
    for (int i = 0; i < inst.num_locations(); ++i) {
      const int cnt = state.plan().count(i);
      const double weight = cnt < x.cols() ? x(i, cnt) : 0.0;
      const double total = state.value() + marginal_gain(state, i);
      if (weight * total > best_score) {
        best_score = weight * total;
        best_loc = i;
      }
      if (total > fallback_total) {
        fallback_total = total;
        fallback_loc = i;
      }
    }
    const int chosen = best_loc >= 0 ? best_loc : fallback_loc;
    apply_add(state, chosen);
    seq.push_back(chosen);
  }
  return seq;
}

struct HeuristicResult {
  double value = 0.0;
  std::vector<int> seq;
};

// Primal heuristic for fractional LP points: round, then polish with the
// one-swap descent under the shared memo.
inline HeuristicResult fractional_primal_heuristic(const Instance& inst,
                                                   const Matrix& x,
                                                   ValueMemo& memo) {
  HeuristicResult res;
  res.seq = fractional_rounding(inst, x);
  res.value = local_search(inst, res.seq, memo);
  return res;
}

inline OpenPlan plan_from_sequence(const std::vector<int>& seq) {
  OpenPlan plan;
  for (int loc : seq) plan.add(loc);
  return plan;
}

}  // namespace mgclp
