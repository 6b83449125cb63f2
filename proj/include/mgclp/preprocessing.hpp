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
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "mgclp/evaluator.hpp"
#include "mgclp/instance.hpp"

namespace mgclp {

// Per-location opening caps established before the tree search. A cap of 0
// removes the location entirely.
struct FixingMask {
  std::vector<int> max_copies;

  static FixingMask all_open(const Instance& inst) {
    FixingMask mask;
    mask.max_copies.assign(inst.num_locations(), inst.K);
    return mask;
  }

  bool removed(int i) const { return max_copies[i] == 0; }
};

// Removes every location whose coverage row is dominated by another row.
// Comparisons are exact; among identical rows the smallest index survives.
// Pairwise marking is safe because domination is transitive.
inline void dominance_filter(const Instance& inst, FixingMask& mask) {
  const int ni = inst.num_locations();
  const int nj = inst.num_customers();
  for (int i = 0; i < ni; ++i) {
    if (mask.removed(i)) continue;
    for (int d = 0; d < ni; ++d) {
      if (d == i) continue;
      bool geq = true;
      bool strict = false;
      for (int j = 0; j < nj; ++j) {
        if (inst.f(d, j) < inst.f(i, j)) {
          geq = false;
          break;
        }
        if (inst.f(d, j) > inst.f(i, j)) strict = true;
      }
      if (geq && (strict || d < i)) {
        mask.max_copies[i] = 0;
        break;
      }
    }
  }
}

// A location whose coverage row only holds 0s and 1s gains nothing from a
// second copy: the survival factor it multiplies in is already 0 or 1.
inline void binary_colocation_rule(const Instance& inst, FixingMask& mask) {
  const int ni = inst.num_locations();
  const int nj = inst.num_customers();
  for (int i = 0; i < ni; ++i) {
    bool binary = true;
    for (int j = 0; j < nj && binary; ++j)
      binary = inst.f(i, j) == 0.0 || inst.f(i, j) == 1.0;
    if (binary) mask.max_copies[i] = std::min(mask.max_copies[i], 1);
  }
}

// Prefix sums of all per-location copy gains, sorted descending. The l-th
// copy gain at a location is measured against l-1 copies of that location
// alone, which by diminishing returns bounds its gain in any plan. The sum
// of the kprime largest gains therefore bounds any kprime-facility value,
// and restricting to copy indices <= kprime never changes the prefix sum
// because a selected l-th copy drags along all earlier copies.
struct CopyGainTable {
  std::vector<double> prefix;  // prefix[k] bounds plans of k facilities
};

inline CopyGainTable make_copy_gain_table(const Instance& inst) {
  std::vector<double> gains;
  gains.reserve(static_cast<size_t>(inst.num_locations()) * inst.K);
  for (int i = 0; i < inst.num_locations(); ++i) {
    CoverageState state(inst);
    for (int l = 0; l < inst.K; ++l) {
      gains.push_back(marginal_gain(state, i));
      apply_add(state, i);
    }
  }
  std::sort(gains.begin(), gains.end(), std::greater<>());
  CopyGainTable table;
  table.prefix.resize(gains.size() + 1, 0.0);
  for (size_t g = 0; g < gains.size(); ++g)
    table.prefix[g + 1] = table.prefix[g] + gains[g];
  return table;
}

// Upper bound on the best objective achievable with kprime facilities:
// the tighter of the greedy guarantee bound and the copy-gain prefix bound.
inline double upper_bound_kprime(const Instance& inst, int kprime,
                                 const std::vector<double>& greedy_steps,
                                 const CopyGainTable& table) {
  (void)inst;
  if (kprime <= 0) return 0.0;
  const double factor = 1.0 - 1.0 / std::exp(1.0);
  const double via_greedy = greedy_steps.at(kprime - 1) / factor;
  const double via_gains = table.prefix.at(kprime);
  return std::min(via_greedy, via_gains);
}

// Caps multiplicities: once k copies at one location plus the best possible
// completion with the remaining budget fall short of the incumbent, no
// optimal plan opens more than k-1 copies there. The shortfall must clear
// the comparison tolerance, otherwise roundoff could cap a plan that ties
// the incumbent exactly.
inline void colocation_position_bound(const Instance& inst, double incumbent,
                                      const std::function<double(int)>& ub_fn,
                                      FixingMask& mask) {
  for (int i = 0; i < inst.num_locations(); ++i) {
    if (mask.removed(i)) continue;
    CoverageState state(inst);
    for (int k = 1; k <= mask.max_copies[i]; ++k) {
      apply_add(state, i);
      if (state.value() + ub_fn(inst.K - k) < incumbent - kValueTol) {
        mask.max_copies[i] = k - 1;
        break;
      }
    }
  }
}

}  // namespace mgclp
