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
#include <utility>
#include <vector>

#include "mgclp/errors.hpp"
#include "mgclp/evaluator.hpp"
#include "mgclp/instance.hpp"

namespace mgclp {

// Default violation threshold for separation.
constexpr double kCutTol = 1e-6;

// One opening variable: copy number `copy` (0-based) at a location.
struct VarIndex {
  int location = 0;
  int copy = 0;

  bool operator==(const VarIndex& o) const {
    return location == o.location && copy == o.copy;
  }
  bool operator<(const VarIndex& o) const {
    if (location != o.location) return location < o.location;
    return copy < o.copy;
  }
};

enum class CutFamily {
  total,          // bounds the whole-objective variable
  customer,       // bounds one customer's contribution
  customer_product,  // bounds one customer's product part
  customer_max,   // bounds one customer's max part via a coverage rank
};

// A linear bound  eta <= constant + sum coeff * x  on one objective variable.
// `customer` is -1 for the total family. All coefficients are nonnegative.
struct Cut {
  CutFamily family = CutFamily::total;
  int customer = -1;
  double constant = 0.0;
  std::vector<std::pair<VarIndex, double>> coeffs;

  double rhs_at(const Matrix& x) const {
    double v = constant;
    for (const auto& [var, c] : coeffs)
      v += c * x(var.location, var.copy);
    return v;
  }
};

namespace detail {

// Appends coefficients c for every copy slot of `location` still closed in
// `plan`, skipping negligible values to keep rows sparse.
inline void push_open_slots(std::vector<std::pair<VarIndex, double>>& coeffs,
                            int location, int from_copy, int max_copy,
                            double c) {
  if (c <= 0.0) return;
  for (int k = from_copy; k < max_copy; ++k)
    coeffs.push_back({{location, k}, c});
}

}  // namespace detail

// Subadditive bound built at the given plan: the plan's own contribution
// plus, for each closed copy slot, the slot's marginal gain at the plan.
// Structure shared by the total, customer and customer_product families;
// they differ only in which component of the objective they measure.
inline Cut scut_coefficients(const Instance& inst, const OpenPlan& plan,
                             CutFamily family, int customer = -1) {
  const CoverageState state = make_state(inst, plan);
  const double theta = inst.theta;
  Cut cut;
  cut.family = family;
  cut.customer = customer;

  switch (family) {
    case CutFamily::total: {
      cut.customer = -1;
      cut.constant = state.value();
      for (int i = 0; i < inst.num_locations(); ++i)
        detail::push_open_slots(cut.coeffs, i, plan.count(i), inst.K,
                                marginal_gain(state, i));
      break;
    }
    case CutFamily::customer: {
      const int j = customer;
      const double wj = inst.w[j];
      const double covered = plan.empty()
                                 ? 0.0
                                 : theta * state.best(j) +
                                       (1.0 - theta) * (1.0 - state.survival(j));
      cut.constant = wj * covered;
      for (int i = 0; i < inst.num_locations(); ++i) {
        const double f = inst.f(i, j);
        const double gain =
            theta * std::max(0.0, f - state.best(j)) +
            (1.0 - theta) * state.survival(j) * f;
        detail::push_open_slots(cut.coeffs, i, plan.count(i), inst.K, wj * gain);
      }
      break;
    }
    case CutFamily::customer_product: {
      const int j = customer;
      const double scale = (1.0 - theta) * inst.w[j];
      cut.constant = plan.empty() ? 0.0 : scale * (1.0 - state.survival(j));
      for (int i = 0; i < inst.num_locations(); ++i)
        detail::push_open_slots(cut.coeffs, i, plan.count(i), inst.K,
                                scale * state.survival(j) * inst.f(i, j));
      break;
    }
    case CutFamily::customer_max:
      throw ParameterError("max-part cuts are built per coverage rank");
  }
  return cut;
}

// Bound on a customer's max part anchored at coverage rank r: with fewer
// than r first copies open somewhere, the threshold value t (the r-th
// smallest coverage of customer j) already caps the max; each first-copy
// variable lifts the cap by its coverage excess over t. Only first copies
// carry coefficients. Rank 0 uses threshold 0.
inline Cut max_cut_coefficients(const Instance& inst, int customer, int rank) {
  const int ni = inst.num_locations();
  if (rank < 0 || rank >= ni) throw ParameterError("coverage rank out of range");
  std::vector<double> sorted(ni);
  for (int i = 0; i < ni; ++i) sorted[i] = inst.f(i, customer);
  std::sort(sorted.begin(), sorted.end());
  const double t = rank == 0 ? 0.0 : sorted[rank - 1];

  Cut cut;
  cut.family = CutFamily::customer_max;
  cut.customer = customer;
  const double scale = inst.theta * inst.w[customer];
  cut.constant = scale * t;
  for (int i = 0; i < ni; ++i) {
    const double c = scale * (inst.f(i, customer) - t);
    if (c > 0.0) cut.coeffs.push_back({{i, 0}, c});
  }
  return cut;
}

// Coverage values of one customer sorted ascending, reused across rank
// searches during separation.
struct MaxCutContext {
  std::vector<std::vector<double>> sorted_f;  // per customer, ascending

  static MaxCutContext build(const Instance& inst) {
    MaxCutContext ctx;
    ctx.sorted_f.resize(inst.num_customers());
    for (int j = 0; j < inst.num_customers(); ++j) {
      auto& v = ctx.sorted_f[j];
      v.resize(inst.num_locations());
      for (int i = 0; i < inst.num_locations(); ++i) v[i] = inst.f(i, j);
      std::sort(v.begin(), v.end());
    }
    return ctx;
  }
};

// Rank whose max-part bound is lowest at the given first-copy values. The
// right-hand side as a function of the rank threshold t is
// scale * (t + sum_i max(0, f_ij - t) * x_i), evaluated at each candidate
// threshold in one descending sweep.
inline int most_violated_max_rank(const Instance& inst, int customer,
                                  const Matrix& x, const MaxCutContext& ctx) {
  const int ni = inst.num_locations();
  const auto& asc = ctx.sorted_f[customer];

  std::vector<std::pair<double, double>> desc(ni);  // coverage, x weight
  for (int i = 0; i < ni; ++i) desc[i] = {inst.f(i, customer), x(i, 0)};
  std::sort(desc.begin(), desc.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  int best_rank = 0;
  double best_rhs = kInfinity;
  double excess_sum = 0.0;  // sum of (f - t) x over f > t
  double weight_sum = 0.0;  // sum of x over f > t
  int d = 0;                // entries of desc with coverage > current t
  for (int rank = ni - 1; rank >= 0; --rank) {
    const double t = rank == 0 ? 0.0 : asc[rank - 1];
    while (d < ni && desc[d].first > t) {
      excess_sum += desc[d].first * desc[d].second;
      weight_sum += desc[d].second;
      ++d;
    }
    const double rhs = t + (excess_sum - t * weight_sum);
    if (rhs < best_rhs - 1e-15) {
      best_rhs = rhs;
      best_rank = rank;
    }
  }
  return best_rank;
}

// Values of one LP relaxation point, keyed the way separation reads them.
struct RelaxationPoint {
  Matrix x;                        // locations x copy positions
  double eta_total = 0.0;          // whole-objective variable
  std::vector<double> eta_customer;  // per-customer variable
  std::vector<double> eta_product;   // per-customer product part
  std::vector<double> eta_max;       // per-customer max part
};

enum class Formulation { F1, F2, F3, F4 };

namespace detail {

inline OpenPlan plan_from_rounding(const Matrix& x) {
  OpenPlan plan;
  for (int i = 0; i < x.rows(); ++i) {
    int c = 0;
    for (int k = 0; k < x.cols(); ++k)
      if (x(i, k) > 0.5) ++c;
    if (c > 0) plan.add(i, c);
  }
  return plan;
}

inline double eta_of(const RelaxationPoint& point, const Cut& cut) {
  switch (cut.family) {
    case CutFamily::total:
      return point.eta_total;
    case CutFamily::customer:
      return point.eta_customer[cut.customer];
    case CutFamily::customer_product:
      return point.eta_product[cut.customer];
    case CutFamily::customer_max:
      return point.eta_max[cut.customer];
  }
  return 0.0;
}

inline OpenPlan plan_from_largest(const Matrix& x, int K) {
  struct Slot {
    double value;
    int location;
    int copy;
  };
  std::vector<Slot> slots;
  slots.reserve(static_cast<size_t>(x.rows()) * x.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int k = 0; k < x.cols(); ++k) slots.push_back({x(i, k), i, k});
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.location != b.location) return a.location < b.location;
    return a.copy < b.copy;
  });
  OpenPlan plan;
  const int take = std::min<int>(K, static_cast<int>(slots.size()));
  for (int s = 0; s < take; ++s) plan.add(slots[s].location);
  return plan;
}

}  // namespace detail

// Exact separation at an integral point: rebuild the opened plan, compare
// each objective variable against its true component value, and emit the
// bound anchored at that plan when violated. At integral points these
// bounds are tight, so a clean pass certifies the LP value.
inline std::vector<Cut> separate_integer(const Instance& inst,
                                         const RelaxationPoint& point,
                                         Formulation form, double tol = kCutTol,
                                         const MaxCutContext* shared_ctx = nullptr) {
  const OpenPlan plan = detail::plan_from_rounding(point.x);
  const CoverageState state = make_state(inst, plan);
  const double theta = inst.theta;
  std::vector<Cut> cuts;

  switch (form) {
    case Formulation::F1: {
      if (point.eta_total > state.value() + tol)
        cuts.push_back(scut_coefficients(inst, plan, CutFamily::total));
      break;
    }
    case Formulation::F2: {
      for (int j = 0; j < inst.num_customers(); ++j) {
        const double covered =
            plan.empty() ? 0.0
                         : theta * state.best(j) +
                               (1.0 - theta) * (1.0 - state.survival(j));
        if (point.eta_customer[j] > inst.w[j] * covered + tol)
          cuts.push_back(scut_coefficients(inst, plan, CutFamily::customer, j));
      }
      break;
    }
    case Formulation::F3: {
      for (int j = 0; j < inst.num_customers(); ++j) {
        const double product =
            plan.empty() ? 0.0 : (1.0 - theta) * (1.0 - state.survival(j));
        if (point.eta_product[j] > inst.w[j] * product + tol)
          cuts.push_back(
              scut_coefficients(inst, plan, CutFamily::customer_product, j));
      }
      break;
    }
    case Formulation::F4: {
      MaxCutContext local;
      for (int j = 0; j < inst.num_customers(); ++j) {
        const double product =
            plan.empty() ? 0.0 : (1.0 - theta) * (1.0 - state.survival(j));
        if (point.eta_product[j] > inst.w[j] * product + tol)
          cuts.push_back(
              scut_coefficients(inst, plan, CutFamily::customer_product, j));
        const double max_part = theta * inst.w[j] * state.best(j);
        if (point.eta_max[j] > max_part + tol) {
          if (shared_ctx == nullptr && local.sorted_f.empty())
            local = MaxCutContext::build(inst);
          const MaxCutContext& ctx = shared_ctx ? *shared_ctx : local;
          cuts.push_back(max_cut_coefficients(
              inst, j, most_violated_max_rank(inst, j, point.x, ctx)));
        }
      }
      break;
    }
  }
  // At an integral point the component comparisons above are exactly the
  // row violations, because the anchored coefficients vanish there. At a
  // fractional point they can disagree, so keep only rows the point violates
  // as inequalities; returning satisfied rows would stall a cutting loop.
  std::vector<Cut> violated;
  violated.reserve(cuts.size());
  for (Cut& cut : cuts)
    if (detail::eta_of(point, cut) > cut.rhs_at(point.x) + tol)
      violated.push_back(std::move(cut));
  return violated;
}

// Heuristic separation at a fractional point: anchor the bounds at the plan
// formed by the K largest opening values (ties toward smaller location, then
// smaller copy) and keep the ones the point violates.
inline std::vector<Cut> separate_fractional(const Instance& inst,
                                            const RelaxationPoint& point,
                                            Formulation form, double tol = kCutTol,
                                            const MaxCutContext* shared_ctx = nullptr) {
  const OpenPlan plan = detail::plan_from_largest(point.x, inst.K);
  std::vector<Cut> cuts;

  auto keep_if_violated = [&](double eta, Cut cut) {
    if (eta > cut.rhs_at(point.x) + tol) cuts.push_back(std::move(cut));
  };

  switch (form) {
    case Formulation::F1:
      keep_if_violated(point.eta_total,
                       scut_coefficients(inst, plan, CutFamily::total));
      break;
    case Formulation::F2:
      for (int j = 0; j < inst.num_customers(); ++j)
        keep_if_violated(point.eta_customer[j],
                         scut_coefficients(inst, plan, CutFamily::customer, j));
      break;
    case Formulation::F3:
      for (int j = 0; j < inst.num_customers(); ++j)
        keep_if_violated(
            point.eta_product[j],
            scut_coefficients(inst, plan, CutFamily::customer_product, j));
      break;
    case Formulation::F4: {
      const MaxCutContext local =
          shared_ctx ? MaxCutContext{} : MaxCutContext::build(inst);
      const MaxCutContext& ctx = shared_ctx ? *shared_ctx : local;
      for (int j = 0; j < inst.num_customers(); ++j) {
        keep_if_violated(
            point.eta_product[j],
            scut_coefficients(inst, plan, CutFamily::customer_product, j));
        keep_if_violated(point.eta_max[j],
                         max_cut_coefficients(
                             inst, j, most_violated_max_rank(inst, j, point.x, ctx)));
      }
      break;
    }
  }
  return cuts;
}

}  // namespace mgclp
