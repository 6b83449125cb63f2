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
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mgclp/cuts.hpp"
#include "mgclp/errors.hpp"
#include "mgclp/evaluator.hpp"
#include "mgclp/heuristics.hpp"
#include "mgclp/instance.hpp"
#include "mgclp/lp.hpp"
#include "mgclp/preprocessing.hpp"
#include "mgclp/report.hpp"

namespace mgclp {

// Cumulative feature levels. Every level keeps exact separation of integral
// points; the later ones add fractional separation, the starting and primal
// heuristics, and finally preprocessing plus the empty-plan bound rows.
enum class SolveMode { basic, fractional, heuristic, full };

inline const char* to_string(SolveMode mode) {
  switch (mode) {
    case SolveMode::basic:
      return "b";
    case SolveMode::fractional:
      return "f";
    case SolveMode::heuristic:
      return "fh";
    case SolveMode::full:
      return "fhp";
  }
  return "?";
}

inline SolveMode parse_mode(const std::string& token) {
  if (token == "b") return SolveMode::basic;
  if (token == "f") return SolveMode::fractional;
  if (token == "fh") return SolveMode::heuristic;
  if (token == "fhp") return SolveMode::full;
  throw ParameterError("unknown mode '" + token + "', expected b, f, fh, or fhp");
}

inline Formulation parse_formulation(const std::string& token) {
  if (token == "f1" || token == "F1") return Formulation::F1;
  if (token == "f2" || token == "F2") return Formulation::F2;
  if (token == "f3" || token == "F3") return Formulation::F3;
  if (token == "f4" || token == "F4") return Formulation::F4;
  throw ParameterError("unknown formulation '" + token +
                       "', expected f1, f2, f3, or f4");
}

inline const char* to_string(Formulation form) {
  switch (form) {
    case Formulation::F1:
      return "f1";
    case Formulation::F2:
      return "f2";
    case Formulation::F3:
      return "f3";
    case Formulation::F4:
      return "f4";
  }
  return "?";
}

struct SolverConfig {
  Formulation formulation = Formulation::F4;
  SolveMode mode = SolveMode::full;
  double time_limit = 600.0;
  double violation_tol = kCutTol;  // fractional separation threshold
  double int_tol = 1e-6;           // integrality detection
  double opt_tol = 1e-6;           // relative optimality gap
  int heuristic_period = 10;       // primal heuristic every this many nodes
  std::size_t memory_limit = std::size_t{2} << 30;
  // Individual preprocessing switches, active only in the full mode, so the
  // effect of each reduction can be measured in isolation.
  bool dominance = true;        // drop dominated locations
  bool binary_rule = true;      // cap copies at one when doubling never helps
  bool position_caps = true;    // cap copies via the incumbent bound
  std::ostream* log = nullptr;
  LpOptions lp;
};

// Most fractional opening variable; ties toward smaller location, then copy.
inline VarIndex branch_select(const Matrix& x, double int_tol) {
  VarIndex pick{-1, -1};
  double best = 0.5;
  for (int i = 0; i < x.rows(); ++i)
    for (int k = 0; k < x.cols(); ++k) {
      const double frac = x(i, k) - std::floor(x(i, k));
      const double dist = std::min(frac, 1.0 - frac);
      if (dist <= int_tol) continue;
      const double off = std::abs(frac - 0.5);
      if (pick.location < 0 || off < best - 1e-12) {
        best = off;
        pick = {i, k};
      }
    }
  if (pick.location < 0)
    throw ValidationError("branch requested on an integral point");
  return pick;
}

namespace detail {

inline bool is_integral(const Matrix& x, double tol) {
  for (int i = 0; i < x.rows(); ++i)
    for (int k = 0; k < x.cols(); ++k) {
      const double frac = x(i, k) - std::floor(x(i, k));
      if (std::min(frac, 1.0 - frac) > tol) return false;
    }
  return true;
}

// Separation threshold for integral points. Kept far below the fractional
// threshold so that a clean pass certifies the node bound to within a few
// orders of magnitude under the pruning tolerance.
constexpr double kIntegerSeparationTol = 1e-9;

class TreeSolver {
 public:
  TreeSolver(const Instance& inst, const SolverConfig& cfg)
      : inst_(inst),
        cfg_(cfg),
        frac_sep_(cfg.mode != SolveMode::basic),
        heur_(cfg.mode == SolveMode::heuristic || cfg.mode == SolveMode::full),
        prep_(cfg.mode == SolveMode::full),
        mask_(FixingMask::all_open(inst)) {}

  SolveReport run() {
    start_ = Clock::now();
    report_.status = SolveStatus::optimal;

    if (inst_.K <= 0 || inst_.num_locations() == 0 ||
        inst_.num_customers() == 0) {
      finish(0.0);
      return report_;
    }

    if (heur_) run_starting_heuristic();
    if (prep_) run_preprocessing();

    // A plan worth the whole customer weight cannot be improved, so the
    // bound closes without touching the relaxation.
    if (incumbent_value_ >= inst_.total_weight() - kValueTol) {
      report_.ub_root = incumbent_value_;
      report_.t_root = elapsed();
      finish(incumbent_value_);
      return report_;
    }

    build_problem();
    const double root_bound = process_root();
    report_.ub_root = root_bound;
    report_.t_root = elapsed();
    open_bound_ = root_bound;
    if (prep_) apply_position_caps();

    if (!time_up_ && root_bound > prune_threshold()) {
      // The remaining work continues through the regular node machinery;
      // this continuation of the root is not counted as a tree node.
      queue_.push(Node{root_bound, next_seq_++, {}, sol_.basis, true});
      main_loop();
    }

    double ub = incumbent_value_;
    if (time_up_) {
      ub = std::max(ub, open_bound_);
      while (!queue_.empty()) {
        ub = std::max(ub, queue_.top().bound);
        queue_.pop();
      }
      report_.status = SolveStatus::time_limit;
    }
    finish(ub);
    return report_;
  }

 private:
  using Clock = std::chrono::steady_clock;

  struct Range {
    int location;
    int at_least;  // copies forced open
    int at_most;   // copies allowed
  };

  struct Node {
    double bound;
    long seq;
    std::vector<Range> ranges;
    Basis basis;
    bool root_continuation = false;
  };

  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound < b.bound;
      return a.seq > b.seq;
    }
  };

  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  bool out_of_time() {
    if (time_up_) return true;
    if (elapsed() >= cfg_.time_limit) time_up_ = true;
    return time_up_;
  }

  double prune_threshold() const {
    return incumbent_value_ +
           cfg_.opt_tol * std::max(1.0, std::abs(incumbent_value_));
  }

  void log_line(const std::string& text) {
    if (cfg_.log) *cfg_.log << text << '\n';
  }

  void set_incumbent(OpenPlan plan, double value) {
    if (value > incumbent_value_) {
      incumbent_value_ = value;
      incumbent_plan_ = std::move(plan);
    }
  }

  void run_starting_heuristic() {
    greedy_ = greedy_lazy(inst_);
    std::vector<int> seq = greedy_.order;
    const double value = local_search(inst_, seq, memo_);
    report_.z_heur = value;
    report_.t_heur = elapsed();
    set_incumbent(plan_from_sequence(seq), value);
  }

  void run_preprocessing() {
    if (cfg_.dominance) dominance_filter(inst_, mask_);
    if (cfg_.binary_rule) binary_colocation_rule(inst_, mask_);
    gains_ = make_copy_gain_table(inst_);
    apply_position_caps();
  }

  // Re-derives the per-location copy caps from the current incumbent. Safe
  // to repeat: caps only shrink as the incumbent grows.
  void apply_position_caps() {
    if (!cfg_.position_caps) return;
    const std::vector<double>& steps = greedy_.step_values;
    auto ub_fn = [&](int kprime) {
      return upper_bound_kprime(inst_, kprime, steps, gains_);
    };
    colocation_position_bound(inst_, incumbent_value_, ub_fn, mask_);
    if (!built_) return;
    for (int i = 0; i < inst_.num_locations(); ++i)
      for (int k = mask_.max_copies[i]; k < inst_.K; ++k) {
        root_ub_[p_.layout.x(i, k)] = 0.0;
        p_.model.cols[p_.layout.x(i, k)].ub = 0.0;
      }
  }

  void build_problem() {
    p_ = lp_build(inst_, cfg_.formulation, mask_, prep_);
    if (cfg_.formulation == Formulation::F4) ctx_ = MaxCutContext::build(inst_);
    built_ = true;
    root_ub_.resize(p_.model.cols.size());
    for (size_t c = 0; c < p_.model.cols.size(); ++c)
      root_ub_[c] = p_.model.cols[c].ub;
    row_entries_ = 0;
    for (const LpRow& row : p_.model.rows) row_entries_ += row.coeffs.size();
  }

  // Appends only rows the model has never seen. Separation can re-derive a
  // row whose tiny violation sits inside the LP feasibility tolerance;
  // re-adding it would loop forever without moving the bound. Keys rely on
  // cut construction being deterministic per anchor, so equal rows match
  // exactly. Returns the number of genuinely new rows.
  int add_cuts_tracked(const std::vector<Cut>& cuts) {
    std::vector<Cut> fresh;
    fresh.reserve(cuts.size());
    for (const Cut& cut : cuts) {
      std::vector<double> key;
      key.reserve(3 + 2 * cut.coeffs.size());
      key.push_back(static_cast<double>(static_cast<int>(cut.family)));
      key.push_back(static_cast<double>(cut.customer));
      key.push_back(cut.constant);
      for (const auto& [var, c] : cut.coeffs) {
        key.push_back(static_cast<double>(var.location * inst_.K + var.copy));
        key.push_back(c);
      }
      if (!seen_rows_.insert(std::move(key)).second) continue;
      row_entries_ += 2 * (cut.coeffs.size() + 1);
      fresh.push_back(cut);
    }
    if (fresh.empty()) return 0;
    check_memory();
    lp_add_cuts(p_, fresh);
    return static_cast<int>(fresh.size());
  }

  void check_memory() const {
    const std::size_t row_bytes = row_entries_ * 16;
    const std::size_t basis_bytes =
        queue_.size() * (p_.model.cols.size() + p_.model.rows.size() + 64);
    if (row_bytes + basis_bytes > cfg_.memory_limit)
      throw ResourceError("memory limit exceeded: " +
                          std::to_string(row_bytes + basis_bytes) + " bytes");
  }

  std::vector<Cut> separate(const RelaxationPoint& point, bool integral) {
    if (integral)
      return separate_integer(inst_, point, cfg_.formulation,
                              kIntegerSeparationTol, &ctx_);
    if (!frac_sep_) return {};
    return separate_fractional(inst_, point, cfg_.formulation,
                               cfg_.violation_tol, &ctx_);
  }

  void try_incumbent_from(const Matrix& x) {
    OpenPlan plan;
    for (int i = 0; i < x.rows(); ++i) {
      int copies = 0;
      for (int k = 0; k < x.cols(); ++k)
        if (x(i, k) > 0.5) ++copies;
      if (copies > 0) plan.add(i, copies);
    }
    const double value = objective(inst_, plan);
    set_incumbent(std::move(plan), value);
  }

  void run_primal_heuristic(const Matrix& x) {
    if (!heur_) return;
    HeuristicResult res = fractional_primal_heuristic(inst_, x, memo_);
    set_incumbent(plan_from_sequence(res.seq), res.value);
  }

  // Cut rounds at the root until separation is quiet or the bound stalls.
  double process_root() {
    sol_ = lp_solve(p_.model, nullptr, cfg_.lp);
    double bound = sol_.objective;
    for (int round = 0;; ++round) {
      if (out_of_time()) return bound;
      point_ = extract_point(p_, sol_, inst_);
      run_primal_heuristic(point_.x);
      const bool integral = is_integral(point_.x, cfg_.int_tol);
      if (integral) try_incumbent_from(point_.x);
      const std::vector<Cut> cuts = separate(point_, integral);
      if (cuts.empty()) return bound;
      if (add_cuts_tracked(cuts) == 0) return bound;
      sol_ = lp_solve(p_.model, &sol_.basis, cfg_.lp);
      const double next = std::min(bound, sol_.objective);
      log_line("root round " + std::to_string(round) + ": bound " +
               std::to_string(next) + ", incumbent " +
               std::to_string(incumbent_value_) + ", rows " +
               std::to_string(p_.model.rows.size()));
      const bool stalled = bound - next < 1e-7;
      bound = next;
      if (stalled) return bound;
    }
  }

  void apply_node_bounds(const Node& node) {
    for (int i = 0; i < inst_.num_locations(); ++i)
      for (int k = 0; k < inst_.K; ++k) {
        LpColumn& col = p_.model.cols[p_.layout.x(i, k)];
        col.lb = 0.0;
        col.ub = root_ub_[p_.layout.x(i, k)];
      }
    for (const Range& range : node.ranges) {
      for (int k = 0; k < range.at_least; ++k)
        p_.model.cols[p_.layout.x(range.location, k)].lb = 1.0;
      for (int k = range.at_most; k < inst_.K; ++k)
        p_.model.cols[p_.layout.x(range.location, k)].ub = 0.0;
    }
  }

  // Child creation around the most fractional opening variable, with the
  // copy-ordering cascade folded into per-location ranges.
  void branch_from_current(double bound) {
    const VarIndex var = branch_select(point_.x, cfg_.int_tol);
    std::vector<Range> base = current_ranges_;
    int lo = 0;
    int hi = std::min(inst_.K, mask_.max_copies[var.location]);
    size_t slot = base.size();
    for (size_t s = 0; s < base.size(); ++s)
      if (base[s].location == var.location) {
        lo = base[s].at_least;
        hi = base[s].at_most;
        slot = s;
      }
    if (slot == base.size()) base.push_back({var.location, lo, hi});

    int forced_elsewhere = 0;
    for (const Range& range : base)
      if (range.location != var.location) forced_elsewhere += range.at_least;

    // Closing the copy: the location keeps fewer copies than var.copy + 1.
    {
      std::vector<Range> ranges = base;
      ranges[slot].at_most = var.copy;
      push_node(bound, std::move(ranges));
    }
    // Opening the copy forces all earlier copies open too.
    if (forced_elsewhere + var.copy + 1 <= inst_.K) {
      std::vector<Range> ranges = base;
      ranges[slot].at_least = var.copy + 1;
      push_node(bound, std::move(ranges));
    }
  }

  void push_node(double bound, std::vector<Range> ranges) {
    queue_.push(Node{bound, next_seq_++, std::move(ranges), sol_.basis});
    check_memory();
  }

  void main_loop() {
    while (!queue_.empty()) {
      if (out_of_time()) return;
      Node node = queue_.top();
      queue_.pop();
      if (node.bound <= prune_threshold()) {
        // Best-bound order: every remaining node is at most as promising.
        while (!queue_.empty()) queue_.pop();
        return;
      }
      if (!node.root_continuation) ++report_.nodes;
      open_bound_ = node.bound;
      process_node(node);
      if (report_.nodes % 100 == 0)
        log_line("node " + std::to_string(report_.nodes) + ": open " +
                 std::to_string(queue_.size()) + ", bound " +
                 std::to_string(open_bound_) + ", incumbent " +
                 std::to_string(incumbent_value_));
    }
  }

  void process_node(const Node& node) {
    apply_node_bounds(node);
    current_ranges_ = node.ranges;
    sol_ = lp_solve(p_.model, &node.basis, cfg_.lp);
    double bound = node.bound;
    for (;;) {
      if (sol_.status == LpStatus::Infeasible) return;
      bound = std::min(bound, sol_.objective);
      open_bound_ = bound;
      if (bound <= prune_threshold()) return;
      if (out_of_time()) return;
      point_ = extract_point(p_, sol_, inst_);
      const bool integral = is_integral(point_.x, cfg_.int_tol);
      if (integral) {
        try_incumbent_from(point_.x);
        const std::vector<Cut> cuts = separate(point_, true);
        // No new rows: the bound rests on rows the LP already satisfies
        // within its feasibility tolerance, on top of the plan's exact
        // value just offered as incumbent.
        if (cuts.empty() || add_cuts_tracked(cuts) == 0) return;
        sol_ = lp_solve(p_.model, &sol_.basis, cfg_.lp);
        continue;
      }
      if (heur_ && report_.nodes % cfg_.heuristic_period == 0)
        run_primal_heuristic(point_.x);
      if (frac_sep_) {
        const std::vector<Cut> cuts = separate(point_, false);
        if (!cuts.empty() && add_cuts_tracked(cuts) > 0) {
          sol_ = lp_solve(p_.model, &sol_.basis, cfg_.lp);
          const double next = std::min(bound, sol_.objective);
          const bool stalled = bound - next < 1e-7;
          bound = next;
          if (!stalled) continue;
          point_ = extract_point(p_, sol_, inst_);
          if (is_integral(point_.x, cfg_.int_tol)) continue;
        }
      }
      branch_from_current(bound);
      return;
    }
  }

  void finish(double ub) {
    report_.z_star = incumbent_value_;
    report_.ub = report_.status == SolveStatus::optimal
                     ? incumbent_value_
                     : std::max(ub, incumbent_value_);
    if (report_.status == SolveStatus::optimal)
      report_.ub_root = std::max(report_.ub_root, report_.z_star);
    report_.t_total = elapsed();
    const Gaps gaps = compute_gaps(report_.ub, report_.z_star, report_.ub_root,
                                   report_.z_heur);
    report_.gap_pct = gaps.g;
    report_.gap_root_pct = gaps.g_r;
    report_.gap_heur_pct = gaps.g_h;
    report_.opened = incumbent_plan_;
    report_.max_coloc = incumbent_plan_.max_multiplicity();
    int coloc = 0;
    for (const auto& [loc, mult] : incumbent_plan_.counts)
      if (mult >= 2) ++coloc;
    report_.n_coloc_locations = coloc;
    log_line("done: z* " + std::to_string(report_.z_star) + ", UB " +
             std::to_string(report_.ub) + ", nodes " +
             std::to_string(report_.nodes) + ", status " +
             std::string(to_string(report_.status)));
  }

  const Instance& inst_;
  SolverConfig cfg_;
  bool frac_sep_;
  bool heur_;
  bool prep_;

  Clock::time_point start_;
  bool time_up_ = false;

  FixingMask mask_;
  GreedyResult greedy_;
  CopyGainTable gains_;
  ValueMemo memo_;

  double incumbent_value_ = 0.0;
  OpenPlan incumbent_plan_;

  bool built_ = false;
  LpProblem p_;
  MaxCutContext ctx_;
  std::vector<double> root_ub_;
  LpSolution sol_;
  RelaxationPoint point_;
  std::vector<Range> current_ranges_;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> queue_;
  long next_seq_ = 0;
  double open_bound_ = 0.0;
  std::size_t row_entries_ = 0;
  std::set<std::vector<double>> seen_rows_;

  SolveReport report_;
};

}  // namespace detail

inline SolveReport solve(const Instance& inst, const SolverConfig& cfg = {}) {
  detail::TreeSolver solver(inst, cfg);
  return solver.run();
}

}  // namespace mgclp
