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
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mgclp/cuts.hpp"
#include "mgclp/errors.hpp"
#include "mgclp/instance.hpp"
#include "mgclp/preprocessing.hpp"

namespace mgclp {

// Maximization LP over  A v <= b,  lb <= v <= ub,  with finite bounds on
// structural variables. Every model built here keeps the all-lower-bound
// point feasible, so the all-slack basis is a valid cold start and the
// final fallback after any numerical trouble.
struct LpColumn {
  double lb = 0.0;
  double ub = 0.0;
  double obj = 0.0;
};

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;
};

struct LpModel {
  std::vector<LpColumn> cols;
  std::vector<LpRow> rows;

  int add_column(double lb, double ub, double obj) {
    cols.push_back({lb, ub, obj});
    return static_cast<int>(cols.size()) - 1;
  }

  int add_row(std::vector<std::pair<int, double>> coeffs, double rhs) {
    rows.push_back({std::move(coeffs), rhs});
    return static_cast<int>(rows.size()) - 1;
  }
};

enum class VarStatus : unsigned char { Basic, AtLower, AtUpper };

// Statuses for structural variables followed by row slacks. A basis from an
// earlier solve of the same model stays loadable after rows are appended;
// the new slacks default to basic.
struct Basis {
  std::vector<VarStatus> status;

  bool empty() const { return status.empty(); }
};

enum class LpStatus { Optimal, Infeasible, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;
  std::vector<double> values;  // structural variables
  std::vector<double> duals;   // one multiplier per row, nonnegative
  Basis basis;
  long iterations = 0;
};

struct LpOptions {
  long max_iterations = 1000000;
  int refactor_every = 300;
  int stall_before_bland = 500;
  double pivot_tol = 1e-9;
  double dual_tol = 1e-9;
  double row_feas_tol = 1e-7;
  double bound_feas_tol = 1e-9;
};

namespace detail {

// Bounded-variable revised simplex. The basis inverse is kept only for the
// kernel of active rows: rows whose slack is nonbasic, paired with the basic
// structural columns. Inactive rows have basic slacks, whose values follow
// from the structural values, so pivots cost O(q^2) for q active rows
// instead of O(m^2) for m total rows.
class Simplex {
 public:
  Simplex(const LpModel& model, const LpOptions& opt)
      : m_(model),
        opt_(opt),
        n_(static_cast<int>(model.cols.size())),
        rows_(static_cast<int>(model.rows.size())) {
    col_entries_.resize(n_);
    for (int r = 0; r < rows_; ++r)
      for (const auto& [c, a] : m_.rows[r].coeffs) col_entries_[c].push_back({r, a});
    status_.assign(n_ + rows_, VarStatus::Basic);
    val_.assign(n_ + rows_, 0.0);
    pos_in_M_.assign(rows_, -1);
    pos_in_Q_.assign(n_, -1);
  }

  LpSolution solve(const Basis* warm) {
    bool loaded = warm && !warm->empty() && load_basis(*warm);
    if (!loaded) reset_all_slack();
    if (!primal_feasible()) {
      if (!dual_loop()) {
        if (status_result_ == LpStatus::Infeasible) return extract();
        reset_all_slack();
      }
    }
    primal_loop();
    return extract();
  }

 private:
  // ---- basis bookkeeping -------------------------------------------------

  double lb(int v) const { return v < n_ ? m_.cols[v].lb : 0.0; }
  double ub(int v) const { return v < n_ ? m_.cols[v].ub : kInfinity; }
  double cost(int v) const { return v < n_ ? m_.cols[v].obj : 0.0; }
  bool fixed(int v) const { return lb(v) == ub(v); }
  int q() const { return static_cast<int>(Qcols_.size()); }

  double& C(int a, int b) { return C_[static_cast<size_t>(a) * q_cap_ + b]; }
  double Cv(int a, int b) const { return C_[static_cast<size_t>(a) * q_cap_ + b]; }

  void reset_all_slack() {
    Qcols_.clear();
    Mrows_.clear();
    std::fill(pos_in_M_.begin(), pos_in_M_.end(), -1);
    std::fill(pos_in_Q_.begin(), pos_in_Q_.end(), -1);
    for (int c = 0; c < n_; ++c) status_[c] = VarStatus::AtLower;
    for (int r = 0; r < rows_; ++r) status_[n_ + r] = VarStatus::Basic;
    C_.clear();
    q_cap_ = 0;
    pivots_since_refactor_ = 0;
    compute_values();
  }

  bool load_basis(const Basis& warm) {
    if (warm.status.size() > status_.size()) return false;
    for (size_t v = 0; v < warm.status.size(); ++v) status_[v] = warm.status[v];
    for (size_t v = warm.status.size(); v < status_.size(); ++v)
      status_[v] = VarStatus::Basic;  // slacks of rows added since

    Qcols_.clear();
    Mrows_.clear();
    std::fill(pos_in_M_.begin(), pos_in_M_.end(), -1);
    std::fill(pos_in_Q_.begin(), pos_in_Q_.end(), -1);
    for (int c = 0; c < n_; ++c) {
      if (status_[c] == VarStatus::Basic) {
        pos_in_Q_[c] = static_cast<int>(Qcols_.size());
        Qcols_.push_back(c);
      } else if (status_[c] == VarStatus::AtUpper && ub(c) == kInfinity) {
        status_[c] = VarStatus::AtLower;
      }
    }
    for (int r = 0; r < rows_; ++r) {
      if (status_[n_ + r] != VarStatus::Basic) {
        status_[n_ + r] = VarStatus::AtLower;
        pos_in_M_[r] = static_cast<int>(Mrows_.size());
        Mrows_.push_back(r);
      }
    }
    if (Qcols_.size() != Mrows_.size()) return false;
    if (!refactor()) return false;
    compute_values();
    return true;
  }

  // Rebuilds the kernel inverse from scratch by Gauss-Jordan elimination
  // with partial pivoting on the augmented system.
  bool refactor() {
    const int k = q();
    q_cap_ = k;
    if (k == 0) {
      C_.clear();
      pivots_since_refactor_ = 0;
      return true;
    }
    std::vector<double> D(static_cast<size_t>(k) * k, 0.0);
    for (int b = 0; b < k; ++b)
      for (const auto& [r, a] : col_entries_[Qcols_[b]])
        if (pos_in_M_[r] >= 0) D[static_cast<size_t>(pos_in_M_[r]) * k + b] = a;

    C_.assign(static_cast<size_t>(k) * k, 0.0);
    for (int d = 0; d < k; ++d) C(d, d) = 1.0;

    for (int col = 0; col < k; ++col) {
      int piv = col;
      for (int r = col + 1; r < k; ++r)
        if (std::abs(D[static_cast<size_t>(r) * k + col]) >
            std::abs(D[static_cast<size_t>(piv) * k + col]))
          piv = r;
      if (std::abs(D[static_cast<size_t>(piv) * k + col]) < 1e-11) return false;
      if (piv != col) {
        for (int c = 0; c < k; ++c) {
          std::swap(D[static_cast<size_t>(piv) * k + c], D[static_cast<size_t>(col) * k + c]);
          std::swap(C(piv, c), C(col, c));
        }
      }
      const double inv = 1.0 / D[static_cast<size_t>(col) * k + col];
      for (int c = 0; c < k; ++c) {
        D[static_cast<size_t>(col) * k + c] *= inv;
        C(col, c) *= inv;
      }
      for (int r = 0; r < k; ++r) {
        if (r == col) continue;
        const double f = D[static_cast<size_t>(r) * k + col];
        if (f == 0.0) continue;
        for (int c = 0; c < k; ++c) {
          D[static_cast<size_t>(r) * k + c] -= f * D[static_cast<size_t>(col) * k + c];
          C(r, c) -= f * C(col, c);
        }
      }
    }
    pivots_since_refactor_ = 0;
    return true;
  }

  void compute_values() {
    for (int c = 0; c < n_; ++c)
      if (status_[c] != VarStatus::Basic)
        val_[c] = status_[c] == VarStatus::AtUpper ? ub(c) : lb(c);
    for (int r = 0; r < rows_; ++r)
      if (pos_in_M_[r] >= 0) val_[n_ + r] = 0.0;

    const int k = q();
    std::vector<double> rhs(k, 0.0);
    for (int a = 0; a < k; ++a) {
      const LpRow& row = m_.rows[Mrows_[a]];
      double s = row.rhs;
      for (const auto& [c, coef] : row.coeffs)
        if (pos_in_Q_[c] < 0) s -= coef * val_[c];
      rhs[a] = s;
    }
    for (int b = 0; b < k; ++b) {
      double s = 0.0;
      for (int a = 0; a < k; ++a) s += Cv(b, a) * rhs[a];
      val_[Qcols_[b]] = s;
    }
    for (int r = 0; r < rows_; ++r) {
      if (pos_in_M_[r] >= 0) continue;
      const LpRow& row = m_.rows[r];
      double s = row.rhs;
      for (const auto& [c, coef] : row.coeffs) s -= coef * val_[c];
      val_[n_ + r] = s;
    }
  }

  bool primal_feasible() const {
    for (int c = 0; c < n_; ++c)
      if (val_[c] < lb(c) - opt_.bound_feas_tol || val_[c] > ub(c) + opt_.bound_feas_tol)
        return false;
    for (int r = 0; r < rows_; ++r)
      if (val_[n_ + r] < -opt_.row_feas_tol) return false;
    return true;
  }

  // Multipliers of the active rows; inactive rows price at zero.
  void compute_duals(std::vector<double>& y) const {
    y.assign(rows_, 0.0);
    const int k = q();
    for (int a = 0; a < k; ++a) {
      double s = 0.0;
      for (int b = 0; b < k; ++b) s += Cv(b, a) * cost(Qcols_[b]);
      y[Mrows_[a]] = s;
    }
  }

  // Reduced costs of all structural variables via a scatter over active rows.
  void compute_reduced(const std::vector<double>& y, std::vector<double>& red) const {
    red.resize(n_);
    for (int c = 0; c < n_; ++c) red[c] = cost(c);
    for (int a = 0; a < q(); ++a) {
      const int r = Mrows_[a];
      const double yr = y[r];
      if (yr == 0.0) continue;
      for (const auto& [c, coef] : m_.rows[r].coeffs) red[c] -= yr * coef;
    }
  }

  // Direction of basic variables when the entering variable gains one unit.
  // uQ holds the change of the basic structurals (negated kernel solve);
  // returns the slack direction per inactive row on demand.
  void ftran(int entering, std::vector<double>& aM, std::vector<double>& uQ) const {
    const int k = q();
    aM.assign(k, 0.0);
    if (entering < n_) {
      for (const auto& [r, a] : col_entries_[entering])
        if (pos_in_M_[r] >= 0) aM[pos_in_M_[r]] = a;
    } else {
      const int r = entering - n_;
      aM[pos_in_M_[r]] = 1.0;
    }
    uQ.assign(k, 0.0);
    for (int b = 0; b < k; ++b) {
      double s = 0.0;
      for (int a = 0; a < k; ++a) s += Cv(b, a) * aM[a];
      uQ[b] = s;
    }
  }

  // A(r, entering) - row_r[Q] . uQ, the rate at which row r's slack absorbs
  // one unit of the entering variable.
  double slack_direction(int r, int entering, const std::vector<double>& uQ) const {
    double s = 0.0;
    if (entering < n_) {
      for (const auto& [c, coef] : m_.rows[r].coeffs) {
        if (c == entering) s += coef;
        if (pos_in_Q_[c] >= 0) s -= coef * uQ[pos_in_Q_[c]];
      }
    } else {
      for (const auto& [c, coef] : m_.rows[r].coeffs)
        if (pos_in_Q_[c] >= 0) s -= coef * uQ[pos_in_Q_[c]];
    }
    return s;
  }

  // ---- kernel inverse updates ---------------------------------------------

  void rebuild_capacity(int new_q) {
    if (new_q <= q_cap_) return;
    const int cap = std::max(new_q, q_cap_ * 2 + 8);
    std::vector<double> fresh(static_cast<size_t>(cap) * cap, 0.0);
    for (int a = 0; a < q_cap_; ++a)
      for (int b = 0; b < q_cap_; ++b)
        fresh[static_cast<size_t>(a) * cap + b] = Cv(a, b);
    C_ = std::move(fresh);
    q_cap_ = cap;
  }

  // Case A: basic structural at kernel position p replaced by a structural
  // column with kernel image aM and solve u = C aM; |u[p]| is the pivot.
  void update_replace_column(int p, int entering, const std::vector<double>& u) {
    const int k = q();
    const double inv = 1.0 / u[p];
    for (int c = 0; c < k; ++c) C(p, c) *= inv;
    for (int a = 0; a < k; ++a) {
      if (a == p) continue;
      const double f = u[a];
      if (f == 0.0) continue;
      for (int c = 0; c < k; ++c) C(a, c) -= f * C(p, c);
    }
    pos_in_Q_[Qcols_[p]] = -1;
    Qcols_[p] = entering;
    pos_in_Q_[entering] = p;
  }

  // Case B: the kernel grows by activating row r and making `entering`
  // basic. u = C aM, v = (row_r over Q) C, s the Schur complement pivot.
  void update_grow(int r, int entering, const std::vector<double>& u, double s) {
    const int k = q();
    std::vector<double> g(k, 0.0);
    for (const auto& [c, coef] : m_.rows[r].coeffs)
      if (pos_in_Q_[c] >= 0) g[pos_in_Q_[c]] = coef;
    std::vector<double> v(k, 0.0);
    for (int a = 0; a < k; ++a) {
      double acc = 0.0;
      for (int b = 0; b < k; ++b) acc += g[b] * Cv(b, a);
      v[a] = acc;
    }
    rebuild_capacity(k + 1);
    const double inv = 1.0 / s;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) C(a, b) += u[a] * v[b] * inv;
    for (int a = 0; a < k; ++a) {
      C(a, k) = -u[a] * inv;
      C(k, a) = -v[a] * inv;
    }
    C(k, k) = inv;
    pos_in_M_[r] = k;
    Mrows_.push_back(r);
    pos_in_Q_[entering] = k;
    Qcols_.push_back(entering);
  }

  // Case C: the kernel shrinks, deactivating the row at kernel position rho
  // and dropping the basic structural at position p. Pivot C(p, rho).
  void update_shrink(int rho, int p) {
    const int k = q();
    const double inv = 1.0 / Cv(p, rho);
    for (int a = 0; a < k; ++a) {
      if (a == p) continue;
      const double f = Cv(a, rho) * inv;
      if (f == 0.0) continue;
      for (int b = 0; b < k; ++b) C(a, b) -= f * Cv(p, b);
    }
    // Compact: drop kernel row p (a Q position) and column rho (an M position).
    const int last = k - 1;
    pos_in_Q_[Qcols_[p]] = -1;
    pos_in_M_[Mrows_[rho]] = -1;
    if (p != last) {
      for (int b = 0; b < k; ++b) C(p, b) = Cv(last, b);
      Qcols_[p] = Qcols_[last];
      pos_in_Q_[Qcols_[p]] = p;
    }
    Qcols_.pop_back();
    if (rho != last) {
      for (int a = 0; a < last; ++a) C(a, rho) = Cv(a, last);
      Mrows_[rho] = Mrows_[last];
      pos_in_M_[Mrows_[rho]] = rho;
    }
    Mrows_.pop_back();
  }

  // Case D: the active row at kernel position rho is swapped for row r.
  // h = (row_r over Q) C; pivot h[rho].
  void update_replace_row(int rho, int r) {
    const int k = q();
    std::vector<double> g(k, 0.0);
    for (const auto& [c, coef] : m_.rows[r].coeffs)
      if (pos_in_Q_[c] >= 0) g[pos_in_Q_[c]] = coef;
    std::vector<double> h(k, 0.0);
    for (int a = 0; a < k; ++a) {
      double acc = 0.0;
      for (int b = 0; b < k; ++b) acc += g[b] * Cv(b, a);
      h[a] = acc;
    }
    const double inv = 1.0 / h[rho];
    std::vector<double> u(k);
    for (int b = 0; b < k; ++b) u[b] = Cv(b, rho);
    for (int b = 0; b < k; ++b) {
      const double f = u[b] * inv;
      if (f == 0.0) continue;
      for (int a = 0; a < k; ++a) C(b, a) -= f * (h[a] - (a == rho ? 1.0 : 0.0));
    }
    pos_in_M_[Mrows_[rho]] = -1;
    Mrows_[rho] = r;
    pos_in_M_[r] = rho;
  }

  // Routes a pivot to the right kernel update.
  void pivot(int entering, int leaving, const std::vector<double>& uQ, double s_grow) {
    const bool e_struct = entering < n_;
    const bool l_struct = leaving < n_;
    if (e_struct && l_struct) {
      update_replace_column(pos_in_Q_[leaving], entering, uQ);
    } else if (e_struct && !l_struct) {
      update_grow(leaving - n_, entering, uQ, s_grow);
    } else if (!e_struct && l_struct) {
      update_shrink(pos_in_M_[entering - n_], pos_in_Q_[leaving]);
    } else {
      update_replace_row(pos_in_M_[entering - n_], leaving - n_);
    }
    ++pivots_since_refactor_;
  }

  // ---- primal simplex ------------------------------------------------------

  void primal_loop() {
    std::vector<double> y, red, aM, uQ;
    std::vector<double> slack_dir(rows_, 0.0);
    bool bland = false;
    int stall = 0;
    bool refreshed = false;

    while (iterations_ < opt_.max_iterations) {
      compute_duals(y);
      compute_reduced(y, red);

      int entering = -1;
      double best = 0.0;
      auto consider = [&](int v, double d) {
        double merit = 0.0;
        if (status_[v] == VarStatus::AtLower && d > opt_.dual_tol) merit = d;
        else if (status_[v] == VarStatus::AtUpper && d < -opt_.dual_tol) merit = -d;
        else return;
        if (bland) {
          if (entering < 0 || v < entering) entering = v;
        } else if (merit > best) {
          best = merit;
          entering = v;
        }
      };
      for (int c = 0; c < n_; ++c) {
        if (status_[c] == VarStatus::Basic || fixed(c)) continue;
        consider(c, red[c]);
      }
      for (int a = 0; a < q(); ++a) consider(n_ + Mrows_[a], -y[Mrows_[a]]);

      if (entering < 0) {
        // Guard against drift in the updated kernel: reprice once from a
        // fresh factorization before declaring optimality.
        if (!refreshed && pivots_since_refactor_ > 0) {
          refactor();
          compute_values();
          refreshed = true;
          continue;
        }
        status_result_ = LpStatus::Optimal;
        return;
      }
      refreshed = false;
      ++iterations_;

      const double d_e = entering < n_ ? red[entering] : -y[entering - n_];
      const double sgn = status_[entering] == VarStatus::AtLower ? 1.0 : -1.0;
      ftran(entering, aM, uQ);

      // Ratio test: the entering variable moves by t toward its opposite
      // bound until it or a basic variable hits a bound.
      const double flip_t = ub(entering) - lb(entering);
      double t_best = kInfinity;
      int leaving = -1;
      double leave_dir = 0.0;
      double best_piv = 0.0;
      auto propose = [&](int v, double dir) {
        if (std::abs(dir) <= opt_.pivot_tol) return;
        double limit;
        if (dir > 0.0) {
          if (ub(v) >= kInfinity) return;
          limit = (ub(v) - val_[v]) / dir;
        } else {
          limit = (lb(v) - val_[v]) / dir;
        }
        if (limit < 0.0) limit = 0.0;
        const bool tie = leaving >= 0 && limit < t_best + 1e-12;
        const bool wins =
            limit < t_best - 1e-12 ||
            (tie && (bland ? v < leaving : std::abs(dir) > best_piv));
        if (wins) {
          t_best = std::min(t_best, limit);
          leaving = v;
          leave_dir = dir;
          best_piv = std::abs(dir);
        }
      };
      for (int b = 0; b < q(); ++b) propose(Qcols_[b], -sgn * uQ[b]);
      for (int r = 0; r < rows_; ++r) {
        if (pos_in_M_[r] >= 0) continue;
        slack_dir[r] = -sgn * slack_direction(r, entering, uQ);
        propose(n_ + r, slack_dir[r]);
      }

      const bool flip = flip_t < t_best;
      const double t = std::max(0.0, flip ? flip_t : t_best);
      if (t >= kInfinity) {
        // A bounded objective never lets this happen; bail out defensively.
        status_result_ = LpStatus::IterationLimit;
        return;
      }

      val_[entering] += sgn * t;
      for (int b = 0; b < q(); ++b) val_[Qcols_[b]] += -sgn * uQ[b] * t;
      for (int r = 0; r < rows_; ++r)
        if (pos_in_M_[r] < 0) val_[n_ + r] += slack_dir[r] * t;

      const double gain = std::abs(d_e) * t;
      if (gain > 1e-12) {
        stall = 0;
        bland = false;
      } else if (++stall >= opt_.stall_before_bland) {
        bland = true;
      }

      if (flip) {
        status_[entering] = status_[entering] == VarStatus::AtLower
                                ? VarStatus::AtUpper
                                : VarStatus::AtLower;
        val_[entering] =
            status_[entering] == VarStatus::AtUpper ? ub(entering) : lb(entering);
      } else {
        const double s_grow = leaving >= n_ ? leave_dir / -sgn : 0.0;
        status_[leaving] = leave_dir < 0.0 ? VarStatus::AtLower : VarStatus::AtUpper;
        if (leaving >= n_) status_[leaving] = VarStatus::AtLower;
        status_[entering] = VarStatus::Basic;
        pivot(entering, leaving, uQ, s_grow);
        val_[leaving] = status_[leaving] == VarStatus::AtUpper ? ub(leaving) : lb(leaving);
      }

      if (pivots_since_refactor_ >= opt_.refactor_every) {
        if (!refactor()) {
          reset_all_slack();
          bland = false;
          stall = 0;
          continue;
        }
        compute_values();
      }
    }
    status_result_ = LpStatus::IterationLimit;
  }

  // ---- dual simplex --------------------------------------------------------

  // Restores primal feasibility after bound changes or new rows while
  // keeping dual feasibility. Returns false when it gave up (caller resets)
  // or proved the LP infeasible (status_result_ set).
  bool dual_loop() {
    std::vector<double> y, red, alpha, aM, uQ;
    const long dual_cap = 2000 + 2L * rows_;
    long dual_iters = 0;

    for (;;) {
      if (++dual_iters > dual_cap || iterations_ >= opt_.max_iterations) return false;

      int leaving = -1;
      double worst = std::max(opt_.row_feas_tol, opt_.bound_feas_tol);
      double sigma = 0.0;
      auto consider_leaving = [&](int v) {
        const double below = lb(v) - val_[v];
        const double above = val_[v] - ub(v);
        if (below > worst) {
          worst = below;
          leaving = v;
          sigma = -1.0;
        }
        if (above > worst) {
          worst = above;
          leaving = v;
          sigma = 1.0;
        }
      };
      for (int b = 0; b < q(); ++b) consider_leaving(Qcols_[b]);
      for (int r = 0; r < rows_; ++r)
        if (pos_in_M_[r] < 0) consider_leaving(n_ + r);

      if (leaving < 0) return true;
      ++iterations_;

      compute_duals(y);
      compute_reduced(y, red);
      pivot_row(leaving, alpha);

      int entering = -1;
      double best_theta = kInfinity;
      double best_alpha = 0.0;
      auto consider_entering = [&](int v, double a_v, double d_v) {
        if (std::abs(a_v) <= opt_.pivot_tol || fixed(v)) return;
        const bool ok = sigma > 0.0
                            ? (status_[v] == VarStatus::AtLower && a_v > 0.0) ||
                                  (status_[v] == VarStatus::AtUpper && a_v < 0.0)
                            : (status_[v] == VarStatus::AtLower && a_v < 0.0) ||
                                  (status_[v] == VarStatus::AtUpper && a_v > 0.0);
        if (!ok) return;
        const double theta = std::max(0.0, d_v / a_v * (sigma > 0.0 ? -1.0 : 1.0));
        if (theta < best_theta - 1e-12 ||
            (theta < best_theta + 1e-12 &&
             (entering < 0 || std::abs(a_v) > best_alpha))) {
          best_theta = theta;
          entering = v;
          best_alpha = std::abs(a_v);
        }
      };
      for (int c = 0; c < n_; ++c) {
        if (status_[c] == VarStatus::Basic) continue;
        consider_entering(c, alpha[c], red[c]);
      }
      for (int a = 0; a < q(); ++a) {
        const int r = Mrows_[a];
        consider_entering(n_ + r, alpha[n_ + r], -y[r]);
      }

      if (entering < 0) {
        status_result_ = LpStatus::Infeasible;
        return false;
      }

      ftran(entering, aM, uQ);
      double s_grow = 0.0;
      if (leaving >= n_)
        s_grow = slack_direction(leaving - n_, entering, uQ);
      if (leaving >= n_ && std::abs(s_grow) <= opt_.pivot_tol) return false;
      if (leaving < n_ && std::abs(uQ[pos_in_Q_[leaving]]) <= opt_.pivot_tol) return false;

      status_[leaving] = sigma > 0.0 ? VarStatus::AtUpper : VarStatus::AtLower;
      if (leaving >= n_) status_[leaving] = VarStatus::AtLower;
      status_[entering] = VarStatus::Basic;
      pivot(entering, leaving, uQ, s_grow);
      compute_values();

      if (pivots_since_refactor_ >= opt_.refactor_every) {
        if (!refactor()) return false;
        compute_values();
      }
    }
  }

  // Expresses the leaving basic variable over the nonbasic variables:
  // alpha[v] such that val(leaving) moves by -alpha[v] per unit of v.
  void pivot_row(int leaving, std::vector<double>& alpha) {
    alpha.assign(n_ + rows_, 0.0);
    const int k = q();
    std::vector<double> rho(k, 0.0);
    if (leaving < n_) {
      const int p = pos_in_Q_[leaving];
      for (int a = 0; a < k; ++a) rho[a] = Cv(p, a);
      for (int a = 0; a < k; ++a) {
        if (rho[a] == 0.0) continue;
        for (const auto& [c, coef] : m_.rows[Mrows_[a]].coeffs)
          alpha[c] += rho[a] * coef;
      }
      for (int a = 0; a < k; ++a) alpha[n_ + Mrows_[a]] = rho[a];
    } else {
      const int r = leaving - n_;
      std::vector<double> g(k, 0.0);
      for (const auto& [c, coef] : m_.rows[r].coeffs) {
        if (pos_in_Q_[c] >= 0) g[pos_in_Q_[c]] = coef;
        else alpha[c] += coef;
      }
      std::vector<double> w(k, 0.0);
      for (int a = 0; a < k; ++a) {
        double acc = 0.0;
        for (int b = 0; b < k; ++b) acc += g[b] * Cv(b, a);
        w[a] = acc;
      }
      for (int a = 0; a < k; ++a) {
        if (w[a] == 0.0) continue;
        for (const auto& [c, coef] : m_.rows[Mrows_[a]].coeffs)
          if (pos_in_Q_[c] < 0) alpha[c] -= w[a] * coef;
        alpha[n_ + Mrows_[a]] = -w[a];
      }
      // Wipe contributions accidentally accumulated on basic structurals.
      for (int b = 0; b < k; ++b) alpha[Qcols_[b]] = 0.0;
    }
    // The leaving variable itself is basic; exclude it.
    alpha[leaving] = 0.0;
  }

  LpSolution extract() {
    LpSolution sol;
    sol.status = status_result_;
    sol.iterations = iterations_;
    sol.values.assign(val_.begin(), val_.begin() + n_);
    double obj = 0.0;
    for (int c = 0; c < n_; ++c) obj += m_.cols[c].obj * val_[c];
    sol.objective = obj;
    compute_duals(sol.duals);
    sol.basis.status = status_;
    return sol;
  }

  const LpModel& m_;
  LpOptions opt_;
  int n_ = 0;
  int rows_ = 0;
  std::vector<std::vector<std::pair<int, double>>> col_entries_;
  std::vector<VarStatus> status_;
  std::vector<double> val_;
  std::vector<int> Mrows_;
  std::vector<int> Qcols_;
  std::vector<int> pos_in_M_;
  std::vector<int> pos_in_Q_;
  std::vector<double> C_;
  int q_cap_ = 0;
  int pivots_since_refactor_ = 0;
  long iterations_ = 0;
  LpStatus status_result_ = LpStatus::Optimal;
};

}  // namespace detail

inline LpSolution lp_solve(const LpModel& model, const Basis* warm = nullptr,
                           const LpOptions& opt = {}) {
  detail::Simplex engine(model, opt);
  return engine.solve(warm);
}

// ---- formulation building ---------------------------------------------------

// Column map of a built formulation. Every location gets all K copy columns;
// masked copies are created with an upper bound of 0 so indices stay dense.
struct LpLayout {
  Formulation form = Formulation::F1;
  int n_loc = 0;
  int K = 0;
  std::vector<int> x_col;            // i * K + k
  int eta_total = -1;                // F1
  std::vector<int> eta_customer;     // F2
  std::vector<int> eta_product;      // F3, F4
  std::vector<int> eta_max;          // F4
  std::vector<std::tuple<int, int, int>> y_cols;  // (location, customer, col) F3
  int base_rows = 0;
  std::vector<std::string> col_names;

  int x(int i, int k) const { return x_col[static_cast<size_t>(i) * K + k]; }

  int eta_col(const Cut& cut) const {
    switch (cut.family) {
      case CutFamily::total:
        return eta_total;
      case CutFamily::customer:
        return eta_customer[cut.customer];
      case CutFamily::customer_product:
        return eta_product[cut.customer];
      case CutFamily::customer_max:
        return eta_max[cut.customer];
    }
    return -1;
  }
};

struct LpProblem {
  LpModel model;
  LpLayout layout;
};

// Appends one row  eta - sum coeff x <= constant  per cut. Returns how many
// rows were added.
inline int lp_add_cuts(LpProblem& p, const std::vector<Cut>& cuts) {
  for (const Cut& cut : cuts) {
    std::vector<std::pair<int, double>> coeffs;
    coeffs.reserve(cut.coeffs.size() + 1);
    coeffs.push_back({p.layout.eta_col(cut), 1.0});
    for (const auto& [var, c] : cut.coeffs)
      coeffs.push_back({p.layout.x(var.location, var.copy), -c});
    p.model.add_row(std::move(coeffs), cut.constant);
  }
  return static_cast<int>(cuts.size());
}

// Builds the LP relaxation skeleton: opening columns with symmetry ordering
// and the budget row, the formulation's objective variables with their box
// bounds, plus linking rows and optional initial bounds anchored at the
// empty plan.
inline LpProblem lp_build(const Instance& inst, Formulation form,
                          const FixingMask& mask, bool with_init_cuts) {
  const int ni = inst.num_locations();
  const int nj = inst.num_customers();
  const int K = inst.K;
  const double theta = inst.theta;

  LpProblem p;
  LpLayout& L = p.layout;
  L.form = form;
  L.n_loc = ni;
  L.K = K;

  L.x_col.resize(static_cast<size_t>(ni) * K);
  for (int i = 0; i < ni; ++i)
    for (int k = 0; k < K; ++k) {
      const double up = k < mask.max_copies[i] ? 1.0 : 0.0;
      L.x_col[static_cast<size_t>(i) * K + k] = p.model.add_column(0.0, up, 0.0);
      L.col_names.push_back("x" + std::to_string(i + 1) + "_" + std::to_string(k + 1));
    }

  switch (form) {
    case Formulation::F1:
      L.eta_total = p.model.add_column(0.0, inst.total_weight(), 1.0);
      L.col_names.push_back("etaT");
      break;
    case Formulation::F2:
      L.eta_customer.resize(nj);
      for (int j = 0; j < nj; ++j) {
        L.eta_customer[j] = p.model.add_column(0.0, inst.w[j], 1.0);
        L.col_names.push_back("etaC" + std::to_string(j + 1));
      }
      break;
    case Formulation::F3:
      L.eta_product.resize(nj);
      for (int j = 0; j < nj; ++j) {
        L.eta_product[j] = p.model.add_column(0.0, (1.0 - theta) * inst.w[j], 1.0);
        L.col_names.push_back("etaP" + std::to_string(j + 1));
      }
      for (int i = 0; i < ni; ++i)
        for (int j = 0; j < nj; ++j) {
          if (inst.f(i, j) <= 0.0) continue;
          const double up = mask.removed(i) ? 0.0 : 1.0;
          const int col = p.model.add_column(0.0, up, theta * inst.w[j] * inst.f(i, j));
          L.y_cols.push_back({i, j, col});
          L.col_names.push_back("y" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
        }
      break;
    case Formulation::F4:
      L.eta_product.resize(nj);
      L.eta_max.resize(nj);
      for (int j = 0; j < nj; ++j) {
        L.eta_product[j] = p.model.add_column(0.0, (1.0 - theta) * inst.w[j], 1.0);
        L.col_names.push_back("etaP" + std::to_string(j + 1));
      }
      for (int j = 0; j < nj; ++j) {
        L.eta_max[j] = p.model.add_column(0.0, theta * inst.w[j], 1.0);
        L.col_names.push_back("etaM" + std::to_string(j + 1));
      }
      break;
  }

  {
    std::vector<std::pair<int, double>> card;
    card.reserve(static_cast<size_t>(ni) * K);
    for (int i = 0; i < ni; ++i)
      for (int k = 0; k < K; ++k) card.push_back({L.x(i, k), 1.0});
    p.model.add_row(std::move(card), static_cast<double>(K));
  }

  for (int i = 0; i < ni; ++i)
    for (int k = 1; k < std::min(K, mask.max_copies[i]); ++k)
      p.model.add_row({{L.x(i, k), 1.0}, {L.x(i, k - 1), -1.0}}, 0.0);

  if (form == Formulation::F3) {
    std::vector<std::vector<std::pair<int, double>>> per_customer(nj);
    for (const auto& [i, j, col] : L.y_cols) {
      per_customer[j].push_back({col, 1.0});
      p.model.add_row({{col, 1.0}, {L.x(i, 0), -1.0}}, 0.0);
    }
    for (int j = 0; j < nj; ++j)
      if (!per_customer[j].empty())
        p.model.add_row(std::move(per_customer[j]), 1.0);
  }

  L.base_rows = static_cast<int>(p.model.rows.size());

  if (with_init_cuts) {
    std::vector<Cut> init;
    const OpenPlan empty;
    switch (form) {
      case Formulation::F1:
        init.push_back(scut_coefficients(inst, empty, CutFamily::total));
        break;
      case Formulation::F2:
        for (int j = 0; j < nj; ++j)
          init.push_back(scut_coefficients(inst, empty, CutFamily::customer, j));
        break;
      case Formulation::F3:
        for (int j = 0; j < nj; ++j)
          init.push_back(
              scut_coefficients(inst, empty, CutFamily::customer_product, j));
        break;
      case Formulation::F4:
        for (int j = 0; j < nj; ++j) {
          init.push_back(
              scut_coefficients(inst, empty, CutFamily::customer_product, j));
          init.push_back(max_cut_coefficients(inst, j, 0));
        }
        break;
    }
    lp_add_cuts(p, init);
  }
  return p;
}

// Reads the opening values and objective variables out of an LP solution.
inline RelaxationPoint extract_point(const LpProblem& p, const LpSolution& sol,
                                     const Instance& inst) {
  RelaxationPoint point;
  const LpLayout& L = p.layout;
  point.x = Matrix(L.n_loc, L.K);
  for (int i = 0; i < L.n_loc; ++i)
    for (int k = 0; k < L.K; ++k) point.x(i, k) = sol.values[L.x(i, k)];
  if (L.eta_total >= 0) point.eta_total = sol.values[L.eta_total];
  const int nj = inst.num_customers();
  if (!L.eta_customer.empty()) {
    point.eta_customer.resize(nj);
    for (int j = 0; j < nj; ++j)
      point.eta_customer[j] = sol.values[L.eta_customer[j]];
  }
  if (!L.eta_product.empty()) {
    point.eta_product.resize(nj);
    for (int j = 0; j < nj; ++j)
      point.eta_product[j] = sol.values[L.eta_product[j]];
  }
  if (!L.eta_max.empty()) {
    point.eta_max.resize(nj);
    for (int j = 0; j < nj; ++j) point.eta_max[j] = sol.values[L.eta_max[j]];
  }
  return point;
}

// Plain-text dump of a model in LP format, for debugging by hand.
inline void lp_dump(const LpModel& model, const std::vector<std::string>& names,
                    std::ostream& out) {
  auto name = [&](int c) {
    return c < static_cast<int>(names.size()) ? names[c]
                                              : "c" + std::to_string(c);
  };
  out << "Maximize\n obj:";
  bool first = true;
  for (size_t c = 0; c < model.cols.size(); ++c) {
    if (model.cols[c].obj == 0.0) continue;
    out << (first ? " " : " + ") << model.cols[c].obj << ' ' << name(static_cast<int>(c));
    first = false;
  }
  if (first) out << " 0";
  out << "\nSubject To\n";
  for (size_t r = 0; r < model.rows.size(); ++r) {
    out << " r" << r << ":";
    for (const auto& [c, a] : model.rows[r].coeffs) {
      if (a >= 0.0)
        out << " + " << a << ' ' << name(c);
      else
        out << " - " << -a << ' ' << name(c);
    }
    out << " <= " << model.rows[r].rhs << '\n';
  }
  out << "Bounds\n";
  for (size_t c = 0; c < model.cols.size(); ++c)
    out << ' ' << model.cols[c].lb << " <= " << name(static_cast<int>(c))
        << " <= " << model.cols[c].ub << '\n';
  out << "End\n";
}

}  // namespace mgclp
