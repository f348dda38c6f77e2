// Copyright 2026 The eamod Authors.
//
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

// Bounded primal revised simplex.
//
// Every row gets a slack column so that a x + s = b, with the slack bounds
// encoding the row sense. Rows whose slack cannot absorb the initial residual
// get an artificial column; phase 1 drives those to zero. The basis is held
// as a sparse LU factorization plus a product-form eta file.

#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "eamod/error.hpp"

namespace eamod {

enum class Sense { kLe, kGe, kEq };

/// min c'x  s.t.  rows,  lower <= x <= upper.
struct LinearProgram {
  struct Row {
    std::vector<std::pair<std::size_t, double>> coefs;
    Sense sense = Sense::kEq;
    double rhs = 0.0;
  };

  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;

  std::size_t variable_count() const { return cost.size(); }
  std::size_t row_count() const { return rows.size(); }

  std::size_t add_variable(double c, double lo = 0.0,
                           double hi = std::numeric_limits<double>::infinity()) {
    cost.push_back(c);
    lower.push_back(lo);
    upper.push_back(hi);
    return cost.size() - 1;
  }
  std::size_t add_row(std::vector<std::pair<std::size_t, double>> coefs, Sense sense,
                      double rhs) {
    rows.push_back({std::move(coefs), sense, rhs});
    return rows.size() - 1;
  }

  /// Largest violation of any row or bound by `x`.
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (const Row& r : rows) {
      double lhs = 0.0;
      for (auto [j, a] : r.coefs) lhs += a * x[j];
      const double d = lhs - r.rhs;
      if (r.sense != Sense::kGe) worst = std::max(worst, d);
      if (r.sense != Sense::kLe) worst = std::max(worst, -d);
    }
    for (std::size_t j = 0; j < x.size(); ++j)
      worst = std::max({worst, lower[j] - x[j], x[j] - upper[j]});
    return worst;
  }

  double objective(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += cost[j] * x[j];
    return s;
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumericalError };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration-limit";
    case LpStatus::kNumericalError:
      return "numerical-error";
  }
  return "?";
}

struct LpOptions {
  std::size_t max_iterations = 1000000;
  double primal_tol = 1e-10;
  double dual_tol = 1e-9;  ///< relative to the largest cost magnitude
  std::size_t refactor_every = 64;
  std::size_t stall_limit = 50;  ///< zero steps before switching to Bland's rule
};

struct LpResult {
  LpStatus status = LpStatus::kNumericalError;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  double max_violation = 0.0;
};

namespace detail {

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpOptions& opt) : lp_(lp), opt_(opt) {
    n_ = lp.variable_count();
    m_ = lp.row_count();
    total_ = n_ + 2 * m_;
    if (lp.lower.size() != n_ || lp.upper.size() != n_)
      throw InvalidArgument("bound vectors do not match variable count");
    for (std::size_t j = 0; j < n_; ++j)
      if (lp.lower[j] > lp.upper[j])
        throw InvalidArgument("variable " + std::to_string(j) + " has lower > upper");

    // Row equilibration and column storage.
    scale_.assign(m_, 1.0);
    std::vector<std::vector<std::pair<int, double>>> cols(n_);
    for (std::size_t i = 0; i < m_; ++i) {
      double big = 0.0;
      for (auto [j, a] : lp.rows[i].coefs) {
        if (j >= n_) throw InvalidArgument("row references unknown variable");
        big = std::max(big, std::abs(a));
      }
      if (big > 0) scale_[i] = 1.0 / big;
      for (auto [j, a] : lp.rows[i].coefs)
        if (a != 0.0) cols[j].emplace_back(static_cast<int>(i), a * scale_[i]);
    }
    col_start_.assign(n_ + 1, 0);
    for (std::size_t j = 0; j < n_; ++j) {
      std::sort(cols[j].begin(), cols[j].end());
      // Merge duplicate entries of the same row.
      std::vector<std::pair<int, double>> merged;
      for (auto e : cols[j]) {
        if (!merged.empty() && merged.back().first == e.first)
          merged.back().second += e.second;
        else
          merged.push_back(e);
      }
      for (auto e : merged) {
        col_row_.push_back(e.first);
        col_val_.push_back(e.second);
      }
      col_start_[j + 1] = col_row_.size();
    }
    b_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) b_[i] = lp.rows[i].rhs * scale_[i];

    lo_.assign(total_, 0.0);
    hi_.assign(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lp.lower[j];
      hi_[j] = lp.upper[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const Sense s = lp.rows[i].sense;
      lo_[n_ + i] = s == Sense::kGe ? -kInfinity : 0.0;
      hi_[n_ + i] = s == Sense::kLe ? kInfinity : 0.0;
    }
    art_sign_.assign(m_, 1.0);
    double cmax = 0.0;
    for (double c : lp.cost) cmax = std::max(cmax, std::abs(c));
    dual_tol_ = opt.dual_tol * std::max(1.0, cmax);
  }

  LpResult run() {
    LpResult res;
    if (m_ == 0) return solve_bounds_only(res);
    initial_basis();
    if (!refactor()) return fail(res, LpStatus::kNumericalError);

    // Phase 1.
    std::vector<double> c1(total_, 0.0);
    bool any_art = false;
    for (std::size_t i = 0; i < m_; ++i)
      if (hi_[n_ + m_ + i] > 0) {
        c1[n_ + m_ + i] = 1.0;
        any_art = true;
      }
    if (any_art) {
      const LpStatus s = iterate(c1);
      if (s != LpStatus::kOptimal) return fail(res, s);
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i) infeas += x_[n_ + m_ + i];
      double bmax = 1.0;
      for (double v : b_) bmax = std::max(bmax, std::abs(v));
      if (infeas > 1e-8 * bmax) return fail(res, LpStatus::kInfeasible);
      for (std::size_t i = 0; i < m_; ++i) {
        hi_[n_ + m_ + i] = 0.0;
        if (pos_[n_ + m_ + i] < 0) x_[n_ + m_ + i] = 0.0;
      }
    }

    // Phase 2.
    std::vector<double> c2(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) c2[j] = lp_.cost[j];
    const LpStatus s = iterate(c2);
    if (s != LpStatus::kOptimal) return fail(res, s);

    res.status = LpStatus::kOptimal;
    res.x.assign(x_.begin(), x_.begin() + n_);
    for (std::size_t j = 0; j < n_; ++j)
      res.x[j] = std::clamp(res.x[j], lp_.lower[j], lp_.upper[j]);
    res.objective = lp_.objective(res.x);
    res.iterations = iterations_;
    res.max_violation = lp_.max_violation(res.x);
    return res;
  }

 private:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  struct Eta {
    std::size_t row;
    double pivot;
    std::vector<std::pair<std::size_t, double>> others;
  };

  // Without rows every variable sits at its cheaper bound.
  LpResult solve_bounds_only(LpResult& r) const {
    r.x.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      const double c = lp_.cost[j];
      const double at = c > 0 ? lo_[j] : c < 0 ? hi_[j] : std::isfinite(lo_[j]) ? lo_[j] : hi_[j];
      if (!std::isfinite(at)) {
        if (c != 0.0) return fail(r, LpStatus::kUnbounded);
        continue;
      }
      r.x[j] = at;
    }
    r.status = LpStatus::kOptimal;
    r.objective = lp_.objective(r.x);
    r.max_violation = lp_.max_violation(r.x);
    return r;
  }

  LpResult fail(LpResult& r, LpStatus s) const {
    r.status = s;
    r.iterations = iterations_;
    return r;
  }

  // Column j of [A | I | diag(art_sign)] applied as y += scale * column.
  template <typename F>
  void for_column(std::size_t j, F f) const {
    if (j < n_) {
      for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k)
        f(static_cast<std::size_t>(col_row_[k]), col_val_[k]);
    } else if (j < n_ + m_) {
      f(j - n_, 1.0);
    } else {
      f(j - n_ - m_, art_sign_[j - n_ - m_]);
    }
  }

  double dot_column(std::size_t j, const std::vector<double>& y) const {
    double s = 0.0;
    for_column(j, [&](std::size_t i, double a) { s += a * y[i]; });
    return s;
  }

  void initial_basis() {
    x_.assign(total_, 0.0);
    pos_.assign(total_, -1);
    head_.assign(m_, 0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j]))
        x_[j] = lo_[j];
      else if (std::isfinite(hi_[j]))
        x_[j] = hi_[j];
    }
    std::vector<double> r = b_;
    for (std::size_t j = 0; j < n_; ++j)
      if (x_[j] != 0.0)
        for_column(j, [&](std::size_t i, double a) { r[i] -= a * x_[j]; });
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      const std::size_t art = n_ + m_ + i;
      if (r[i] >= lo_[s] && r[i] <= hi_[s]) {
        x_[s] = r[i];
        head_[i] = s;
        pos_[s] = static_cast<long>(i);
        lo_[art] = hi_[art] = 0.0;
      } else {
        x_[s] = std::clamp(r[i], lo_[s], hi_[s]);
        const double d = r[i] - x_[s];
        art_sign_[i] = d >= 0 ? 1.0 : -1.0;
        x_[art] = std::abs(d);
        lo_[art] = 0.0;
        hi_[art] = kInfinity;
        head_[i] = art;
        pos_[art] = static_cast<long>(i);
      }
    }
  }

  bool refactor() {
    etas_.clear();
    if (m_ == 0) return true;
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < m_; ++k)
      for_column(head_[k], [&](std::size_t i, double a) {
        trip.emplace_back(static_cast<int>(i), static_cast<int>(k), a);
      });
    Eigen::SparseMatrix<double> B(static_cast<int>(m_), static_cast<int>(m_));
    B.setFromTriplets(trip.begin(), trip.end());
    B.makeCompressed();
    lu_.analyzePattern(B);
    lu_.factorize(B);
    if (lu_.info() != Eigen::Success) return false;
    // Recompute basic values from the nonbasic ones.
    Eigen::VectorXd r(static_cast<int>(m_));
    for (std::size_t i = 0; i < m_; ++i) r[i] = b_[i];
    for (std::size_t j = 0; j < total_; ++j)
      if (pos_[j] < 0 && x_[j] != 0.0)
        for_column(j, [&](std::size_t i, double a) { r[i] -= a * x_[j]; });
    const Eigen::VectorXd xb = lu_.solve(r);
    for (std::size_t k = 0; k < m_; ++k) x_[head_[k]] = xb[k];
    return true;
  }

  std::vector<double> ftran(std::size_t j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<int>(m_));
    for_column(j, [&](std::size_t i, double v) { a[i] = v; });
    const Eigen::VectorXd z0 = lu_.solve(a);
    std::vector<double> z(z0.data(), z0.data() + m_);
    for (const Eta& e : etas_) {
      const double zr = z[e.row] / e.pivot;
      if (zr != 0.0)
        for (auto [i, v] : e.others) z[i] -= v * zr;
      z[e.row] = zr;
    }
    return z;
  }

  std::vector<double> btran(std::vector<double> w) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = w[it->row];
      for (auto [i, v] : it->others) s -= v * w[i];
      w[it->row] = s / it->pivot;
    }
    Eigen::VectorXd rhs = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<int>(m_));
    const Eigen::VectorXd y = lu_.transpose().solve(rhs);
    return std::vector<double>(y.data(), y.data() + m_);
  }

  LpStatus iterate(const std::vector<double>& c) {
    std::size_t stall = 0;
    bool bland = false;
    std::vector<double> cb(m_);
    while (true) {
      if (iterations_ >= opt_.max_iterations) return LpStatus::kIterationLimit;
      if (etas_.size() >= opt_.refactor_every && !refactor())
        return LpStatus::kNumericalError;
      for (std::size_t k = 0; k < m_; ++k) cb[k] = c[head_[k]];
      const std::vector<double> y = m_ ? btran(cb) : std::vector<double>{};

      // Pricing.
      std::size_t q = total_;
      double best = 0.0;
      double dq = 0.0;
      for (std::size_t j = 0; j < total_; ++j) {
        if (pos_[j] >= 0 || lo_[j] == hi_[j]) continue;
        const double d = c[j] - dot_column(j, y);
        const bool can_up = x_[j] < hi_[j];
        const bool can_down = x_[j] > lo_[j];
        if (!((d < -dual_tol_ && can_up) || (d > dual_tol_ && can_down))) continue;
        if (bland) {
          q = j;
          dq = d;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dq = d;
        }
      }
      if (q == total_) {
        if (!etas_.empty() && !refactor()) return LpStatus::kNumericalError;
        return LpStatus::kOptimal;
      }
      const double dir = dq < 0 ? 1.0 : -1.0;
      const std::vector<double> alpha = ftran(q);

      // Harris two-pass ratio test.
      const double ftol = opt_.primal_tol;
      constexpr double kPivotTol = 1e-9;
      double theta_max = kInfinity;
      for (std::size_t k = 0; k < m_; ++k) {
        const double a = dir * alpha[k];
        if (std::abs(a) < kPivotTol) continue;
        const std::size_t v = head_[k];
        if (a > 0 && std::isfinite(lo_[v]))
          theta_max = std::min(theta_max, (x_[v] - lo_[v] + ftol) / a);
        else if (a < 0 && std::isfinite(hi_[v]))
          theta_max = std::min(theta_max, (hi_[v] + ftol - x_[v]) / -a);
      }
      const double span = hi_[q] - lo_[q];
      if (!std::isfinite(theta_max) && !std::isfinite(span)) return LpStatus::kUnbounded;

      std::size_t leave = m_;
      double theta = kInfinity;
      double piv = 0.0;
      for (std::size_t k = 0; k < m_; ++k) {
        const double a = dir * alpha[k];
        if (std::abs(a) < kPivotTol) continue;
        const std::size_t v = head_[k];
        double t;
        if (a > 0 && std::isfinite(lo_[v]))
          t = (x_[v] - lo_[v]) / a;
        else if (a < 0 && std::isfinite(hi_[v]))
          t = (hi_[v] - x_[v]) / -a;
        else
          continue;
        if (t > theta_max) continue;
        const bool better = bland ? (leave == m_ || v < head_[leave])
                                  : std::abs(a) > piv;
        if (better) {
          leave = k;
          piv = std::abs(a);
          theta = std::max(0.0, t);
        }
      }
      ++iterations_;

      if (std::isfinite(span) && (leave == m_ || span <= theta)) {
        // Bound flip, basis unchanged.
        for (std::size_t k = 0; k < m_; ++k) x_[head_[k]] -= dir * span * alpha[k];
        x_[q] = dir > 0 ? hi_[q] : lo_[q];
        stall = 0;
        bland = false;
        continue;
      }
      if (leave == m_) return LpStatus::kUnbounded;

      for (std::size_t k = 0; k < m_; ++k) x_[head_[k]] -= dir * theta * alpha[k];
      x_[q] += dir * theta;
      const std::size_t out = head_[leave];
      x_[out] = dir * alpha[leave] > 0 ? lo_[out] : hi_[out];
      pos_[out] = -1;
      head_[leave] = q;
      pos_[q] = static_cast<long>(leave);

      Eta e{leave, alpha[leave], {}};
      for (std::size_t k = 0; k < m_; ++k)
        if (k != leave && alpha[k] != 0.0) e.others.emplace_back(k, alpha[k]);
      etas_.push_back(std::move(e));

      if (theta * std::abs(dq) <= 1e-14 * std::max(1.0, dual_tol_)) {
        if (++stall > opt_.stall_limit) bland = true;
      } else {
        stall = 0;
        bland = false;
      }
    }
  }

  const LinearProgram& lp_;
  LpOptions opt_;
  std::size_t n_ = 0, m_ = 0, total_ = 0;
  std::vector<double> scale_, b_, lo_, hi_, x_, art_sign_;
  std::vector<std::size_t> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<std::size_t> head_;
  std::vector<long> pos_;
  std::vector<Eta> etas_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  double dual_tol_ = 1e-9;
  std::size_t iterations_ = 0;
};

}  // namespace detail

inline LpResult solve_linear_program(const LinearProgram& lp, const LpOptions& opt = {}) {
  return detail::Simplex(lp, opt).run();
}

}  // namespace eamod
