#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "spadmm/constants.hpp"
#include "spadmm/error.hpp"
#include "spadmm/linalg.hpp"

namespace spadmm {

// min c·x  s.t.  A_eq x = b_eq,  lower <= x <= upper.  Bounds may be ±kInf.
struct StandardFormLP {
  Vector c;
  Matrix A_eq;
  Vector b_eq;
  Vector lower;
  Vector upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "?";
}

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double value = 0.0;
  // Smallest reduced cost over nonbasic columns of the internal standard form.
  // Nonnegative (up to tolerance) certifies optimality of the returned basis.
  double min_reduced_cost = 0.0;
  std::size_t pivots = 0;
};

namespace detail {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense tableau simplex on  min c·y  s.t.  A y = b (b >= 0),  y >= 0.
class TableauSimplex {
 public:
  TableauSimplex(const Matrix& A, const Vector& b)
      : rows_(A.rows()), structural_(A.cols()), T_(A.rows() + 1, A.cols() + A.rows() + 1) {
    T_.setZero();
    for (Index i = 0; i < rows_; ++i) {
      const double sign = b[i] < 0 ? -1.0 : 1.0;
      for (Index j = 0; j < structural_; ++j) T_(i, j) = sign * A(i, j);
      T_(i, structural_ + i) = 1.0;
      T_(i, rhs()) = sign * b[i];
    }
    basis_.resize(static_cast<std::size_t>(rows_));
    for (Index i = 0; i < rows_; ++i) basis_[static_cast<std::size_t>(i)] = structural_ + i;
  }

  // Returns false if phase 1 cannot drive the artificials to zero.
  bool phase_one() {
    auto obj = T_.row(rows_);
    obj.setZero();
    for (Index i = 0; i < rows_; ++i) {
      for (Index j = 0; j < structural_; ++j) obj[j] -= T_(i, j);
      obj[rhs()] -= T_(i, rhs());
    }
    if (!iterate(/*allow_artificial=*/false)) {
      throw NumericError("lp: phase one reported unbounded");  // cannot happen: objective bounded below by 0
    }
    double scale = 1.0;
    for (Index i = 0; i < rows_; ++i) scale = std::max(scale, std::abs(T_(i, rhs())));
    if (-T_(rows_, rhs()) > tol::lp_feasibility * scale) return false;

    // Pivot remaining (zero-valued) artificials out of the basis. Rows with no
    // structural entry are redundant and keep their artificial at zero.
    for (Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < structural_) continue;
      Index best = -1;
      double best_abs = tol::lp_feasibility;
      for (Index j = 0; j < structural_; ++j) {
        if (std::abs(T_(i, j)) > best_abs) {
          best_abs = std::abs(T_(i, j));
          best = j;
        }
      }
      if (best >= 0) pivot(i, best);
    }
    return true;
  }

  // Returns false on unboundedness.
  bool phase_two(const Vector& c) {
    auto obj = T_.row(rows_);
    obj.setZero();
    for (Index j = 0; j < structural_; ++j) obj[j] = c[j];
    for (Index i = 0; i < rows_; ++i) {
      const Index b = basis_[static_cast<std::size_t>(i)];
      const double cb = b < structural_ ? c[b] : 0.0;
      if (cb == 0.0) continue;
      for (Index j = 0; j < structural_; ++j) obj[j] -= cb * T_(i, j);
      obj[rhs()] -= cb * T_(i, rhs());
    }
    return iterate(/*allow_artificial=*/false);
  }

  Vector solution() const {
    Vector y = Vector::Zero(structural_);
    for (Index i = 0; i < rows_; ++i) {
      const Index b = basis_[static_cast<std::size_t>(i)];
      if (b < structural_) y[b] = T_(i, rhs());
    }
    return y;
  }

  double min_reduced_cost() const {
    std::vector<bool> basic(static_cast<std::size_t>(structural_), false);
    for (Index b : basis_)
      if (b < structural_) basic[static_cast<std::size_t>(b)] = true;
    double m = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < structural_; ++j)
      if (!basic[static_cast<std::size_t>(j)]) m = std::min(m, T_(rows_, j));
    return std::isfinite(m) ? m : 0.0;
  }

  std::size_t pivots() const { return pivots_; }

 private:
  Index rhs() const { return structural_ + rows_; }

  void pivot(Index p, Index q) {
    const double piv = T_(p, q);
    T_.row(p) /= piv;
    for (Index i = 0; i <= rows_; ++i) {
      if (i == p) continue;
      const double f = T_(i, q);
      if (f != 0.0) T_.row(i) -= f * T_.row(p);
    }
    basis_[static_cast<std::size_t>(p)] = q;
    ++pivots_;
    if (pivots_ > tol::lp_max_pivots) throw ConvergenceError("lp: pivot cap reached", T_(rows_, rhs()));
  }

  // Dantzig pricing; after a run of degenerate pivots switch to Bland's rule
  // (lowest-index entering and leaving) until the objective moves again.
  bool iterate(bool allow_artificial) {
    const Index cols = allow_artificial ? structural_ + rows_ : structural_;
    std::size_t degenerate_run = 0;
    constexpr std::size_t kBlandAfter = 50;
    for (;;) {
      const bool bland = degenerate_run >= kBlandAfter;
      Index q = -1;
      double most_negative = -tol::lp_optimality;
      for (Index j = 0; j < cols; ++j) {
        const double r = T_(rows_, j);
        if (r < most_negative) {
          q = j;
          if (bland) break;
          most_negative = r;
        }
      }
      if (q < 0) return true;

      Index p = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < rows_; ++i) {
        const double a = T_(i, q);
        if (a <= tol::lp_feasibility) continue;
        const double ratio = T_(i, rhs()) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && p >= 0 &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(p)])) {
          if (ratio < best_ratio) best_ratio = ratio;
          p = i;
        }
      }
      if (p < 0) return false;
      degenerate_run = best_ratio <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(p, q);
    }
  }

  Index rows_;
  Index structural_;
  Tableau T_;
  std::vector<Index> basis_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

// Two-phase dense simplex. Bounds are removed by variable substitution
// (shift, reflection, or free-variable splitting) and finite upper bounds
// become extra equality rows with slacks.
inline LpResult solve_lp(const StandardFormLP& lp) {
  const Index n = lp.c.size();
  const Index m = lp.A_eq.rows();
  if (lp.A_eq.cols() != n && m > 0) throw ArgumentError("solve_lp: A_eq column count does not match c");
  require_size(lp.b_eq, m, "solve_lp: b_eq");
  require_size(lp.lower, n, "solve_lp: lower");
  require_size(lp.upper, n, "solve_lp: upper");
  if (!all_finite(lp.b_eq) || !all_finite(lp.c)) throw ArgumentError("solve_lp: c and b_eq must be finite");

  enum class Map { Shift, Reflect, Free };
  struct VarMap {
    Map kind;
    Index col;
    double offset;
  };
  std::vector<VarMap> maps(static_cast<std::size_t>(n));
  Index cols = 0;
  Index ub_rows = 0;
  for (Index j = 0; j < n; ++j) {
    const double lo = lp.lower[j];
    const double up = lp.upper[j];
    if (std::isnan(lo) || std::isnan(up) || lo > up || lo == kInf || up == -kInf) {
      throw ArgumentError("solve_lp: invalid bounds for variable " + std::to_string(j));
    }
    auto& mp = maps[static_cast<std::size_t>(j)];
    if (std::isfinite(lo)) {
      mp = {Map::Shift, cols++, lo};
      if (std::isfinite(up)) ++ub_rows;
    } else if (std::isfinite(up)) {
      mp = {Map::Reflect, cols++, up};
    } else {
      mp = {Map::Free, cols, 0.0};
      cols += 2;
    }
  }
  const Index slack0 = cols;
  cols += ub_rows;
  const Index rows = m + ub_rows;

  Matrix A = Matrix::Zero(rows, cols);
  Vector b = Vector::Zero(rows);
  Vector c = Vector::Zero(cols);
  for (Index i = 0; i < m; ++i) b[i] = lp.b_eq[i];
  for (Index j = 0; j < n; ++j) {
    const auto& mp = maps[static_cast<std::size_t>(j)];
    const double sign = mp.kind == Map::Reflect ? -1.0 : 1.0;
    for (Index i = 0; i < m; ++i) {
      const double a = lp.A_eq(i, j);
      if (a == 0.0) continue;
      A(i, mp.col) += sign * a;
      if (mp.kind == Map::Free) A(i, mp.col + 1) -= a;
      b[i] -= a * mp.offset;
    }
    c[mp.col] = sign * lp.c[j];
    if (mp.kind == Map::Free) c[mp.col + 1] = -lp.c[j];
  }
  Index r = m;
  Index s = slack0;
  for (Index j = 0; j < n; ++j) {
    const auto& mp = maps[static_cast<std::size_t>(j)];
    if (mp.kind == Map::Shift && std::isfinite(lp.upper[j])) {
      A(r, mp.col) = 1.0;
      A(r, s) = 1.0;
      b[r] = lp.upper[j] - lp.lower[j];
      ++r;
      ++s;
    }
  }

  detail::TableauSimplex simplex(A, b);
  LpResult result;
  if (!simplex.phase_one()) {
    result.status = LpStatus::Infeasible;
    result.pivots = simplex.pivots();
    return result;
  }
  if (!simplex.phase_two(c)) {
    result.status = LpStatus::Unbounded;
    result.pivots = simplex.pivots();
    return result;
  }
  const Vector y = simplex.solution();
  result.x.resize(n);
  for (Index j = 0; j < n; ++j) {
    const auto& mp = maps[static_cast<std::size_t>(j)];
    switch (mp.kind) {
      case Map::Shift:
        result.x[j] = mp.offset + y[mp.col];
        break;
      case Map::Reflect:
        result.x[j] = mp.offset - y[mp.col];
        break;
      case Map::Free:
        result.x[j] = y[mp.col] - y[mp.col + 1];
        break;
    }
  }
  result.status = LpStatus::Optimal;
  result.value = dot(lp.c, result.x);
  result.min_reduced_cost = simplex.min_reduced_cost();
  result.pivots = simplex.pivots();
  return result;
}

}  // namespace spadmm
