#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

#include "spadmm/constants.hpp"
#include "spadmm/convex_set.hpp"
#include "spadmm/error.hpp"
#include "spadmm/linalg.hpp"
#include "spadmm/lmo.hpp"
#include "spadmm/objectives.hpp"
#include "spadmm/problem.hpp"
#include "spadmm/random.hpp"

namespace spadmm {

// The augmented saddle sub-problem of one block:
//   min_x max_y  f(x, y) + λa·(x − za) + (ρa/2)‖x − za‖² − λb·(y − zb) − (ρb/2)‖y − zb‖²
// over the block's local sets.
struct BlockSubproblem {
  const BlockObjective* objective = nullptr;
  Vector z_a, z_b, lam_a, lam_b;
  double rho_a = 1.0;
  double rho_b = 1.0;
  const ConvexSet* local_a = nullptr;
  const ConvexSet* local_b = nullptr;
  // Optional starting point for iterative solvers (empty = project z onto the local sets).
  Vector start_a, start_b;

  void validate() const {
    if (!objective || !local_a || !local_b) throw ArgumentError("block subproblem: missing objective or sets");
    const BlockDims d = objective->dims();
    require_size(z_a, d.a, "block subproblem z_a");
    require_size(lam_a, d.a, "block subproblem lam_a");
    require_size(z_b, d.b, "block subproblem z_b");
    require_size(lam_b, d.b, "block subproblem lam_b");
    if (local_a->dim() != d.a || local_b->dim() != d.b) throw ArgumentError("block subproblem: local set dimension");
    if (!(rho_a > 0.0) || !(rho_b > 0.0)) throw ArgumentError("block subproblem: penalties must be > 0");
  }

  double value(const Vector& x, const Vector& y) const {
    return objective->value(x, y) + dot(lam_a, x - z_a) + 0.5 * rho_a * squared_norm(x - z_a) -
           dot(lam_b, y - z_b) - 0.5 * rho_b * squared_norm(y - z_b);
  }

  void gradient(const Vector& x, const Vector& y, Vector& gx, Vector& gy) const {
    objective->gradient(x, y, gx, gy);
    gx += lam_a + rho_a * (x - z_a);
    gy -= lam_b + rho_b * (y - z_b);
  }
};

struct BlockSolution {
  Vector x_a;
  Vector x_b;
  // Solver-specific accuracy: VI violation (analytic), FW gap (spfw) or last
  // step length (extragradient).
  double residual = 0.0;
  std::size_t iterations = 0;
};

namespace detail {

inline void check_finite_gradient(const Vector& gx, const Vector& gy, const char* solver, std::size_t iter) {
  if (!all_finite(gx) || !all_finite(gy))
    throw NumericError(std::string(solver) + ": non-finite gradient at iteration " + std::to_string(iter));
}

inline Vector start_point(const Vector& start, const Vector& z, const ConvexSet& set) {
  return set.project(start.size() == set.dim() ? start : z);
}

}  // namespace detail

// Exact saddle point of a scalar bilinear-quadratic block over an interval
// pair. With A = qx + ρa and B = qy + ρb the optimality conditions read
//   x = clip((−b·y − gx0) / A),   y = clip((b·x + gy0) / B).
// Each of the nine face combinations (lower / interior / upper per variable)
// yields one candidate; the candidate satisfying both conditions is returned.
inline BlockSolution solve_block_analytic(const BlockSubproblem& sp) {
  sp.validate();
  const auto* bq = dynamic_cast<const BilinearQuadratic*>(sp.objective);
  if (bq == nullptr || sp.objective->kind() != ObjectiveKind::BilinearQuadratic)
    throw UnsupportedError("analytic block solver: objective is not bilinear-quadratic");
  if (sp.local_a->kind() != ConvexSet::Kind::Box || sp.local_b->kind() != ConvexSet::Kind::Box)
    throw UnsupportedError("analytic block solver: local sets must be intervals");

  const double xl = sp.local_a->as_box().lower[0], xu = sp.local_a->as_box().upper[0];
  const double yl = sp.local_b->as_box().lower[0], yu = sp.local_b->as_box().upper[0];
  const double A = bq->qx() + sp.rho_a;
  const double B = bq->qy() + sp.rho_b;
  const double b = bq->b();
  const double gx0 = bq->cx() + sp.lam_a[0] - sp.rho_a * sp.z_a[0];
  const double gy0 = bq->cy() - sp.lam_b[0] + sp.rho_b * sp.z_b[0];
  const double det = -A * B - b * b;
  if (!(std::abs(det) > 0.0)) throw NumericError("analytic block solver: singular stationarity system");

  auto best_x = [&](double y) { return std::clamp((-b * y - gx0) / A, xl, xu); };
  auto best_y = [&](double x) { return std::clamp((b * x + gy0) / B, yl, yu); };

  const double x_free = (gx0 * B + b * gy0) / det;
  const double y_free = (b * gx0 - A * gy0) / det;

  double bx = 0.0, by = 0.0, best_violation = std::numeric_limits<double>::infinity();
  auto consider = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    const double v = std::max(std::abs(x - best_x(y)), std::abs(y - best_y(x)));
    if (v < best_violation) {
      best_violation = v;
      bx = x;
      by = y;
    }
  };

  const std::array<double, 2> xb{xl, xu};
  const std::array<double, 2> yb{yl, yu};
  consider(x_free, y_free);
  for (double x : xb) consider(x, best_y(x));
  for (double y : yb) consider(best_x(y), y);
  for (double x : xb)
    for (double y : yb) consider(x, y);

  const double scale = std::max({1.0, std::abs(bx), std::abs(by)});
  if (!(best_violation <= 1e-10 * scale))
    throw NumericError("analytic block solver: no face candidate satisfies the saddle conditions");
  return {Vector::Constant(1, bx), Vector::Constant(1, by), best_violation, 1};
}

// Saddle-point Frank-Wolfe on the augmented block objective: one joint LMO
// step on (∇x, −∇y) with step size 2/(2+k); stops once the FW gap <= tol.
inline BlockSolution solve_block_spfw(const BlockSubproblem& sp, std::size_t max_iters = tol::block_solver_max_iters,
                                      double tol = tol::block_solver) {
  sp.validate();
  Vector x = detail::start_point(sp.start_a, sp.z_a, *sp.local_a);
  Vector y = detail::start_point(sp.start_b, sp.z_b, *sp.local_b);
  Vector gx(x.size()), gy(y.size());
  double gap = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (; k < max_iters; ++k) {
    sp.gradient(x, y, gx, gy);
    detail::check_finite_gradient(gx, gy, "spfw block solver", k);
    const Vector sx = lmo(*sp.local_a, gx);
    const Vector sy = lmo(*sp.local_b, -gy);
    gap = dot(gx, x - sx) + dot(gy, sy - y);
    if (gap <= tol) break;
    const double step = 2.0 / (2.0 + static_cast<double>(k));
    x += step * (sx - x);
    y += step * (sy - y);
  }
  return {std::move(x), std::move(y), gap, k};
}

// Sampled Lipschitz estimate of the saddle operator F = (∇x, −∇y) near (x, y).
inline double estimate_block_lipschitz(const BlockSubproblem& sp, const Vector& x, const Vector& y,
                                       std::uint64_t seed, int samples = 8) {
  Rng rng(seed);
  const Index da = x.size(), db = y.size();
  Vector gx1(da), gy1(db), gx2(da), gy2(db);
  double L = std::max(sp.rho_a, sp.rho_b);
  for (int s = 0; s < samples; ++s) {
    const Vector x1 = sp.local_a->project(x + rng.uniform_vector(da, -1.0, 1.0));
    const Vector y1 = sp.local_b->project(y + rng.uniform_vector(db, -1.0, 1.0));
    const Vector x2 = sp.local_a->project(x + rng.uniform_vector(da, -1.0, 1.0));
    const Vector y2 = sp.local_b->project(y + rng.uniform_vector(db, -1.0, 1.0));
    const double dist = std::sqrt(squared_norm(x1 - x2) + squared_norm(y1 - y2));
    if (dist < 1e-12) continue;
    sp.gradient(x1, y1, gx1, gy1);
    sp.gradient(x2, y2, gx2, gy2);
    const double dg = std::sqrt(squared_norm(gx1 - gx2) + squared_norm(gy1 - gy2));
    if (std::isfinite(dg)) L = std::max(L, dg / dist);
  }
  return L;
}

// Projected extragradient (Korpelevich). step <= 0 selects 1/(2·L̂) with L̂
// from estimate_block_lipschitz; the step is halved whenever the local
// Lipschitz condition  step·‖F(u½) − F(u)‖ <= 0.9‖u½ − u‖  fails.
inline BlockSolution solve_block_extragradient(const BlockSubproblem& sp, double step = 0.0,
                                               std::size_t max_iters = tol::block_solver_max_iters,
                                               double tol = tol::block_solver, std::uint64_t seed = 0) {
  sp.validate();
  Vector x = detail::start_point(sp.start_a, sp.z_a, *sp.local_a);
  Vector y = detail::start_point(sp.start_b, sp.z_b, *sp.local_b);
  if (!(step > 0.0)) step = 0.5 / estimate_block_lipschitz(sp, x, y, seed);

  const Index da = x.size(), db = y.size();
  Vector gx(da), gy(db), hx(da), hy(db);
  double moved = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (; k < max_iters; ++k) {
    sp.gradient(x, y, gx, gy);
    detail::check_finite_gradient(gx, gy, "extragradient block solver", k);
    Vector xh, yh;
    for (int halvings = 0;; ++halvings) {
      xh = sp.local_a->project(x - step * gx);
      yh = sp.local_b->project(y + step * gy);
      sp.gradient(xh, yh, hx, hy);
      detail::check_finite_gradient(hx, hy, "extragradient block solver", k);
      const double du = std::sqrt(squared_norm(xh - x) + squared_norm(yh - y));
      const double dF = std::sqrt(squared_norm(hx - gx) + squared_norm(hy - gy));
      if (step * dF <= 0.9 * du || du == 0.0 || halvings >= 60) break;
      step *= 0.5;
    }
    Vector xn = sp.local_a->project(x - step * hx);
    Vector yn = sp.local_b->project(y + step * hy);
    moved = std::sqrt(squared_norm(xn - x) + squared_norm(yn - y));
    x = std::move(xn);
    y = std::move(yn);
    if (moved <= tol) {
      ++k;
      break;
    }
  }
  return {std::move(x), std::move(y), moved, k};
}

// Maximum violation of the block saddle conditions
//   x = P(x − ∇xφ),  y = P(y + ∇yφ)
// (natural residual with unit step); zero exactly at the block saddle point.
inline double block_natural_residual(const BlockSubproblem& sp, const Vector& x, const Vector& y) {
  Vector gx(x.size()), gy(y.size());
  sp.gradient(x, y, gx, gy);
  const Vector rx = x - sp.local_a->project(x - gx);
  const Vector ry = y - sp.local_b->project(y + gy);
  return std::sqrt(squared_norm(rx) + squared_norm(ry));
}

// Solver selection for BlockSolverKind::Auto: analytic when the block is a
// scalar bilinear-quadratic over intervals, extragradient otherwise.
inline BlockSolverKind resolve_block_solver(BlockSolverKind requested, const BlockSubproblem& sp) {
  if (requested != BlockSolverKind::Auto) return requested;
  const BlockDims d = sp.objective->dims();
  if (sp.objective->kind() == ObjectiveKind::BilinearQuadratic && d.a == 1 && d.b == 1 &&
      sp.local_a->kind() == ConvexSet::Kind::Box && sp.local_b->kind() == ConvexSet::Kind::Box &&
      dynamic_cast<const BilinearQuadratic*>(sp.objective) != nullptr)
    return BlockSolverKind::Analytic;
  return BlockSolverKind::Extragradient;
}

inline BlockSolution solve_block(const BlockSubproblem& sp, BlockSolverKind kind, double tol,
                                 std::size_t max_iters, std::uint64_t seed) {
  switch (resolve_block_solver(kind, sp)) {
    case BlockSolverKind::Analytic:
      return solve_block_analytic(sp);
    case BlockSolverKind::FrankWolfe:
      return solve_block_spfw(sp, max_iters, tol);
    case BlockSolverKind::Extragradient:
    case BlockSolverKind::Auto:
      return solve_block_extragradient(sp, 0.0, max_iters, tol, seed);
  }
  throw UnsupportedError("unknown block solver");
}

}  // namespace spadmm
