#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spadmm/constants.hpp"
#include "spadmm/convex_set.hpp"
#include "spadmm/error.hpp"
#include "spadmm/linalg.hpp"

namespace spadmm {

enum class ObjectiveKind { BilinearQuadratic, SmoothGeneral };

inline const char* to_string(ObjectiveKind k) {
  return k == ObjectiveKind::BilinearQuadratic ? "bilinear-quadratic" : "smooth-general";
}

struct BlockDims {
  Index a = 0;
  Index b = 0;
};

// One term f_i(x_i, y_i) of the decomposable objective: convex in the
// minimizer block x_i, concave in the maximizer block y_i.
class BlockObjective {
 public:
  virtual ~BlockObjective() = default;

  virtual BlockDims dims() const = 0;
  virtual ObjectiveKind kind() const = 0;
  // Serialization tag, e.g. "power-capacity".
  virtual std::string type() const = 0;

  virtual double value(const Vector& x, const Vector& y) const = 0;
  // Writes both partial gradients; gx and gy must already have the block sizes.
  virtual void gradient(const Vector& x, const Vector& y, Vector& gx, Vector& gy) const = 0;

  Vector grad_x(const Vector& x, const Vector& y) const {
    Vector gx(dims().a), gy(dims().b);
    gradient(x, y, gx, gy);
    return gx;
  }
  Vector grad_y(const Vector& x, const Vector& y) const {
    Vector gx(dims().a), gy(dims().b);
    gradient(x, y, gx, gy);
    return gy;
  }
};

using BlockPtr = std::shared_ptr<const BlockObjective>;

namespace detail {

// Embeds a set over a block's coordinates into the full space of dimension n.
inline ConvexSet lift(const ConvexSet& s, Index offset, Index n) {
  const Index d = s.dim();
  switch (s.kind()) {
    case ConvexSet::Kind::Box: {
      Vector lo = Vector::Constant(n, -kInf), up = Vector::Constant(n, kInf);
      lo.segment(offset, d) = s.as_box().lower;
      up.segment(offset, d) = s.as_box().upper;
      return ConvexSet::box(lo, up);
    }
    case ConvexSet::Kind::ScaledSimplex: {
      Matrix A = Matrix::Zero(1, n);
      A.block(0, offset, 1, d).setOnes();
      Vector lo = Vector::Constant(n, -kInf), up = Vector::Constant(n, kInf);
      lo.segment(offset, d).setZero();
      return ConvexSet::affine_box(A, Vector::Constant(1, s.as_simplex().total), lo, up);
    }
    case ConvexSet::Kind::Halfspace: {
      Vector a = Vector::Zero(n);
      a.segment(offset, d) = s.as_halfspace().a;
      return ConvexSet::halfspace(a, s.as_halfspace().b, s.as_halfspace().sense);
    }
    case ConvexSet::Kind::AffineBox: {
      const auto& ab = s.as_affine_box();
      Matrix A = Matrix::Zero(ab.A.rows(), n);
      A.block(0, offset, ab.A.rows(), d) = ab.A;
      Vector lo = Vector::Constant(n, -kInf), up = Vector::Constant(n, kInf);
      lo.segment(offset, d) = ab.lower;
      up.segment(offset, d) = ab.upper;
      return ConvexSet::affine_box(A, ab.b, lo, up);
    }
    case ConvexSet::Kind::Intersection: {
      std::vector<ConvexSet> parts;
      for (const auto& p : s.as_intersection().parts) parts.push_back(lift(p, offset, n));
      return ConvexSet::intersection(std::move(parts));
    }
  }
  throw UnsupportedError("lift: unknown set kind");
}

// global ∩ (local_1 × … × local_N). All-box local sets collapse into one Box.
inline ConvexSet fold_local_sets(const ConvexSet& global, const std::vector<ConvexSet>& locals,
                                 const std::vector<Index>& offsets) {
  const Index n = global.dim();
  bool all_boxes = true;
  for (const auto& s : locals) all_boxes = all_boxes && s.kind() == ConvexSet::Kind::Box;
  std::vector<ConvexSet> parts{global};
  if (all_boxes) {
    Vector lo(n), up(n);
    for (std::size_t i = 0; i < locals.size(); ++i) {
      lo.segment(offsets[i], locals[i].dim()) = locals[i].as_box().lower;
      up.segment(offsets[i], locals[i].dim()) = locals[i].as_box().upper;
    }
    parts.push_back(ConvexSet::box(lo, up));
  } else {
    for (std::size_t i = 0; i < locals.size(); ++i) parts.push_back(lift(locals[i], offsets[i], n));
  }
  return ConvexSet::intersection(std::move(parts));
}

}  // namespace detail

// min over x_a, max over x_b of Σ_i f_i(x_{a,i}, x_{b,i}) subject to per-block
// local sets and one global set per player over the concatenated variables.
class SaddleProblem {
 public:
  SaddleProblem(std::vector<BlockPtr> blocks, std::vector<ConvexSet> local_a, std::vector<ConvexSet> local_b,
                ConvexSet global_a, ConvexSet global_b)
      : blocks_(std::move(blocks)),
        local_a_(std::move(local_a)),
        local_b_(std::move(local_b)),
        global_a_(std::move(global_a)),
        global_b_(std::move(global_b)) {
    const std::size_t N = blocks_.size();
    if (N == 0) throw ArgumentError("saddle problem: needs at least one block");
    if (local_a_.size() != N || local_b_.size() != N) throw ArgumentError("saddle problem: one local set per block");
    offset_a_.resize(N);
    offset_b_.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      if (!blocks_[i]) throw ArgumentError("saddle problem: null block objective");
      const BlockDims d = blocks_[i]->dims();
      if (local_a_[i].dim() != d.a || local_b_[i].dim() != d.b)
        throw ArgumentError("saddle problem: local set dimension mismatch at block " + std::to_string(i));
      offset_a_[i] = n_a_;
      offset_b_[i] = n_b_;
      n_a_ += d.a;
      n_b_ += d.b;
    }
    if (global_a_.dim() != n_a_ || global_b_.dim() != n_b_)
      throw ArgumentError("saddle problem: global set dimension mismatch");
    feasible_a_ = detail::fold_local_sets(global_a_, local_a_, offset_a_);
    if (n_b_ > 0) feasible_b_ = detail::fold_local_sets(global_b_, local_b_, offset_b_);
  }

  std::size_t num_blocks() const { return blocks_.size(); }
  Index dim_a() const { return n_a_; }
  Index dim_b() const { return n_b_; }
  bool has_maximizer() const { return n_b_ > 0; }

  const BlockObjective& block(std::size_t i) const { return *blocks_[i]; }
  const BlockPtr& block_ptr(std::size_t i) const { return blocks_[i]; }
  const ConvexSet& local_a(std::size_t i) const { return local_a_[i]; }
  const ConvexSet& local_b(std::size_t i) const { return local_b_[i]; }
  const ConvexSet& global_a() const { return global_a_; }
  const ConvexSet& global_b() const { return global_b_; }
  Index offset_a(std::size_t i) const { return offset_a_[i]; }
  Index offset_b(std::size_t i) const { return offset_b_[i]; }

  // Full feasible regions: global set intersected with the product of local sets.
  const ConvexSet& feasible_a() const { return *feasible_a_; }
  const ConvexSet& feasible_b() const {
    if (!feasible_b_) throw ArgumentError("saddle problem: no maximizer variables");
    return *feasible_b_;
  }

  Vector slice_a(const Vector& v, std::size_t i) const { return v.segment(offset_a_[i], blocks_[i]->dims().a); }
  Vector slice_b(const Vector& v, std::size_t i) const { return v.segment(offset_b_[i], blocks_[i]->dims().b); }

 private:
  std::vector<BlockPtr> blocks_;
  std::vector<ConvexSet> local_a_;
  std::vector<ConvexSet> local_b_;
  ConvexSet global_a_;
  ConvexSet global_b_;
  std::vector<Index> offset_a_;
  std::vector<Index> offset_b_;
  Index n_a_ = 0;
  Index n_b_ = 0;
  std::optional<ConvexSet> feasible_a_;
  std::optional<ConvexSet> feasible_b_;
};

struct IterateState {
  Vector x_a, z_a, lam_a;
  Vector x_b, z_b, lam_b;
  std::size_t k = 0;
};

enum class BlockSolverKind { Auto, Analytic, FrankWolfe, Extragradient };

inline const char* to_string(BlockSolverKind k) {
  switch (k) {
    case BlockSolverKind::Auto:
      return "auto";
    case BlockSolverKind::Analytic:
      return "analytic";
    case BlockSolverKind::FrankWolfe:
      return "spfw";
    case BlockSolverKind::Extragradient:
      return "extragradient";
  }
  return "?";
}

inline BlockSolverKind parse_block_solver(const std::string& s) {
  if (s == "auto") return BlockSolverKind::Auto;
  if (s == "analytic") return BlockSolverKind::Analytic;
  if (s == "spfw") return BlockSolverKind::FrankWolfe;
  if (s == "extragradient") return BlockSolverKind::Extragradient;
  throw ArgumentError("unknown block solver '" + s + "'");
}

enum class InitMode { Zeros, UniformProjected };

struct SolverConfig {
  double rho_a = 1.0;
  double rho_b = 1.0;
  double eps_primal = tol::eps_primal;
  double eps_dual = tol::eps_dual;
  std::size_t max_iters = 1000;
  BlockSolverKind block_solver = BlockSolverKind::Auto;
  double block_solver_tol = tol::block_solver;
  std::size_t block_solver_max_iters = tol::block_solver_max_iters;
  bool warm_start = true;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  InitMode init = InitMode::Zeros;
  // Gap bracket every gap_every iterations (0 disables).
  std::size_t gap_every = 0;
  double best_response_tol = tol::best_response;
  // Wall-clock budget in seconds (0 = unlimited).
  double time_budget_s = 0.0;

  void validate() const {
    if (!(rho_a > 0.0) || !(rho_b > 0.0)) throw ArgumentError("solver config: rho_a and rho_b must be > 0");
    if (!(eps_primal > 0.0) || !(eps_dual > 0.0)) throw ArgumentError("solver config: tolerances must be > 0");
    if (max_iters == 0) throw ArgumentError("solver config: max_iters must be positive");
    if (!(block_solver_tol > 0.0)) throw ArgumentError("solver config: block_solver_tol must be > 0");
  }
};

// Σ_i f_i(x_{a,i}, x_{b,i}), accumulated in ascending block order.
inline double total_objective(const SaddleProblem& p, const Vector& x_a, const Vector& x_b) {
  require_size(x_a, p.dim_a(), "total_objective: x_a");
  require_size(x_b, p.dim_b(), "total_objective: x_b");
  double s = 0.0;
  for (std::size_t i = 0; i < p.num_blocks(); ++i) s += p.block(i).value(p.slice_a(x_a, i), p.slice_b(x_b, i));
  return s;
}

// Stacked gradients of the total objective.
inline void total_gradient(const SaddleProblem& p, const Vector& x_a, const Vector& x_b, Vector& g_a, Vector& g_b) {
  g_a.resize(p.dim_a());
  g_b.resize(p.dim_b());
  for (std::size_t i = 0; i < p.num_blocks(); ++i) {
    const BlockDims d = p.block(i).dims();
    Vector gx(d.a), gy(d.b);
    p.block(i).gradient(p.slice_a(x_a, i), p.slice_b(x_b, i), gx, gy);
    g_a.segment(p.offset_a(i), d.a) = gx;
    g_b.segment(p.offset_b(i), d.b) = gy;
  }
}

namespace detail {

inline void require_state(const SaddleProblem& p, const IterateState& s) {
  require_size(s.x_a, p.dim_a(), "state x_a");
  require_size(s.z_a, p.dim_a(), "state z_a");
  require_size(s.lam_a, p.dim_a(), "state lam_a");
  require_size(s.x_b, p.dim_b(), "state x_b");
  require_size(s.z_b, p.dim_b(), "state z_b");
  require_size(s.lam_b, p.dim_b(), "state lam_b");
}

}  // namespace detail

// Lagrangian with indicator terms. A violated minimizer-side indicator maps
// to +inf and a violated maximizer-side indicator to -inf; both at once is NaN.
inline double lagrangian(const SaddleProblem& p, const IterateState& s) {
  detail::require_state(p, s);
  bool min_infeasible = !p.global_a().contains(s.z_a);
  bool max_infeasible = p.has_maximizer() && !p.global_b().contains(s.z_b);
  for (std::size_t i = 0; i < p.num_blocks(); ++i) {
    min_infeasible = min_infeasible || !p.local_a(i).contains(p.slice_a(s.x_a, i));
    max_infeasible = max_infeasible || !p.local_b(i).contains(p.slice_b(s.x_b, i));
  }
  if (min_infeasible && max_infeasible) return std::numeric_limits<double>::quiet_NaN();
  if (min_infeasible) return kInf;
  if (max_infeasible) return -kInf;
  return total_objective(p, s.x_a, s.x_b) + dot(s.lam_a, s.x_a - s.z_a) - dot(s.lam_b, s.x_b - s.z_b);
}

inline double augmented_lagrangian(const SaddleProblem& p, const IterateState& s, double rho_a, double rho_b) {
  const double L = lagrangian(p, s);
  if (!std::isfinite(L)) return L;
  return L + 0.5 * rho_a * squared_norm(s.x_a - s.z_a) - 0.5 * rho_b * squared_norm(s.x_b - s.z_b);
}

inline double augmented_lagrangian(const SaddleProblem& p, const IterateState& s, const SolverConfig& cfg) {
  return augmented_lagrangian(p, s, cfg.rho_a, cfg.rho_b);
}

}  // namespace spadmm
