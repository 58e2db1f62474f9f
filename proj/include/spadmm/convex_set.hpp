#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spadmm/constants.hpp"
#include "spadmm/error.hpp"
#include "spadmm/linalg.hpp"
#include "spadmm/lp.hpp"

namespace spadmm {

// Every supported set is a polyhedron  {E x = e, G x <= h, lower <= x <= upper}.
struct PolyhedralForm {
  Matrix E;
  Vector e;
  Matrix G;
  Vector h;
  Vector lower;
  Vector upper;

  Index dim() const { return lower.size(); }
};

// LP over a polyhedral form; inequality rows get nonnegative slack columns
// appended after the n original variables.
inline StandardFormLP to_standard_lp(const PolyhedralForm& P, const Vector& cost) {
  const Index n = P.dim();
  const Index me = P.E.rows();
  const Index mg = P.G.rows();
  StandardFormLP lp;
  lp.c = Vector::Zero(n + mg);
  lp.c.head(n) = cost;
  lp.A_eq = Matrix::Zero(me + mg, n + mg);
  lp.b_eq.resize(me + mg);
  if (me > 0) {
    lp.A_eq.block(0, 0, me, n) = P.E;
    lp.b_eq.head(me) = P.e;
  }
  if (mg > 0) {
    lp.A_eq.block(me, 0, mg, n) = P.G;
    lp.A_eq.block(me, n, mg, mg) = Matrix::Identity(mg, mg);
    lp.b_eq.tail(mg) = P.h;
  }
  lp.lower = Vector::Zero(n + mg);
  lp.upper = Vector::Constant(n + mg, kInf);
  lp.lower.head(n) = P.lower;
  lp.upper.head(n) = P.upper;
  return lp;
}

struct ProjectionStats {
  std::size_t cycles = 0;
  double last_change = 0.0;
  bool polished = false;
};

class ConvexSet {
 public:
  enum class Kind { Box, ScaledSimplex, Halfspace, AffineBox, Intersection };
  enum class Sense { LessEqual, GreaterEqual };

  struct BoxData {
    Vector lower;
    Vector upper;
  };
  struct SimplexData {
    double total;
    Index dim;
  };
  struct HalfspaceData {
    Vector a;
    double b;
    Sense sense;
  };
  struct AffineBoxData {
    Matrix A;
    Vector b;
    Vector lower;
    Vector upper;
  };
  struct IntersectionData {
    std::vector<ConvexSet> parts;
  };

  static ConvexSet box(Vector lower, Vector upper) {
    if (lower.size() != upper.size()) throw ArgumentError("box: bound dimensions differ");
    for (Index i = 0; i < lower.size(); ++i) {
      if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] == kInf || upper[i] == -kInf)
        throw ArgumentError("box: invalid bound at coordinate " + std::to_string(i));
      if (lower[i] > upper[i]) throw InfeasibleError("box: lower > upper at coordinate " + std::to_string(i));
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Box;
    impl->dim = lower.size();
    impl->data = BoxData{std::move(lower), std::move(upper)};
    return finish(std::move(impl));
  }

  static ConvexSet box(Index n, double lower, double upper) {
    return box(Vector::Constant(n, lower), Vector::Constant(n, upper));
  }

  static ConvexSet whole_space(Index n) { return box(n, -kInf, kInf); }

  static ConvexSet scaled_simplex(double total, Index dim) {
    if (!(total > 0.0) || !std::isfinite(total)) throw ArgumentError("scaled_simplex: total must be positive");
    if (dim < 1) throw ArgumentError("scaled_simplex: dimension must be positive");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::ScaledSimplex;
    impl->dim = dim;
    impl->data = SimplexData{total, dim};
    return finish(std::move(impl));
  }

  static ConvexSet halfspace(Vector a, double b, Sense sense) {
    if (norm(a) == 0.0 || !all_finite(a) || !std::isfinite(b))
      throw ArgumentError("halfspace: normal must be finite and nonzero");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Halfspace;
    impl->dim = a.size();
    impl->data = HalfspaceData{std::move(a), b, sense};
    return finish(std::move(impl));
  }

  static ConvexSet affine_box(Matrix A, Vector b, Vector lower, Vector upper) {
    const Index n = lower.size();
    if (upper.size() != n || A.cols() != n || A.rows() != b.size())
      throw ArgumentError("affine_box: inconsistent dimensions");
    if (!all_finite(b)) throw ArgumentError("affine_box: b must be finite");
    for (Index i = 0; i < n; ++i)
      if (lower[i] > upper[i]) throw InfeasibleError("affine_box: lower > upper at coordinate " + std::to_string(i));
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::AffineBox;
    impl->dim = n;
    impl->data = AffineBoxData{std::move(A), std::move(b), std::move(lower), std::move(upper)};
    return finish(std::move(impl));
  }

  static ConvexSet intersection(std::vector<ConvexSet> parts) {
    if (parts.empty()) throw ArgumentError("intersection: needs at least one set");
    const Index n = parts.front().dim();
    for (const auto& p : parts)
      if (p.dim() != n) throw ArgumentError("intersection: member dimensions differ");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Intersection;
    impl->dim = n;
    impl->data = IntersectionData{std::move(parts)};
    return finish(std::move(impl));
  }

  Kind kind() const { return impl_->kind; }
  Index dim() const { return impl_->dim; }
  const Vector& witness() const { return impl_->witness; }
  const PolyhedralForm& polyhedral_form() const { return impl_->form; }

  const BoxData& as_box() const { return std::get<BoxData>(impl_->data); }
  const SimplexData& as_simplex() const { return std::get<SimplexData>(impl_->data); }
  const HalfspaceData& as_halfspace() const { return std::get<HalfspaceData>(impl_->data); }
  const AffineBoxData& as_affine_box() const { return std::get<AffineBoxData>(impl_->data); }
  const IntersectionData& as_intersection() const { return std::get<IntersectionData>(impl_->data); }

  // Euclidean projection. Box, ScaledSimplex and Halfspace are closed form;
  // AffineBox and Intersection run Dykstra's method over their atomic pieces
  // and finish with an active-set solve whose KKT conditions are verified.
  Vector project(const Eigen::Ref<const Vector>& v, ProjectionStats* stats = nullptr) const {
    require_size(v, dim(), "project");
    switch (kind()) {
      case Kind::Box:
        return project_box(as_box(), v);
      case Kind::ScaledSimplex:
        return project_simplex(as_simplex().total, v);
      case Kind::Halfspace:
        return project_halfspace(as_halfspace(), v);
      case Kind::AffineBox:
      case Kind::Intersection:
        return project_dykstra(v, stats);
    }
    return v;
  }

  bool contains(const Eigen::Ref<const Vector>& v, double tol = tol::membership) const {
    if (v.size() != dim()) return false;
    switch (kind()) {
      case Kind::Box: {
        const auto& d = as_box();
        for (Index i = 0; i < v.size(); ++i)
          if (!(v[i] >= d.lower[i] - tol && v[i] <= d.upper[i] + tol)) return false;
        return true;
      }
      case Kind::ScaledSimplex: {
        double s = 0.0;
        for (Index i = 0; i < v.size(); ++i) {
          if (!(v[i] >= -tol)) return false;
          s += v[i];
        }
        return std::abs(s - as_simplex().total) <= tol;
      }
      case Kind::Halfspace: {
        const auto& d = as_halfspace();
        const double ax = dot(d.a, v);
        return d.sense == Sense::LessEqual ? ax <= d.b + tol : ax >= d.b - tol;
      }
      case Kind::AffineBox: {
        const auto& d = as_affine_box();
        for (Index i = 0; i < v.size(); ++i)
          if (!(v[i] >= d.lower[i] - tol && v[i] <= d.upper[i] + tol)) return false;
        for (Index r = 0; r < d.A.rows(); ++r) {
          double s = 0.0;
          for (Index j = 0; j < d.A.cols(); ++j) s += d.A(r, j) * v[j];
          if (std::abs(s - d.b[r]) > tol) return false;
        }
        return true;
      }
      case Kind::Intersection:
        for (const auto& p : as_intersection().parts)
          if (!p.contains(v, tol)) return false;
        return true;
    }
    return false;
  }

 private:
  // An affine subspace {A x = b} with redundant rows removed and a cached
  // Cholesky factor of A·Aᵀ.
  struct AffinePiece {
    Matrix A;
    Vector b;
    Eigen::LLT<Matrix> gram;

    Vector project(const Vector& v) const {
      if (A.rows() == 0) return v;
      const Vector resid = A * v - b;
      return v - A.transpose() * gram.solve(resid);
    }
  };

  struct Piece {
    Kind kind;
    const BoxData* box = nullptr;
    const SimplexData* simplex = nullptr;
    const HalfspaceData* halfspace = nullptr;
    const AffinePiece* affine = nullptr;

    Vector project(const Vector& v) const {
      switch (kind) {
        case Kind::Box:
          return project_box(*box, v);
        case Kind::ScaledSimplex:
          return project_simplex(simplex->total, v);
        case Kind::Halfspace:
          return project_halfspace(*halfspace, v);
        default:
          return affine->project(v);
      }
    }
  };

  struct Impl {
    Kind kind;
    Index dim = 0;
    std::variant<BoxData, SimplexData, HalfspaceData, AffineBoxData, IntersectionData> data;
    Vector witness;
    PolyhedralForm form;
    BoxData affine_box_bounds;
    // Only for AffineBox / Intersection.
    std::vector<std::shared_ptr<const AffinePiece>> affine_pieces;
    std::vector<Piece> pieces;
  };

  explicit ConvexSet(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  static Vector project_box(const BoxData& d, const Eigen::Ref<const Vector>& v) {
    Vector x(v.size());
    for (Index i = 0; i < v.size(); ++i) x[i] = std::clamp(v[i], d.lower[i], d.upper[i]);
    return x;
  }

  // Sort-and-threshold projection onto {x >= 0, Σx = total}.
  static Vector project_simplex(double total, const Eigen::Ref<const Vector>& v) {
    const Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (Index j = 0; j < n; ++j) {
      cumsum += u[static_cast<std::size_t>(j)];
      const double t = (cumsum - total) / static_cast<double>(j + 1);
      if (u[static_cast<std::size_t>(j)] - t > 0.0) theta = t;
    }
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = std::max(v[i] - theta, 0.0);
    return x;
  }

  static Vector project_halfspace(const HalfspaceData& d, const Eigen::Ref<const Vector>& v) {
    const double ax = dot(d.a, v);
    const bool violated = d.sense == Sense::LessEqual ? ax > d.b : ax < d.b;
    if (!violated) return v;
    return v - ((ax - d.b) / squared_norm(d.a)) * d.a;
  }

  static std::shared_ptr<const AffinePiece> make_affine_piece(const Matrix& A, const Vector& b) {
    auto piece = std::make_shared<AffinePiece>();
    if (A.rows() == 0) {
      piece->A = Matrix(0, A.cols());
      piece->b = Vector(0);
      return piece;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(A.transpose());
    qr.setThreshold(tol::redundant_row);
    const Index rank = qr.rank();
    std::vector<Index> keep;
    for (Index i = 0; i < rank; ++i) keep.push_back(qr.colsPermutation().indices()[i]);
    std::sort(keep.begin(), keep.end());
    piece->A.resize(static_cast<Index>(keep.size()), A.cols());
    piece->b.resize(static_cast<Index>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r) {
      piece->A.row(static_cast<Index>(r)) = A.row(keep[r]);
      piece->b[static_cast<Index>(r)] = b[keep[r]];
    }
    piece->gram.compute(piece->A * piece->A.transpose());
    return piece;
  }

  static void append_form(PolyhedralForm& f, const PolyhedralForm& g) {
    auto stack = [](const Matrix& X, const Matrix& Y) {
      Matrix Z(X.rows() + Y.rows(), X.cols());
      if (X.rows() > 0) Z.topRows(X.rows()) = X;
      if (Y.rows() > 0) Z.bottomRows(Y.rows()) = Y;
      return Z;
    };
    auto cat = [](const Vector& x, const Vector& y) {
      Vector z(x.size() + y.size());
      z << x, y;
      return z;
    };
    f.E = stack(f.E, g.E);
    f.e = cat(f.e, g.e);
    f.G = stack(f.G, g.G);
    f.h = cat(f.h, g.h);
    f.lower = f.lower.cwiseMax(g.lower);
    f.upper = f.upper.cwiseMin(g.upper);
  }

  static PolyhedralForm empty_form(Index n) {
    return {Matrix(0, n), Vector(0), Matrix(0, n), Vector(0), Vector::Constant(n, -kInf), Vector::Constant(n, kInf)};
  }

  static PolyhedralForm build_form(const Impl& impl) {
    const Index n = impl.dim;
    PolyhedralForm f = empty_form(n);
    switch (impl.kind) {
      case Kind::Box: {
        const auto& d = std::get<BoxData>(impl.data);
        f.lower = d.lower;
        f.upper = d.upper;
        break;
      }
      case Kind::ScaledSimplex: {
        f.E = Matrix::Ones(1, n);
        f.e = Vector::Constant(1, std::get<SimplexData>(impl.data).total);
        f.lower = Vector::Zero(n);
        break;
      }
      case Kind::Halfspace: {
        const auto& d = std::get<HalfspaceData>(impl.data);
        const double s = d.sense == Sense::LessEqual ? 1.0 : -1.0;
        f.G = s * d.a.transpose();
        f.h = Vector::Constant(1, s * d.b);
        break;
      }
      case Kind::AffineBox: {
        const auto& d = std::get<AffineBoxData>(impl.data);
        f.E = d.A;
        f.e = d.b;
        f.lower = d.lower;
        f.upper = d.upper;
        break;
      }
      case Kind::Intersection:
        for (const auto& p : std::get<IntersectionData>(impl.data).parts) append_form(f, p.polyhedral_form());
        break;
    }
    return f;
  }

  static void collect_pieces(const ConvexSet& s, Impl& owner) {
    switch (s.kind()) {
      case Kind::Box:
        owner.pieces.push_back({Kind::Box, &s.as_box(), nullptr, nullptr, nullptr});
        break;
      case Kind::ScaledSimplex:
        owner.pieces.push_back({Kind::ScaledSimplex, nullptr, &s.as_simplex(), nullptr, nullptr});
        break;
      case Kind::Halfspace:
        owner.pieces.push_back({Kind::Halfspace, nullptr, nullptr, &s.as_halfspace(), nullptr});
        break;
      case Kind::AffineBox: {
        const auto& d = s.as_affine_box();
        auto piece = make_affine_piece(d.A, d.b);
        owner.affine_pieces.push_back(piece);
        owner.pieces.push_back({Kind::AffineBox, nullptr, nullptr, nullptr, piece.get()});
        owner.pieces.push_back({Kind::Box, &s.impl_->affine_box_bounds, nullptr, nullptr, nullptr});
        break;
      }
      case Kind::Intersection:
        for (const auto& p : s.as_intersection().parts) collect_pieces(p, owner);
        break;
    }
  }

  static ConvexSet finish(std::shared_ptr<Impl> impl) {
    if (impl->kind == Kind::AffineBox) {
      const auto& d = std::get<AffineBoxData>(impl->data);
      impl->affine_box_bounds = BoxData{d.lower, d.upper};
    }
    impl->form = build_form(*impl);
    // Lower bounds above upper bounds can only arise from intersecting boxes.
    for (Index i = 0; i < impl->dim; ++i)
      if (impl->form.lower[i] > impl->form.upper[i])
        throw InfeasibleError("convex set: empty (conflicting bounds at coordinate " + std::to_string(i) + ")");

    ConvexSet set(impl);
    if (impl->kind == Kind::AffineBox || impl->kind == Kind::Intersection) collect_pieces(set, *impl);

    switch (impl->kind) {
      case Kind::Box:
        impl->witness = project_box(std::get<BoxData>(impl->data), Vector::Zero(impl->dim));
        break;
      case Kind::ScaledSimplex: {
        const auto& d = std::get<SimplexData>(impl->data);
        impl->witness = Vector::Constant(d.dim, d.total / static_cast<double>(d.dim));
        break;
      }
      case Kind::Halfspace:
        impl->witness = project_halfspace(std::get<HalfspaceData>(impl->data), Vector::Zero(impl->dim));
        break;
      case Kind::AffineBox:
      case Kind::Intersection: {
        // Phase-1 LP: any vertex of the polyhedron is a witness.
        const auto lp = to_standard_lp(impl->form, Vector::Zero(impl->dim));
        const LpResult r = solve_lp(lp);
        if (r.status != LpStatus::Optimal) throw InfeasibleError("convex set: empty (phase-1 LP infeasible)");
        impl->witness = r.x.head(impl->dim);
        break;
      }
    }
    if (!set.contains(impl->witness, 1e-8)) throw InfeasibleError("convex set: no feasibility witness found");
    return set;
  }

  // Active-set solve for the projection of v given an approximate projection
  // x0. The guessed active set is refined a few times; returns true and
  // writes the exact projection once the KKT conditions hold.
  bool polish(const Vector& v, const Vector& x0, double active_tol, Vector& out) const {
    const PolyhedralForm& P = impl_->form;
    const Index n = dim();
    const Index me = P.E.rows();
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    const double kkt_tol = 1e-9 * scale;
    const double feas_tol = 1e-11 * scale;

    std::vector<int> fixed(static_cast<std::size_t>(n), 0);  // -1 lower, +1 upper
    for (Index j = 0; j < n; ++j) {
      if (std::isfinite(P.lower[j]) && x0[j] - P.lower[j] <= active_tol)
        fixed[static_cast<std::size_t>(j)] = -1;
      else if (std::isfinite(P.upper[j]) && P.upper[j] - x0[j] <= active_tol)
        fixed[static_cast<std::size_t>(j)] = 1;
    }
    std::vector<char> active(static_cast<std::size_t>(P.G.rows()), 0);
    for (Index i = 0; i < P.G.rows(); ++i) active[static_cast<std::size_t>(i)] = P.h[i] - P.G.row(i).dot(x0) <= active_tol;

    constexpr int kRounds = 30;
    for (int round = 0; round < kRounds; ++round) {
      Vector x = Vector::Zero(n);
      std::vector<Index> free_cols;
      for (Index j = 0; j < n; ++j) {
        const int f = fixed[static_cast<std::size_t>(j)];
        if (f < 0) x[j] = P.lower[j];
        else if (f > 0) x[j] = P.upper[j];
        else free_cols.push_back(j);
      }
      std::vector<Index> rows;
      for (Index i = 0; i < P.G.rows(); ++i)
        if (active[static_cast<std::size_t>(i)]) rows.push_back(i);

      const Index m = me + static_cast<Index>(rows.size());
      Matrix M(m, n);
      Vector r(m);
      if (me > 0) {
        M.topRows(me) = P.E;
        r.head(me) = P.e;
      }
      for (std::size_t k = 0; k < rows.size(); ++k) {
        M.row(me + static_cast<Index>(k)) = P.G.row(rows[k]);
        r[me + static_cast<Index>(k)] = P.h[rows[k]];
      }
      const Index nf = static_cast<Index>(free_cols.size());
      Matrix MF(m, nf);
      Vector vF(nf);
      for (Index k = 0; k < nf; ++k) {
        MF.col(k) = M.col(free_cols[static_cast<std::size_t>(k)]);
        vF[k] = v[free_cols[static_cast<std::size_t>(k)]];
      }
      Vector rhs = r;
      for (Index j = 0; j < n; ++j)
        if (fixed[static_cast<std::size_t>(j)] != 0) rhs -= M.col(j) * x[j];

      Vector mu = Vector::Zero(m);
      Vector xF = vF;
      if (m > 0 && nf > 0) {
        const Matrix gram = MF * MF.transpose();
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(gram);
        cod.setThreshold(1e-12);
        mu = cod.solve(MF * vF - rhs);
        xF = vF - MF.transpose() * mu;
      }
      // an inconsistent system means the guess pins too much; no cheap repair
      if (m > 0 && (MF * xF - rhs).cwiseAbs().maxCoeff() > feas_tol) return false;
      for (Index k = 0; k < nf; ++k) x[free_cols[static_cast<std::size_t>(k)]] = xF[k];

      bool changed = false;
      for (std::size_t k = 0; k < rows.size(); ++k)
        if (mu[me + static_cast<Index>(k)] < -kkt_tol) {
          active[static_cast<std::size_t>(rows[k])] = 0;
          changed = true;
        }
      const Vector stationarity = x - v + M.transpose() * mu;
      for (Index j = 0; j < n; ++j) {
        int& f = fixed[static_cast<std::size_t>(j)];
        if (f == 0) {
          if (x[j] < P.lower[j] - feas_tol) f = -1, changed = true;
          else if (x[j] > P.upper[j] + feas_tol) f = 1, changed = true;
        } else if (P.lower[j] < P.upper[j]) {
          if ((f < 0 && stationarity[j] < -kkt_tol) || (f > 0 && stationarity[j] > kkt_tol)) f = 0, changed = true;
        }
      }
      for (Index i = 0; i < P.G.rows(); ++i)
        if (!active[static_cast<std::size_t>(i)] && P.G.row(i).dot(x) > P.h[i] + feas_tol) {
          active[static_cast<std::size_t>(i)] = 1;
          changed = true;
        }
      if (!changed) {
        for (Index j = 0; j < n; ++j) x[j] = std::clamp(x[j], P.lower[j], P.upper[j]);
        out = std::move(x);
        return true;
      }
    }
    return false;
  }

  Vector project_dykstra(const Eigen::Ref<const Vector>& v_in, ProjectionStats* stats) const {
    const Vector v = v_in;
    const auto& pieces = impl_->pieces;
    const std::size_t K = pieces.size();
    std::vector<Vector> increments(K, Vector::Zero(dim()));
    Vector x = v;
    Vector out;
    std::size_t next_polish = 1;
    std::size_t polish_stride = 1;
    double change = kInf;
    for (std::size_t cycle = 1; cycle <= tol::dykstra_max_cycles; ++cycle) {
      const Vector start = x;
      double moved = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const Vector y = x + increments[k];
        x = pieces[k].project(y);
        const Vector inc = y - x;
        moved += (inc - increments[k]).squaredNorm();
        increments[k] = inc;
      }
      // x alone can stall for a cycle while the increments still move
      const double dx = distance(x, start);
      change = std::max(dx, std::sqrt(moved));
      const bool converged = change <= tol::dykstra_change && contains(x, 0.1 * tol::membership);
      if (converged || cycle == next_polish) {
        if (polish(v, x, std::max(1e-9, 10.0 * dx), out)) {
          if (stats) *stats = {cycle, change, true};
          return out;
        }
        polish_stride = std::min<std::size_t>(polish_stride * 2, 32);
        next_polish = cycle + polish_stride;
      }
      if (converged) {
        if (stats) *stats = {cycle, change, false};
        return x;
      }
    }
    throw ConvergenceError("project: Dykstra did not converge within cycle cap", change);
  }

  std::shared_ptr<const Impl> impl_;
};

}  // namespace spadmm
