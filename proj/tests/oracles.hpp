#pragma once

// Reference computations used by the tests. None of these call into the
// library's solvers or projections.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Grid min-max for a scalar saddle function on [xlo,xhi]×[ylo,yhi]:
// x* = argmin_x max_y f, y* = argmax_y min_x f.
struct GridSaddle {
  double x = 0.0, y = 0.0;
};

inline GridSaddle grid_saddle(const std::function<double(double, double)>& f, double xlo, double xhi, double ylo,
                              double yhi, double step) {
  const int nx = static_cast<int>(std::round((xhi - xlo) / step));
  const int ny = static_cast<int>(std::round((yhi - ylo) / step));
  std::vector<double> row_max(static_cast<std::size_t>(nx + 1), -std::numeric_limits<double>::infinity());
  std::vector<double> col_min(static_cast<std::size_t>(ny + 1), std::numeric_limits<double>::infinity());
  for (int i = 0; i <= nx; ++i) {
    const double x = xlo + (xhi - xlo) * i / nx;
    for (int j = 0; j <= ny; ++j) {
      const double v = f(x, ylo + (yhi - ylo) * j / ny);
      row_max[static_cast<std::size_t>(i)] = std::max(row_max[static_cast<std::size_t>(i)], v);
      col_min[static_cast<std::size_t>(j)] = std::min(col_min[static_cast<std::size_t>(j)], v);
    }
  }
  const auto bi = std::min_element(row_max.begin(), row_max.end()) - row_max.begin();
  const auto bj = std::max_element(col_min.begin(), col_min.end()) - col_min.begin();
  return {xlo + (xhi - xlo) * static_cast<double>(bi) / nx, ylo + (yhi - ylo) * static_cast<double>(bj) / ny};
}

// min c·x  s.t. Ax = b, lower <= x <= upper (all bounds finite) by trying
// every basis and every bound assignment of the nonbasic variables.
struct VertexResult {
  bool feasible = false;
  double value = std::numeric_limits<double>::infinity();
  Vec x;
};

inline VertexResult enumerate_vertices(const Vec& c, const Mat& A, const Vec& b, const Vec& lower, const Vec& upper,
                                       double tol = 1e-9) {
  const int n = static_cast<int>(c.size()), m = static_cast<int>(A.rows());
  VertexResult best;
  std::vector<int> pick(static_cast<std::size_t>(n), 0);
  std::fill(pick.end() - m, pick.end(), 1);
  do {
    std::vector<int> basic, nonbasic;
    for (int j = 0; j < n; ++j) (pick[static_cast<std::size_t>(j)] ? basic : nonbasic).push_back(j);
    Mat B(m, m);
    for (int k = 0; k < m; ++k) B.col(k) = A.col(basic[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Mat> lu(B);
    if (m > 0 && !lu.isInvertible()) continue;
    const int nn = static_cast<int>(nonbasic.size());
    for (long mask = 0; mask < (1L << nn); ++mask) {
      Vec x(n);
      Vec rhs = b;
      for (int k = 0; k < nn; ++k) {
        const int j = nonbasic[static_cast<std::size_t>(k)];
        x[j] = (mask >> k) & 1 ? upper[j] : lower[j];
        rhs -= A.col(j) * x[j];
      }
      if (m > 0) {
        const Vec xb = lu.solve(rhs);
        for (int k = 0; k < m; ++k) x[basic[static_cast<std::size_t>(k)]] = xb[k];
      }
      bool ok = true;
      for (int j = 0; j < n && ok; ++j) ok = x[j] >= lower[j] - tol && x[j] <= upper[j] + tol;
      if (!ok) continue;
      const double v = c.dot(x);
      if (v < best.value) best = {true, v, x};
    }
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

inline Vec central_difference(const std::function<double(const Vec&)>& f, const Vec& x, double rel_h = 1e-6) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_h * std::max(1.0, std::abs(x[i]));
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// Euclidean projection onto {Σx = total, x >= 0} in 2 or 3 dimensions by
// scanning a grid over the simplex.
inline Vec simplex_projection_grid(const Vec& v, double total, int steps) {
  Vec best;
  double best_d = std::numeric_limits<double>::infinity();
  const double h = total / steps;
  if (v.size() == 2) {
    for (int i = 0; i <= steps; ++i) {
      Vec w(2);
      w << i * h, total - i * h;
      const double d = (w - v).squaredNorm();
      if (d < best_d) best_d = d, best = w;
    }
  } else {
    for (int i = 0; i <= steps; ++i)
      for (int j = 0; i + j <= steps; ++j) {
        Vec w(3);
        w << i * h, j * h, total - (i + j) * h;
        const double d = (w - v).squaredNorm();
        if (d < best_d) best_d = d, best = w;
      }
  }
  return best;
}

// min ‖x − c‖² over {Ax = b, lower <= x <= upper} via accelerated ascent on the
// dual function g(μ) = min_{box} ‖x − c‖² + μ·(Ax − b), whose minimizer is
// x(μ) = clip(c − Aᵀμ/2).
inline Vec box_affine_projection_dual(const Vec& c, const Mat& A, const Vec& b, const Vec& lower, const Vec& upper,
                                      int iters = 200000) {
  const double L = A.operatorNorm() * A.operatorNorm() / 2.0;
  auto primal = [&](const Vec& mu) { return Vec((c - 0.5 * A.transpose() * mu).cwiseMax(lower).cwiseMin(upper)); };
  Vec mu = Vec::Zero(A.rows()), prev = mu;
  for (int k = 1; k <= iters; ++k) {
    const Vec look = mu + (static_cast<double>(k - 1) / (k + 2)) * (mu - prev);
    prev = mu;
    mu = look + (A * primal(look) - b) / L;
  }
  return primal(mu);
}

// Water-filling: max Σ log(1 + y_i / n_i) s.t. Σy = P, y >= 0, solved by
// bisection on the water level ν with y_i = max(0, ν − n_i).
inline Vec water_filling(const Vec& noise, double power) {
  double lo = noise.minCoeff(), hi = noise.maxCoeff() + power;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((mid - noise.array()).max(0.0).sum() > power ? hi : lo) = mid;
  }
  return (0.5 * (lo + hi) - noise.array()).max(0.0).matrix();
}

// L̂ written out term by term, for comparison with the library's version.
inline double augmented_lagrangian(double objective, const Vec& x_a, const Vec& z_a, const Vec& lam_a,
                                   const Vec& x_b, const Vec& z_b, const Vec& lam_b, double rho_a, double rho_b) {
  double v = objective;
  for (Eigen::Index i = 0; i < x_a.size(); ++i) {
    const double r = x_a[i] - z_a[i];
    v += lam_a[i] * r + rho_a / 2.0 * r * r;
  }
  for (Eigen::Index i = 0; i < x_b.size(); ++i) {
    const double r = x_b[i] - z_b[i];
    v -= lam_b[i] * r + rho_b / 2.0 * r * r;
  }
  return v;
}

}  // namespace oracle
