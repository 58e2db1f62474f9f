#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>

#include "spadmm/constants.hpp"
#include "spadmm/convex_set.hpp"
#include "spadmm/error.hpp"
#include "spadmm/linalg.hpp"
#include "spadmm/problem.hpp"

namespace spadmm {

struct BestResponse {
  Vector point;
  double value = 0.0;
  // ‖x − P(x − ∇F(x))‖ at the returned point.
  double stationarity = 0.0;
  std::size_t iterations = 0;
};

// Projected gradient with Armijo backtracking for  min_{x in set} F(x).
// The trial step doubles after every accepted step; stationarity is always
// measured with a unit step so step growth cannot fake convergence.
inline BestResponse projected_gradient_descent(const ConvexSet& set, const std::function<double(const Vector&)>& F,
                                               const std::function<Vector(const Vector&)>& grad, Vector x,
                                               double tol, std::size_t max_iters = tol::best_response_max_iters) {
  x = set.project(x);
  double fx = F(x);
  double step = 1.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    const Vector g = grad(x);
    if (!all_finite(g)) throw NumericError("best response: non-finite gradient");
    const double stationarity = distance(x, set.project(x - g));
    if (stationarity <= tol) return {x, fx, stationarity, it};

    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings) {
      const Vector trial = set.project(x - step * g);
      const double ft = F(trial);
      if (ft <= fx + tol::armijo_c * dot(g, trial - x)) {
        accepted = distance(trial, x) > 0.0;
        x = trial;
        fx = ft;
        break;
      }
      step *= tol::armijo_beta;
    }
    if (!accepted) {
      // Line search stalled at rounding level: no representable descent left.
      return {x, fx, distance(x, set.project(x - grad(x))), it};
    }
    step = std::min(step * 2.0, tol::armijo_max_step);
  }
  throw ConvergenceError("best response: iteration cap reached", distance(x, set.project(x - grad(x))));
}

// Minimizer's best response to a fixed maximizer action over its full feasible set.
inline BestResponse best_response_min(const SaddleProblem& p, const Vector& y_fixed, double tol = tol::best_response,
                                      std::optional<Vector> start = std::nullopt) {
  require_size(y_fixed, p.dim_b(), "best_response_min: y");
  const auto F = [&](const Vector& x) { return total_objective(p, x, y_fixed); };
  const auto grad = [&](const Vector& x) {
    Vector ga, gb;
    total_gradient(p, x, y_fixed, ga, gb);
    return ga;
  };
  Vector x0 = start && start->size() == p.dim_a() ? *start : p.feasible_a().witness();
  return projected_gradient_descent(p.feasible_a(), F, grad, std::move(x0), tol);
}

// Maximizer's best response; the returned value is the (maximized) objective.
inline BestResponse best_response_max(const SaddleProblem& p, const Vector& x_fixed, double tol = tol::best_response,
                                      std::optional<Vector> start = std::nullopt) {
  require_size(x_fixed, p.dim_a(), "best_response_max: x");
  const auto F = [&](const Vector& y) { return -total_objective(p, x_fixed, y); };
  const auto grad = [&](const Vector& y) {
    Vector ga, gb;
    total_gradient(p, x_fixed, y, ga, gb);
    return Vector(-gb);
  };
  Vector y0 = start && start->size() == p.dim_b() ? *start : p.feasible_b().witness();
  BestResponse r = projected_gradient_descent(p.feasible_b(), F, grad, std::move(y0), tol);
  r.value = -r.value;
  return r;
}

// Running extremes l^k = max_j lower_j and u^k = min_j upper_j.
struct GapState {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  // Previous best responses, reused as warm starts.
  std::optional<Vector> last_min_response;
  std::optional<Vector> last_max_response;
};

struct GapBracket {
  double lower = 0.0;           // running l^k
  double upper = 0.0;           // running u^k
  double current_lower = 0.0;   // Σf(best_response_min(z_b), z_b)
  double current_upper = 0.0;   // Σf(z_a, best_response_max(z_a))

  double gap() const { return upper - lower; }
};

inline GapBracket gap_bracket(const SaddleProblem& p, const Vector& z_a, const Vector& z_b, GapState& running,
                              double tol = tol::best_response) {
  const BestResponse rmin = best_response_min(p, z_b, tol, running.last_min_response);
  const BestResponse rmax = best_response_max(p, z_a, tol, running.last_max_response);
  running.last_min_response = rmin.point;
  running.last_max_response = rmax.point;
  running.lower = std::max(running.lower, rmin.value);
  running.upper = std::min(running.upper, rmax.value);
  return {running.lower, running.upper, rmin.value, rmax.value};
}

// ‖λa−λa*‖²/ρa + ‖λb−λb*‖²/ρb + ρa‖za−za*‖² + ρb‖zb−zb*‖²
inline double value_function(const IterateState& s, const IterateState& ref, double rho_a, double rho_b) {
  require_size(s.lam_a, ref.lam_a.size(), "value_function: lam_a");
  require_size(s.lam_b, ref.lam_b.size(), "value_function: lam_b");
  require_size(s.z_a, ref.z_a.size(), "value_function: z_a");
  require_size(s.z_b, ref.z_b.size(), "value_function: z_b");
  return squared_norm(s.lam_a - ref.lam_a) / rho_a + squared_norm(s.lam_b - ref.lam_b) / rho_b +
         rho_a * squared_norm(s.z_a - ref.z_a) + rho_b * squared_norm(s.z_b - ref.z_b);
}

inline double value_function(const IterateState& s, const IterateState& ref, const SolverConfig& cfg) {
  return value_function(s, ref, cfg.rho_a, cfg.rho_b);
}

struct SaddleCertificate {
  double lower = 0.0;
  double upper = 0.0;
  double gap = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// Brackets the saddle value at a feasible pair by best responses:
//   Σf(x*(x_b), x_b) <= value <= Σf(x_a, y*(x_a)).
inline SaddleCertificate saddle_certificate(const SaddleProblem& p, const Vector& x_a, const Vector& x_b, double tol,
                                            double br_tol = tol::best_response) {
  GapState st;
  const GapBracket g = gap_bracket(p, x_a, x_b, st, br_tol);
  return {g.lower, g.upper, g.gap(), tol, g.gap() <= tol};
}

}  // namespace spadmm
