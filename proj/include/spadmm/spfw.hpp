#pragma once

#include <chrono>
#include <cstddef>
#include <exception>
#include <utility>

#include "spadmm/diagnostics.hpp"
#include "spadmm/driver.hpp"
#include "spadmm/lmo.hpp"
#include "spadmm/problem.hpp"

namespace spadmm {

struct SpfwOptions {
  std::size_t max_iters = 1000;
  // Gap bracket every trace_every iterations (0 disables).
  std::size_t trace_every = 10;
  // Stop once the Frank-Wolfe gap falls to this level.
  double fw_gap_tol = 1e-12;
  double time_budget_s = 0.0;
  double best_response_tol = tol::best_response;
  InitMode init = InitMode::UniformProjected;
};

inline double spfw_step_size(std::size_t k) { return 2.0 / (2.0 + static_cast<double>(k)); }

// Saddle-point Frank-Wolfe over the full feasible sets (global set with the
// local boxes folded in). Both players take their LMO step from the current
// pair simultaneously. Traces use the driver schema with residual columns
// zero-filled; block_residual holds the FW gap.
inline SolveResult spfw_solve(const SaddleProblem& p, const SpfwOptions& opt,
                              const TraceObserver& observer = {}) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (!p.has_maximizer()) throw ArgumentError("spfw_solve: problem has no maximizer variables");

  const ConvexSet& Xa = p.feasible_a();
  const ConvexSet& Xb = p.feasible_b();
  SolveResult result;
  IterateState& s = result.state;
  s.lam_a = Vector::Zero(p.dim_a());
  s.lam_b = Vector::Zero(p.dim_b());
  try {
    if (opt.init == InitMode::UniformProjected) {
      s.x_a = Xa.project(Vector::Constant(p.dim_a(), 1.0 / static_cast<double>(p.dim_a())));
      s.x_b = Xb.project(Vector::Constant(p.dim_b(), 1.0 / static_cast<double>(p.dim_b())));
    } else {
      s.x_a = Xa.project(Vector::Zero(p.dim_a()));
      s.x_b = Xb.project(Vector::Zero(p.dim_b()));
    }
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(std::string("spfw_solve: feasible intersection required: ") + e.what());
  }
  s.z_a = s.x_a;
  s.z_b = s.x_b;

  GapState gap_state;
  Vector ga, gb;
  result.termination = Termination::IterationCap;
  try {
    for (std::size_t k = 0; k < opt.max_iters; ++k) {
      total_gradient(p, s.x_a, s.x_b, ga, gb);
      if (!all_finite(ga) || !all_finite(gb)) throw NumericError("spfw_solve: non-finite gradient");
      const Vector sa = lmo(Xa, ga);
      const Vector sb = lmo(Xb, -gb);
      const double fw_gap = dot(ga, s.x_a - sa) + dot(gb, sb - s.x_b);
      const bool converged = fw_gap <= opt.fw_gap_tol;
      if (!converged) {
        const double step = spfw_step_size(k);
        s.x_a += step * (sa - s.x_a);
        s.x_b += step * (sb - s.x_b);
      }
      s.z_a = s.x_a;
      s.z_b = s.x_b;
      s.k = k + 1;

      TraceRecord rec;
      rec.k = s.k;
      rec.objective = total_objective(p, s.x_a, s.x_b);
      rec.block_residual = fw_gap;
      const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
      const bool out_of_time = opt.time_budget_s > 0.0 && elapsed >= opt.time_budget_s;
      const bool last = converged || out_of_time || k + 1 == opt.max_iters;
      if (opt.trace_every > 0 && (s.k % opt.trace_every == 0 || last)) {
        const GapBracket g = gap_bracket(p, s.x_a, s.x_b, gap_state, opt.best_response_tol);
        rec.gap_lower = g.lower;
        rec.gap_upper = g.upper;
      }
      rec.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
      result.trace.push_back(rec);
      if (observer) observer(rec, s);
      if (converged) {
        result.termination = Termination::Converged;
        break;
      }
      if (out_of_time) {
        result.termination = Termination::TimeBudget;
        break;
      }
    }
  } catch (const std::exception& e) {
    result.termination = Termination::Error;
    result.error = e.what();
  }
  return result;
}

}  // namespace spadmm
