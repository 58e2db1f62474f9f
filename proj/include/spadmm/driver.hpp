#pragma once

#include <chrono>
#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spadmm/block_solvers.hpp"
#include "spadmm/constants.hpp"
#include "spadmm/diagnostics.hpp"
#include "spadmm/error.hpp"
#include "spadmm/linalg.hpp"
#include "spadmm/parallel.hpp"
#include "spadmm/problem.hpp"

namespace spadmm {

struct Residuals {
  Vector r_a, r_b;  // x − z
  Vector s_a, s_b;  // ρ (z^k − z^{k−1})
  double r_a_norm = 0.0, r_b_norm = 0.0, s_a_norm = 0.0, s_b_norm = 0.0;

  double primal() const { return r_a_norm + r_b_norm; }
  double dual() const { return s_a_norm + s_b_norm; }
  double total() const { return primal() + dual(); }
};

struct TraceRecord {
  std::size_t k = 0;
  double ra = 0.0, rb = 0.0, sa = 0.0, sb = 0.0;
  double total_residual = 0.0;
  double objective = 0.0;
  std::optional<double> gap_lower, gap_upper;
  double wall_time = 0.0;
  // Worst block-solver accuracy of the step (see BlockSolution::residual).
  double block_residual = 0.0;
};

enum class Termination { Converged, IterationCap, TimeBudget, Error };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::IterationCap:
      return "iteration-cap";
    case Termination::TimeBudget:
      return "time-budget";
    case Termination::Error:
      return "error";
  }
  return "?";
}

struct SolveResult {
  IterateState state;
  std::vector<TraceRecord> trace;
  Termination termination = Termination::IterationCap;
  std::string error;
};

struct StepResult {
  IterateState state;
  Residuals residuals;
  double block_residual = 0.0;
};

// zeros: x = 0, z = P(0), λ = 0.
// uniform-projected: x = z = P(uniform distribution over coordinates), λ = 0.
inline IterateState initialize(const SaddleProblem& p, InitMode mode) {
  const Index na = p.dim_a(), nb = p.dim_b();
  IterateState s;
  s.lam_a = Vector::Zero(na);
  s.lam_b = Vector::Zero(nb);
  if (mode == InitMode::Zeros) {
    s.x_a = Vector::Zero(na);
    s.x_b = Vector::Zero(nb);
    s.z_a = p.global_a().project(s.x_a);
    s.z_b = p.global_b().project(s.x_b);
  } else {
    s.x_a = p.global_a().project(Vector::Constant(na, 1.0 / static_cast<double>(std::max<Index>(na, 1))));
    s.x_b = p.global_b().project(Vector::Constant(nb, 1.0 / static_cast<double>(std::max<Index>(nb, 1))));
    s.z_a = s.x_a;
    s.z_b = s.x_b;
  }
  return s;
}

namespace detail {

[[noreturn]] inline void rethrow_with_block(std::size_t i) {
  const std::string where = "block " + std::to_string(i) + ": ";
  try {
    throw;
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(where + e.what(), e.residual());
  } catch (const UnsupportedError& e) {
    throw UnsupportedError(where + e.what());
  } catch (const NumericError& e) {
    throw NumericError(where + e.what());
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(where + e.what());
  } catch (const ArgumentError& e) {
    throw ArgumentError(where + e.what());
  }
}

}  // namespace detail

// One SP-ADMM iteration: block saddle solves, projection of x_a + λa/ρa onto
// the minimizer's global set, then of x_b + λb/ρb onto the maximizer's, then
// the two dual ascent/descent updates.
inline StepResult spadmm_step(const SaddleProblem& p, const IterateState& s, const SolverConfig& cfg) {
  cfg.validate();
  detail::require_state(p, s);
  const std::size_t N = p.num_blocks();

  StepResult out;
  IterateState& next = out.state;
  next.x_a.resize(p.dim_a());
  next.x_b.resize(p.dim_b());
  std::vector<double> block_residual(N, 0.0);

  parallel_for(N, cfg.workers, [&](std::size_t i) {
    BlockSubproblem sp;
    sp.objective = &p.block(i);
    sp.z_a = p.slice_a(s.z_a, i);
    sp.z_b = p.slice_b(s.z_b, i);
    sp.lam_a = p.slice_a(s.lam_a, i);
    sp.lam_b = p.slice_b(s.lam_b, i);
    sp.rho_a = cfg.rho_a;
    sp.rho_b = cfg.rho_b;
    sp.local_a = &p.local_a(i);
    sp.local_b = &p.local_b(i);
    if (cfg.warm_start) {
      sp.start_a = p.slice_a(s.x_a, i);
      sp.start_b = p.slice_b(s.x_b, i);
    }
    try {
      BlockSolution sol = solve_block(sp, cfg.block_solver, cfg.block_solver_tol, cfg.block_solver_max_iters,
                                      cfg.seed + static_cast<std::uint64_t>(i));
      next.x_a.segment(p.offset_a(i), sol.x_a.size()) = sol.x_a;
      next.x_b.segment(p.offset_b(i), sol.x_b.size()) = sol.x_b;
      block_residual[i] = sol.residual;
    } catch (...) {
      detail::rethrow_with_block(i);
    }
  });

  next.z_a = p.global_a().project(next.x_a + s.lam_a / cfg.rho_a);
  next.z_b = p.has_maximizer() ? p.global_b().project(next.x_b + s.lam_b / cfg.rho_b) : Vector(0);
  next.lam_a = s.lam_a + cfg.rho_a * (next.x_a - next.z_a);
  next.lam_b = s.lam_b + cfg.rho_b * (next.x_b - next.z_b);
  next.k = s.k + 1;

  Residuals& r = out.residuals;
  r.r_a = next.x_a - next.z_a;
  r.r_b = next.x_b - next.z_b;
  r.s_a = cfg.rho_a * (next.z_a - s.z_a);
  r.s_b = cfg.rho_b * (next.z_b - s.z_b);
  r.r_a_norm = norm(r.r_a);
  r.r_b_norm = norm(r.r_b);
  r.s_a_norm = norm(r.s_a);
  r.s_b_norm = norm(r.s_b);
  for (double v : block_residual) out.block_residual = std::max(out.block_residual, v);
  return out;
}

using TraceObserver = std::function<void(const TraceRecord&, const IterateState&)>;

namespace detail {

inline SolveResult run_admm_loop(const SaddleProblem& p, const SolverConfig& cfg, IterateState state,
                                 const TraceObserver& observer) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  SolveResult result;
  GapState gap_state;
  const bool track_gap = cfg.gap_every > 0 && p.has_maximizer();
  result.termination = Termination::IterationCap;
  try {
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
      StepResult step = spadmm_step(p, state, cfg);
      state = std::move(step.state);
      const Residuals& r = step.residuals;
      TraceRecord rec;
      rec.k = state.k;
      rec.ra = r.r_a_norm;
      rec.rb = r.r_b_norm;
      rec.sa = r.s_a_norm;
      rec.sb = r.s_b_norm;
      rec.total_residual = r.total();
      rec.objective = total_objective(p, state.z_a, state.z_b);
      rec.block_residual = step.block_residual;

      const bool converged = r.primal() <= cfg.eps_primal && r.dual() <= cfg.eps_dual;
      const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
      const bool out_of_time = cfg.time_budget_s > 0.0 && elapsed >= cfg.time_budget_s;
      const bool last = converged || out_of_time || it + 1 == cfg.max_iters;
      if (track_gap && (state.k % cfg.gap_every == 0 || last)) {
        const GapBracket g = gap_bracket(p, state.z_a, state.z_b, gap_state, cfg.best_response_tol);
        rec.gap_lower = g.lower;
        rec.gap_upper = g.upper;
      }
      rec.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
      result.trace.push_back(rec);
      if (observer) observer(rec, state);
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
  result.state = std::move(state);
  return result;
}

}  // namespace detail

// Iterates spadmm_step until the primal and dual residual tests pass,
// max_iters is reached, or the wall-clock budget runs out. Errors end the
// run with Termination::Error and the partial trace.
inline SolveResult solve(const SaddleProblem& p, const SolverConfig& cfg, const TraceObserver& observer = {}) {
  cfg.validate();
  return detail::run_admm_loop(p, cfg, initialize(p, cfg.init), observer);
}

inline SolveResult solve_from(const SaddleProblem& p, const SolverConfig& cfg, IterateState start,
                              const TraceObserver& observer = {}) {
  cfg.validate();
  detail::require_state(p, start);
  return detail::run_admm_loop(p, cfg, std::move(start), observer);
}

// Standard ADMM for problems without maximizer variables.
inline SolveResult admm_minimize(const SaddleProblem& p, const SolverConfig& cfg, const TraceObserver& observer = {}) {
  if (p.has_maximizer()) throw ArgumentError("admm_minimize: problem has maximizer variables");
  return solve(p, cfg, observer);
}

}  // namespace spadmm
