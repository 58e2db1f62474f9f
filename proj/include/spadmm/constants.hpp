#pragma once

#include <cstddef>
#include <limits>

namespace spadmm {

// Numerical tolerances shared by every module.
namespace tol {

inline constexpr double membership = 1e-9;
inline constexpr double redundant_row = 1e-10;

inline constexpr double dykstra_change = 1e-10;
inline constexpr std::size_t dykstra_max_cycles = 10000;

inline constexpr double lp_feasibility = 1e-9;
inline constexpr double lp_optimality = 1e-9;
inline constexpr std::size_t lp_max_pivots = 1000000;

inline constexpr double block_solver = 1e-8;
inline constexpr std::size_t block_solver_max_iters = 10000;

inline constexpr double best_response = 1e-7;
inline constexpr std::size_t best_response_max_iters = 50000;
inline constexpr double armijo_beta = 0.5;
inline constexpr double armijo_c = 1e-4;
// large trial steps push projections of linear objectives far out
inline constexpr double armijo_max_step = 100.0;

inline constexpr double eps_primal = 1e-6;
inline constexpr double eps_dual = 1e-6;

}  // namespace tol

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace spadmm
