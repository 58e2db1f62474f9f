#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spadmm/convex_set.hpp"
#include "spadmm/error.hpp"
#include "spadmm/objectives.hpp"
#include "spadmm/problem.hpp"
#include "spadmm/random.hpp"

namespace spadmm {

// ---------------------------------------------------------------------------
// Power allocation game: the maximizer spreads signal power over channels,
// the minimizer spreads jamming noise; payoff is the total capacity
//   Σ_i log(1 + y_i / (σ_i + x_i)).
// ---------------------------------------------------------------------------

struct PowerAllocationSpec {
  std::vector<double> sigma;
  double power_budget = 20.0;  // maximizer
  double noise_budget = 10.0;  // minimizer
};

inline PowerAllocationSpec default_power_allocation_spec() {
  return {{2, 6, 5, 8, 3, 9, 5, 6, 7, 3}, 20.0, 10.0};
}

inline constexpr double kPowerAllocationEquilibrium = 2.860;

inline SaddleProblem build_power_allocation(const PowerAllocationSpec& spec) {
  const Index n = static_cast<Index>(spec.sigma.size());
  if (n == 0) throw ArgumentError("power allocation: need at least one channel");
  if (!(spec.power_budget > 0.0) || !(spec.noise_budget > 0.0))
    throw ArgumentError("power allocation: budgets must be positive");
  std::vector<BlockPtr> blocks;
  std::vector<ConvexSet> local_a, local_b;
  for (double s : spec.sigma) {
    if (!(s > 0.0)) throw ArgumentError("power allocation: receiver noise sigma must be positive");
    blocks.push_back(std::make_shared<PowerCapacity>(s));
    local_a.push_back(ConvexSet::box(1, 0.0, spec.noise_budget));
    local_b.push_back(ConvexSet::box(1, 0.0, spec.power_budget));
  }
  return SaddleProblem(std::move(blocks), std::move(local_a), std::move(local_b),
                       ConvexSet::scaled_simplex(spec.noise_budget, n), ConvexSet::scaled_simplex(spec.power_budget, n));
}

// ---------------------------------------------------------------------------
// Network routing game on a deterministic MDP (a directed graph). Each
// player's variable is a stationary edge density: nonnegative, unit mass and
// flow-conserving at every node. The edge cost x_e (x_e + y_e) is minimized
// by x and maximized by the adversary y, whose density entering state 1
// (node 0) must be at least state1_min_density.
// ---------------------------------------------------------------------------

struct RoutingSpec {
  int n_nodes = 20;
  double expected_out_degree = 5.0;
  std::uint64_t seed = 0;
  double state1_min_density = 0.1;
};

struct RoutingGraph {
  int n_nodes = 0;
  // Sorted by (source, target); no self loops, no duplicates.
  std::vector<std::pair<int, int>> edges;
  bool repaired = false;
};

namespace detail {

inline bool reaches_all(const RoutingGraph& g, bool reverse) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n_nodes));
  for (auto [u, v] : g.edges) {
    if (reverse) std::swap(u, v);
    adj[static_cast<std::size_t>(u)].push_back(v);
  }
  std::vector<bool> seen(static_cast<std::size_t>(g.n_nodes), false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        stack.push_back(v);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace detail

inline bool strongly_connected(const RoutingGraph& g) {
  return g.n_nodes > 0 && detail::reaches_all(g, false) && detail::reaches_all(g, true);
}

// Directed Erdos-Renyi graph with edge probability expected_out_degree / n.
// If the draw is not strongly connected, a Hamiltonian cycle over a random
// node permutation is added.
inline RoutingGraph generate_routing_graph(const RoutingSpec& spec) {
  if (spec.n_nodes < 2) throw ArgumentError("routing: need at least two nodes");
  if (!(spec.expected_out_degree > 0.0)) throw ArgumentError("routing: expected out-degree must be positive");
  Rng rng(spec.seed);
  const double prob = std::min(1.0, spec.expected_out_degree / static_cast<double>(spec.n_nodes));
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::set<std::pair<int, int>> edges;
    for (int u = 0; u < spec.n_nodes; ++u)
      for (int v = 0; v < spec.n_nodes; ++v)
        if (u != v && rng.uniform() < prob) edges.emplace(u, v);
    RoutingGraph g{spec.n_nodes, {edges.begin(), edges.end()}, false};
    if (!strongly_connected(g)) {
      std::vector<int> perm(static_cast<std::size_t>(spec.n_nodes));
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
      for (std::size_t i = 0; i < perm.size(); ++i) edges.emplace(perm[i], perm[(i + 1) % perm.size()]);
      g = RoutingGraph{spec.n_nodes, {edges.begin(), edges.end()}, true};
    }
    bool every_node_has_out_edge = true;
    std::vector<int> out_degree(static_cast<std::size_t>(spec.n_nodes), 0);
    for (auto [u, v] : g.edges) ++out_degree[static_cast<std::size_t>(u)];
    for (int d : out_degree) every_node_has_out_edge = every_node_has_out_edge && d > 0;
    if (strongly_connected(g) && every_node_has_out_edge) return g;
  }
  throw Error("routing: graph generation failed after 100 attempts");
}

// {x : flow in = flow out at every node, Σx = 1, 0 <= x <= 1}
inline ConvexSet flow_polytope(const RoutingGraph& g) {
  const Index m = static_cast<Index>(g.edges.size());
  Matrix A = Matrix::Zero(g.n_nodes + 1, m);
  for (Index e = 0; e < m; ++e) {
    const auto [u, v] = g.edges[static_cast<std::size_t>(e)];
    A(v, e) += 1.0;
    A(u, e) -= 1.0;
    A(g.n_nodes, e) = 1.0;
  }
  Vector b = Vector::Zero(g.n_nodes + 1);
  b[g.n_nodes] = 1.0;
  return ConvexSet::affine_box(A, b, Vector::Zero(m), Vector::Ones(m));
}

inline SaddleProblem build_routing(const RoutingGraph& g, double state1_min_density = 0.1) {
  const Index m = static_cast<Index>(g.edges.size());
  if (m == 0) throw ArgumentError("routing: graph has no edges");
  std::vector<BlockPtr> blocks;
  std::vector<ConvexSet> local_a, local_b;
  // x(x + y) = (2/2)x² + 1·x·y
  const auto cost = std::make_shared<BilinearQuadratic>(2.0, 1.0, 0.0);
  for (Index e = 0; e < m; ++e) {
    blocks.push_back(cost);
    local_a.push_back(ConvexSet::box(1, 0.0, 1.0));
    local_b.push_back(ConvexSet::box(1, 0.0, 1.0));
  }
  const ConvexSet flows = flow_polytope(g);
  Vector into_state1 = Vector::Zero(m);
  for (Index e = 0; e < m; ++e)
    if (g.edges[static_cast<std::size_t>(e)].second == 0) into_state1[e] = 1.0;
  if (into_state1.sum() == 0.0) throw ArgumentError("routing: state 1 has no incoming edges");
  ConvexSet adversary = ConvexSet::intersection(
      {flows, ConvexSet::halfspace(into_state1, state1_min_density, ConvexSet::Sense::GreaterEqual)});
  return SaddleProblem(std::move(blocks), std::move(local_a), std::move(local_b), flows, adversary);
}

inline SaddleProblem build_routing(const RoutingSpec& spec) {
  return build_routing(generate_routing_graph(spec), spec.state1_min_density);
}

}  // namespace spadmm
