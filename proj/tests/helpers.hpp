#pragma once

#include <memory>
#include <vector>

#include "spadmm/spadmm.hpp"

namespace testing_helpers {

using namespace spadmm;

inline RoutingGraph cycle_graph(int n) {
  RoutingGraph g;
  g.n_nodes = n;
  for (int i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n);
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

// Feasible point of a polyhedral set as a random convex combination of LMO vertices.
inline Vector random_feasible(const ConvexSet& set, Rng& rng, int vertices = 4) {
  Vector w = Vector::Zero(set.dim());
  double total = 0.0;
  for (int v = 0; v < vertices; ++v) {
    const double weight = rng.uniform() + 1e-3;
    w += weight * lmo(set, rng.uniform_vector(set.dim(), -1.0, 1.0));
    total += weight;
  }
  return w / total;
}

struct OwnedSubproblem {
  std::shared_ptr<BlockObjective> objective;
  ConvexSet local_a = ConvexSet::box(1, -1.0, 1.0);
  ConvexSet local_b = ConvexSet::box(1, -1.0, 1.0);
  BlockSubproblem sp;

  OwnedSubproblem() = default;
  OwnedSubproblem(const OwnedSubproblem&) = delete;
  OwnedSubproblem& operator=(const OwnedSubproblem&) = delete;

  void bind() {
    sp.objective = objective.get();
    sp.local_a = &local_a;
    sp.local_b = &local_b;
  }
};

inline std::unique_ptr<OwnedSubproblem> random_bilinear_subproblem(Rng& rng) {
  auto o = std::make_unique<OwnedSubproblem>();
  o->objective = std::make_shared<BilinearQuadratic>(rng.uniform(0.0, 2.0), rng.uniform(-2.0, 2.0),
                                                     rng.uniform(0.0, 2.0), rng.uniform(-1.0, 1.0),
                                                     rng.uniform(-1.0, 1.0));
  o->sp.z_a = rng.uniform_vector(1, -1.5, 1.5);
  o->sp.z_b = rng.uniform_vector(1, -1.5, 1.5);
  o->sp.lam_a = rng.uniform_vector(1, -2.0, 2.0);
  o->sp.lam_b = rng.uniform_vector(1, -2.0, 2.0);
  o->sp.rho_a = rng.uniform(0.2, 3.0);
  o->sp.rho_b = rng.uniform(0.2, 3.0);
  o->bind();
  return o;
}

}  // namespace testing_helpers
