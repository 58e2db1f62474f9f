#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace spadmm;
using testing_helpers::cycle_graph;
using testing_helpers::random_feasible;

namespace {

StandardFormLP make_lp(Vector c, Matrix A, Vector b, Vector lower, Vector upper) {
  return {std::move(c), std::move(A), std::move(b), std::move(lower), std::move(upper)};
}

}  // namespace

TEST(SolveLp, TwoVariableSimplex) {
  Matrix A(1, 2);
  A << 1, 1;
  Vector c(2);
  c << 1, 0;
  const auto r = solve_lp(make_lp(c, A, Vector::Ones(1), Vector::Zero(2), Vector::Constant(2, kInf)));
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.x[0], 0.0, 1e-12);
  EXPECT_NEAR(r.x[1], 1.0, 1e-12);
  EXPECT_NEAR(r.value, 0.0, 1e-12);
}

TEST(SolveLp, BoundedVariables) {
  Matrix A(1, 2);
  A << 1, 1;
  Vector c(2);
  c << -1, -2;
  const auto r = solve_lp(make_lp(c, A, Vector::Ones(1), Vector::Zero(2), Vector::Ones(2)));
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.x[0], 0.0, 1e-12);
  EXPECT_NEAR(r.x[1], 1.0, 1e-12);
  EXPECT_NEAR(r.value, -2.0, 1e-12);
}

TEST(SolveLp, ReportsInfeasibleAndUnbounded) {
  Matrix A(1, 2);
  A << 1, 1;
  auto r = solve_lp(make_lp(Vector::Zero(2), A, Vector::Constant(1, 5.0), Vector::Zero(2), Vector::Ones(2)));
  EXPECT_EQ(r.status, LpStatus::Infeasible);
  Matrix B(1, 2);
  B << 1, -1;
  Vector c(2);
  c << -1, 0;
  r = solve_lp(make_lp(c, B, Vector::Zero(1), Vector::Zero(2), Vector::Constant(2, kInf)));
  EXPECT_EQ(r.status, LpStatus::Unbounded);
}

TEST(SolveLp, FreeAndNegativeBounds) {
  // min x0 + x1 with x0 free, x1 <= -1, x0 - x1 = 2, x0 >= -5
  Matrix A(1, 2);
  A << 1, -1;
  Vector c(2), lo(2), hi(2);
  c << 1, 1;
  lo << -5, -kInf;
  hi << kInf, -1;
  const auto r = solve_lp(make_lp(c, A, Vector::Constant(1, 2.0), lo, hi));
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.x[0], -5.0, 1e-12);
  EXPECT_NEAR(r.x[1], -7.0, 1e-12);
}

TEST(SolveLp, RedundantEqualities) {
  Matrix A(2, 3);
  A << 1, 1, 1, 2, 2, 2;
  Vector c(3);
  c << 3, 1, 2;
  Vector b(2);
  b << 1, 2;
  const auto r = solve_lp(make_lp(c, A, b, Vector::Zero(3), Vector::Constant(3, kInf)));
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(SolveLp, MatchesVertexEnumeration) {
  Rng rng(31);
  int compared = 0;
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + static_cast<int>(rng.index(4));        // 3..6 variables
    const int m = 1 + static_cast<int>(rng.index(std::min(4, n - 1)));  // 1..4 rows, m < n
    Matrix A(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
    Vector lower = Vector::Zero(n), upper(n);
    for (int j = 0; j < n; ++j) upper[j] = rng.uniform(0.5, 3.0);
    Vector x0(n);
    for (int j = 0; j < n; ++j) x0[j] = rng.uniform(0.0, upper[j]);
    const Vector b = A * x0;
    const Vector c = rng.uniform_vector(n, -1.0, 1.0);

    const auto r = solve_lp(make_lp(c, A, b, lower, upper));
    const auto ref = oracle::enumerate_vertices(c, A, b, lower, upper);
    ASSERT_TRUE(ref.feasible);
    ASSERT_EQ(r.status, LpStatus::Optimal) << "lp " << t;
    EXPECT_NEAR(r.value, ref.value, 1e-8) << "lp " << t;
    EXPECT_LE((A * r.x - b).lpNorm<Eigen::Infinity>(), 1e-9);
    EXPECT_GE(r.min_reduced_cost, -1e-8);
    // optimal against random feasible points
    for (int w = 0; w < 100; ++w) {
      Vector p(n);
      // points on segments between x0 and the optimum stay feasible
      const double s = rng.uniform();
      p = s * x0 + (1 - s) * r.x;
      EXPECT_LE(r.value, c.dot(p) + 1e-8);
    }
    ++compared;
  }
  EXPECT_EQ(compared, 20);
}

TEST(SolveLp, Deterministic) {
  const auto set = flow_polytope(generate_routing_graph({15, 5.0, 9, 0.1}));
  Rng rng(2);
  const Vector c = rng.uniform_vector(set.dim(), -1, 1);
  const auto lp = to_standard_lp(set.polyhedral_form(), c);
  const auto a = solve_lp(lp), b = solve_lp(lp);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.pivots, b.pivots);
}

TEST(Lmo, SimplexPutsMassOnCheapestCoordinate) {
  Vector c = Vector::Ones(10);
  c[3] = -1.0;
  const Vector x = lmo(ConvexSet::scaled_simplex(20.0, 10), c);
  EXPECT_EQ(x, 20.0 * Vector::Unit(10, 3));
}

TEST(Lmo, SimplexTieBreaksToLowestIndex) {
  Vector c = Vector::Ones(4);
  c[1] = c[2] = 0.0;
  EXPECT_EQ(lmo(ConvexSet::scaled_simplex(1.0, 4), c), Vector::Unit(4, 1));
}

TEST(Lmo, Box) {
  Vector c(2);
  c << -1, 1;
  const Vector x = lmo(ConvexSet::box(2, 0.0, 1.0), c);
  EXPECT_EQ(x[0], 1.0);
  EXPECT_EQ(x[1], 0.0);
  EXPECT_THROW(lmo(ConvexSet::whole_space(2), c), UnsupportedError);
}

TEST(Lmo, FlowPolytopeMatchesExplicitLp) {
  const auto g = cycle_graph(3);
  const auto set = flow_polytope(g);
  Rng rng(6);
  for (int t = 0; t < 10; ++t) {
    const Vector c = rng.uniform_vector(3, -1, 1);
    const Vector x = lmo(set, c);
    Matrix A(4, 3);
    A << -1, 0, 1, 1, -1, 0, 0, 1, -1, 1, 1, 1;
    Vector b = Vector::Zero(4);
    b[3] = 1;
    const auto r = solve_lp(make_lp(c, A, b, Vector::Zero(3), Vector::Ones(3)));
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(c.dot(x), r.value, 1e-12);
    EXPECT_TRUE(set.contains(x, 1e-8));
  }
}

TEST(Lmo, ResultIsFeasibleAndOptimal) {
  const auto p = build_routing(generate_routing_graph({20, 5.0, 5, 0.1}));
  Rng rng(8);
  for (const ConvexSet* set : {&p.global_a(), &p.global_b()}) {
    for (int t = 0; t < 10; ++t) {
      const Vector c = rng.uniform_vector(set->dim(), -1, 1);
      const Vector x = lmo(*set, c);
      EXPECT_TRUE(set->contains(x, 1e-8));
      for (int w = 0; w < 20; ++w) EXPECT_LE(c.dot(x), c.dot(random_feasible(*set, rng, 3)) + 1e-8);
    }
  }
}
