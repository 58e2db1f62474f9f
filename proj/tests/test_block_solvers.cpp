#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace spadmm;
using testing_helpers::OwnedSubproblem;
using testing_helpers::random_bilinear_subproblem;

namespace {

std::unique_ptr<OwnedSubproblem> xy_subproblem(double lam_a) {
  auto o = std::make_unique<OwnedSubproblem>();
  o->objective = std::make_shared<BilinearQuadratic>(0.0, 1.0, 0.0);
  o->sp.z_a = o->sp.z_b = o->sp.lam_b = Vector::Zero(1);
  o->sp.lam_a = Vector::Constant(1, lam_a);
  o->sp.rho_a = o->sp.rho_b = 1.0;
  o->bind();
  return o;
}

oracle::GridSaddle grid_oracle(const BlockSubproblem& sp) {
  const auto& a = sp.local_a->as_box();
  const auto& b = sp.local_b->as_box();
  return oracle::grid_saddle(
      [&](double x, double y) { return sp.value(Vector::Constant(1, x), Vector::Constant(1, y)); }, a.lower[0],
      a.upper[0], b.lower[0], b.upper[0], 1e-3);
}

std::unique_ptr<OwnedSubproblem> power_block(double sigma, double rho) {
  auto o = std::make_unique<OwnedSubproblem>();
  o->objective = std::make_shared<PowerCapacity>(sigma);
  o->local_a = ConvexSet::box(1, 0.0, 10.0);
  o->local_b = ConvexSet::box(1, 0.0, 20.0);
  o->sp.z_a = o->sp.z_b = o->sp.lam_a = o->sp.lam_b = Vector::Zero(1);
  o->sp.rho_a = o->sp.rho_b = rho;
  o->bind();
  return o;
}

// Saddle inequalities φ(x*, y) <= φ(x*, y*) <= φ(x, y*) on random feasible points.
void expect_block_saddle(const BlockSubproblem& sp, const BlockSolution& s, double slack, Rng& rng) {
  const double mid = sp.value(s.x_a, s.x_b);
  for (int t = 0; t < 100; ++t) {
    const Vector x = sp.local_a->project(rng.uniform_vector(1, -25.0, 25.0));
    const Vector y = sp.local_b->project(rng.uniform_vector(1, -25.0, 25.0));
    EXPECT_LE(sp.value(s.x_a, y), mid + slack);
    EXPECT_LE(mid, sp.value(x, s.x_b) + slack);
  }
}

}  // namespace

TEST(AnalyticBlock, SymmetricOriginSaddle) {
  auto o = xy_subproblem(0.0);
  const auto s = solve_block_analytic(o->sp);
  EXPECT_EQ(s.x_a[0], 0.0);
  EXPECT_EQ(s.x_b[0], 0.0);
}

TEST(AnalyticBlock, ShiftedDualMatchesGrid) {
  auto o = xy_subproblem(2.0);
  const auto s = solve_block_analytic(o->sp);
  const auto g = grid_oracle(o->sp);
  EXPECT_NEAR(s.x_a[0], g.x, 2e-3);
  EXPECT_NEAR(s.x_b[0], g.y, 2e-3);
}

TEST(AnalyticBlock, RandomInstancesMatchGrid) {
  Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    auto o = random_bilinear_subproblem(rng);
    const auto s = solve_block_analytic(o->sp);
    const auto g = grid_oracle(o->sp);
    EXPECT_NEAR(s.x_a[0], g.x, 2e-3) << "instance " << t;
    EXPECT_NEAR(s.x_b[0], g.y, 2e-3) << "instance " << t;
    EXPECT_LE(block_natural_residual(o->sp, s.x_a, s.x_b), 1e-10);
    expect_block_saddle(o->sp, s, 1e-10, rng);
  }
}

TEST(AnalyticBlock, RejectsGeneralObjectives) {
  auto o = power_block(2.0, 1.0);
  EXPECT_THROW(solve_block_analytic(o->sp), UnsupportedError);
}

TEST(AnalyticBlock, LargerPenaltyPullsTowardAnchor) {
  Rng rng(43);
  for (int t = 0; t < 50; ++t) {
    auto o = random_bilinear_subproblem(rng);
    const double d1 = std::abs(solve_block_analytic(o->sp).x_a[0] - o->sp.z_a[0]);
    o->sp.rho_a *= 2.0;
    const double d2 = std::abs(solve_block_analytic(o->sp).x_a[0] - o->sp.z_a[0]);
    EXPECT_LE(d2, d1 + 1e-12) << "instance " << t;
  }
}

TEST(SpfwBlock, MatchesAnalytic) {
  Rng rng(44);
  for (int t = 0; t < 20; ++t) {
    auto o = random_bilinear_subproblem(rng);
    const auto a = solve_block_analytic(o->sp);
    const auto f = solve_block_spfw(o->sp, 200000, 1e-6);
    EXPECT_NEAR(f.x_a[0], a.x_a[0], 1e-3) << "instance " << t;
    EXPECT_NEAR(f.x_b[0], a.x_b[0], 1e-3) << "instance " << t;
  }
}

TEST(SpfwBlock, PowerBlockConverges) {
  auto o = power_block(2.0, 0.1);
  const auto s = solve_block_spfw(o->sp, 5000, 1e-4);
  EXPECT_LT(s.residual, 1e-4);
  EXPECT_LE(s.iterations, 5000u);
}

TEST(SpfwBlock, StartAtSaddleIsFixed) {
  auto o = xy_subproblem(0.0);
  o->sp.start_a = o->sp.start_b = Vector::Zero(1);
  const auto s = solve_block_spfw(o->sp, 100, 1e-12);
  EXPECT_EQ(s.iterations, 0u);
  EXPECT_EQ(s.residual, 0.0);
  EXPECT_EQ(s.x_a[0], 0.0);
  EXPECT_EQ(s.x_b[0], 0.0);
}

TEST(ExtragradientBlock, MatchesAnalytic) {
  Rng rng(45);
  for (int t = 0; t < 50; ++t) {
    auto o = random_bilinear_subproblem(rng);
    const auto a = solve_block_analytic(o->sp);
    const auto e = solve_block_extragradient(o->sp, 0.0, 100000, 1e-10, 7);
    EXPECT_NEAR(e.x_a[0], a.x_a[0], 1e-4) << "instance " << t;
    EXPECT_NEAR(e.x_b[0], a.x_b[0], 1e-4) << "instance " << t;
  }
}

TEST(ExtragradientBlock, SaddleStartIsFixedPoint) {
  auto o = xy_subproblem(0.0);
  o->sp.start_a = o->sp.start_b = Vector::Zero(1);
  const auto s = solve_block_extragradient(o->sp, 0.0, 100, 1e-12);
  EXPECT_EQ(s.x_a[0], 0.0);
  EXPECT_EQ(s.x_b[0], 0.0);
  EXPECT_EQ(s.residual, 0.0);
}

TEST(ExtragradientBlock, AgreesWithSpfwOnPowerBlock) {
  Rng rng(46);
  for (double sigma : {2.0, 5.0, 9.0}) {
    auto o = power_block(sigma, 0.1);
    o->sp.z_a = Vector::Constant(1, 1.0);
    o->sp.z_b = Vector::Constant(1, 2.0);
    const auto e = solve_block_extragradient(o->sp, 0.0, 100000, 1e-10);
    const auto f = solve_block_spfw(o->sp, 200000, 1e-7);
    EXPECT_NEAR(e.x_a[0], f.x_a[0], 1e-3) << "sigma " << sigma;
    EXPECT_NEAR(e.x_b[0], f.x_b[0], 1e-3) << "sigma " << sigma;
    EXPECT_TRUE(o->local_a.contains(e.x_a, 1e-8));
    EXPECT_TRUE(o->local_b.contains(e.x_b, 1e-8));
    expect_block_saddle(o->sp, e, 1e-8, rng);
  }
}

TEST(BlockSolve, AutoSelection) {
  Rng rng(1);
  auto bq = random_bilinear_subproblem(rng);
  auto pw = power_block(2.0, 1.0);
  EXPECT_EQ(resolve_block_solver(BlockSolverKind::Auto, bq->sp), BlockSolverKind::Analytic);
  EXPECT_EQ(resolve_block_solver(BlockSolverKind::Auto, pw->sp), BlockSolverKind::Extragradient);
  EXPECT_EQ(resolve_block_solver(BlockSolverKind::FrankWolfe, bq->sp), BlockSolverKind::FrankWolfe);
}

TEST(BlockSolve, NonFiniteGradientIsReported) {
  auto o = power_block(2.0, 1.0);
  o->local_a = ConvexSet::box(1, -5.0, 10.0);  // σ + x can hit zero
  o->bind();
  o->sp.start_a = Vector::Constant(1, -2.0);
  o->sp.start_b = Vector::Zero(1);
  EXPECT_THROW(solve_block_spfw(o->sp, 10, 1e-8), NumericError);
}

TEST(BlockSolve, ValidatesInputs) {
  auto o = xy_subproblem(0.0);
  o->sp.rho_a = 0.0;
  EXPECT_THROW(solve_block_analytic(o->sp), ArgumentError);
  o->sp.rho_a = 1.0;
  o->sp.z_a = Vector::Zero(2);
  EXPECT_THROW(solve_block_extragradient(o->sp), ArgumentError);
}
