#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace spadmm;

TEST(BestResponseMin, RoutingMatchesDualOracle) {
  const auto p = build_routing(generate_routing_graph({12, 5.0, 2, 0.1}));
  const auto& d = p.global_a().as_affine_box();
  Rng rng(3);
  for (int t = 0; t < 3; ++t) {
    const Vector y = testing_helpers::random_feasible(p.feasible_b(), rng);
    const auto br = best_response_min(p, y, 1e-9);
    // Σ x² + x·y = ‖x + y/2‖² − ‖y/2‖²: nearest point to −y/2
    const Vector ref = oracle::box_affine_projection_dual(-0.5 * y, d.A, d.b, d.lower, d.upper);
    EXPECT_NEAR(br.value, total_objective(p, ref, y), 1e-4) << "trial " << t;
    EXPECT_LE(br.stationarity, 1e-9);
  }
}

TEST(BestResponseMin, ZeroOpponentIsProjectionOfZero) {
  const auto p = build_routing(generate_routing_graph({20, 5.0, 6, 0.1}));
  const Vector zero = Vector::Zero(p.dim_b());
  const auto br = best_response_min(p, zero, 1e-10);
  EXPECT_LE((br.point - p.feasible_a().project(Vector::Zero(p.dim_a()))).norm(), 1e-7);
}

TEST(BestResponseMin, InteriorOptimum) {
  std::vector<BlockPtr> blocks{std::make_shared<BilinearQuadratic>(2.0, 1.0, 0.0, -0.5)};
  const SaddleProblem p(blocks, {ConvexSet::box(1, -1, 1)}, {ConvexSet::box(1, -1, 1)}, ConvexSet::whole_space(1),
                        ConvexSet::whole_space(1));
  const auto br = best_response_min(p, Vector::Constant(1, 0.1), 1e-10);
  EXPECT_NEAR(br.point[0], (0.5 - 0.1) / 2.0, 1e-10);
  EXPECT_LE(br.stationarity, 1e-10);
}

TEST(BestResponseMax, WaterFillingAgainstUniformNoise) {
  const auto spec = default_power_allocation_spec();
  const auto p = build_power_allocation(spec);
  const Vector x = Vector::Constant(10, 1.0);
  const auto br = best_response_max(p, x, 1e-10);
  Vector noise(10);
  for (int i = 0; i < 10; ++i) noise[i] = spec.sigma[static_cast<std::size_t>(i)] + x[i];
  const Vector ref = oracle::water_filling(noise, spec.power_budget);
  EXPECT_LE((br.point - ref).norm(), 1e-6);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      if (noise[i] < noise[j]) EXPECT_GE(br.point[i], br.point[j] - 1e-9);
}

TEST(BestResponseMax, EqualNoiseGivesUniformPower) {
  const auto spec = default_power_allocation_spec();
  const auto p = build_power_allocation(spec);
  Vector x(10);
  for (int i = 0; i < 10; ++i) x[i] = 1.0 + 9.0 - spec.sigma[static_cast<std::size_t>(i)];
  // every σ + x equals 10; objective is flat to second order near the optimum
  const auto br = best_response_max(p, x, 1e-10);
  EXPECT_LE((br.point - Vector::Constant(10, 2.0)).norm(), 1e-6);
}

TEST(BestResponseMax, KktStationarity) {
  const auto p = build_power_allocation(default_power_allocation_spec());
  Rng rng(7);
  const double tol = 1e-8;
  for (int t = 0; t < 10; ++t) {
    const Vector x = p.feasible_a().project(rng.uniform_vector(10, 0.0, 3.0));
    const auto br = best_response_max(p, x, tol);
    Vector ga, gb;
    total_gradient(p, x, br.point, ga, gb);
    const double kkt = (br.point - p.feasible_b().project(br.point + gb)).norm();
    EXPECT_LE(kkt, 10 * tol) << "trial " << t;
  }
}

TEST(GapBracket, RunningExtremesAreMonotone) {
  const auto p = build_power_allocation(default_power_allocation_spec());
  SolverConfig cfg;
  cfg.rho_a = cfg.rho_b = 1.0;
  cfg.max_iters = 200;
  cfg.eps_primal = cfg.eps_dual = 1e-300;
  GapState st;
  double lower = -kInf, upper = kInf;
  solve(p, cfg, [&](const TraceRecord&, const IterateState& s) {
    const auto g = gap_bracket(p, s.z_a, s.z_b, st);
    EXPECT_GE(g.lower, lower);
    EXPECT_LE(g.upper, upper);
    EXPECT_LE(g.lower, g.upper + 2 * tol::best_response);
    EXPECT_LE(g.lower, kPowerAllocationEquilibrium + 5e-3);
    EXPECT_GE(g.upper, kPowerAllocationEquilibrium - 5e-3);
    lower = g.lower;
    upper = g.upper;
  });
}

TEST(GapBracket, ContainsEquilibriumAtConvergence) {
  const auto p = build_power_allocation(default_power_allocation_spec());
  SolverConfig cfg;
  cfg.rho_a = cfg.rho_b = 0.1;
  const auto r = solve(p, cfg);
  const auto cert = saddle_certificate(p, r.state.z_a, r.state.z_b, 1e-5);
  EXPECT_TRUE(cert.pass) << cert.gap;
  EXPECT_LE(cert.lower, kPowerAllocationEquilibrium + 5e-3);
  EXPECT_GE(cert.upper, kPowerAllocationEquilibrium - 5e-3);
  EXPECT_LE(std::abs(cert.upper - cert.lower), 2e-5);
}

TEST(GapBracket, ExactSaddleHasTightBracket) {
  // (1/2)x² − (1/2)y² + xy: saddle at the origin, value 0
  std::vector<BlockPtr> blocks{std::make_shared<BilinearQuadratic>(1.0, 1.0, 1.0)};
  const SaddleProblem p(blocks, {ConvexSet::box(1, -1, 1)}, {ConvexSet::box(1, -1, 1)}, ConvexSet::whole_space(1),
                        ConvexSet::whole_space(1));
  const auto cert = saddle_certificate(p, Vector::Zero(1), Vector::Zero(1), 1e-12);
  EXPECT_NEAR(cert.lower, 0.0, 2 * tol::best_response);
  EXPECT_NEAR(cert.upper, 0.0, 2 * tol::best_response);
  EXPECT_TRUE(cert.pass);
}

TEST(ValueFunction, ConstructedCases) {
  IterateState ref;
  ref.z_a = ref.lam_a = Vector::Zero(3);
  ref.z_b = ref.lam_b = Vector::Zero(2);
  IterateState s = ref;
  EXPECT_EQ(value_function(s, ref, 2.0, 1.0), 0.0);
  s.lam_a[0] = 1.0;
  EXPECT_EQ(value_function(s, ref, 2.0, 1.0), 0.5);
  s = ref;
  s.z_b[1] = 1e-100;
  EXPECT_GT(value_function(s, ref, 1.0, 1e300), 0.0);
  s.z_b = Vector::Zero(3);
  EXPECT_THROW(value_function(s, ref, 1.0, 1.0), ArgumentError);
}
