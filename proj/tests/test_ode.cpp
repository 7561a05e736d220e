#include <gtest/gtest.h>

#include <cmath>

#include "hjlq/ode.hpp"

using namespace hjlq;

TEST(OdeGrid, EndpointsExactAndNodesFromIndex) {
  const OdeGrid g(0.0, 0.3, 7);
  EXPECT_EQ(g.node(0), 0.0);
  EXPECT_EQ(g.node(7), 0.3);
  EXPECT_EQ(g.node(3), 3 * (0.3 / 7));
  EXPECT_EQ(g.nodes().size(), 8u);
  EXPECT_EQ(g.find_node(0.3), 7);
  EXPECT_EQ(g.find_node(2 * 0.3 / 7 + 1e-15), 2);
  EXPECT_EQ(g.find_node(0.3 / 14), -1);
  EXPECT_EQ(g.find_node(-0.1), -1);
}

TEST(OdeGrid, RejectsDegenerate) {
  EXPECT_THROW(OdeGrid(0.0, 1.0, 0), ValidationError);
  EXPECT_THROW(OdeGrid(1.0, 1.0, 4), ValidationError);
}

TEST(Rk4, ConstantRightHandSideIsExact) {
  const OdeRhs rhs = [](double, const Vector&) { return Vector::Constant(2, 3.0); };
  const auto sol = solve_fvp_rk4(rhs, Vector::Constant(2, 1.0), 0.0, 1.0, 10);
  EXPECT_EQ(sol.back()(0), 1.0);
  EXPECT_DOUBLE_EQ(sol.front()(0), 1.0 - 3.0);
  for (const auto& [N, err] :
       convergence_order(rhs, Vector::Constant(2, 1.0), 0.0, 1.0, Vector::Constant(2, -2.0),
                         {5, 10, 20})) {
    EXPECT_LT(err, 1e-14) << N;
  }
}

TEST(Rk4, CubicInTimeIsExact) {
  // z' = 4 t^3 is integrated exactly by a fourth-order quadrature rule.
  const OdeRhs rhs = [](double t, const Vector&) { return Vector::Constant(1, 4 * t * t * t); };
  const auto sol = solve_fvp_rk4(rhs, Vector::Constant(1, 1.0), 0.0, 1.0, 3);
  EXPECT_NEAR(sol.front()(0), 0.0, 1e-15);
}

TEST(Rk4, BackwardExponentialOrderFour) {
  const OdeRhs rhs = [](double, const Vector& z) { return z; };
  const auto rows =
      convergence_order(rhs, Vector::Constant(1, std::exp(1.0)), 0.0, 1.0,
                        Vector::Constant(1, 1.0), {25, 50, 100});
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double ratio = rows[i].second / rows[i + 1].second;
    EXPECT_GE(ratio, 12.0);
    EXPECT_LE(ratio, 20.0);
  }
}

TEST(Rk4, ForwardMirrorsBackward) {
  const OdeRhs rhs = [](double t, const Vector& z) {
    Vector d(2);
    d << z(1), -z(0) + 0.1 * t;
    return d;
  };
  Vector z0(2);
  z0 << 1.0, 0.0;
  const auto fwd = solve_ivp_rk4(rhs, z0, 0.0, 2.0, 400);
  const auto bwd = solve_fvp_rk4(rhs, fwd.back(), 0.0, 2.0, 400);
  EXPECT_LT((bwd.front() - z0).lpNorm<Eigen::Infinity>(), 1e-10);
  EXPECT_EQ(fwd.front(), z0);
}

TEST(Rk4, StepHookSeesEveryState) {
  int calls = 0;
  const OdeRhs rhs = [](double, const Vector& z) { return -z; };
  solve_fvp_rk4(rhs, Vector::Ones(1), 0.0, 1.0, 6, [&](Vector&) { ++calls; });
  EXPECT_EQ(calls, 7);
}

TEST(Rk4, BlowUpReportsStepAndTime) {
  // Backward in time z grows like 1 / (t - t*) and overflows.
  const OdeRhs rhs = [](double, const Vector& z) { return Vector(-z.array().square() * 1e3); };
  try {
    solve_fvp_rk4(rhs, Vector::Constant(1, 1e3), 0.0, 1.0, 50);
    FAIL() << "expected BlowUpError";
  } catch (const BlowUpError& e) {
    EXPECT_GE(e.step(), 1);
    EXPECT_LE(e.step(), 50);
    EXPECT_GE(e.time(), 0.0);
    EXPECT_LE(e.time(), 1.0);
    EXPECT_NE(std::string(e.what()).find("blow-up"), std::string::npos);
  }
}
