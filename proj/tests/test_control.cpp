#include <gtest/gtest.h>

#include <cmath>

#include "hjlq/control.hpp"
#include "hjlq/problems.hpp"
#include "hjlq/value.hpp"
#include "hjlq/verify.hpp"

using namespace hjlq;

TEST(Feedback, ScalarFormula) {
  const auto sol = solve_backward(build_scalar_example(1.0), 100);
  const double t = 0.3;
  const auto s = sol.sample(0, t);
  const Vector u = feedback(sol, 0, t, Vector::Constant(1, 2.0));
  EXPECT_DOUBLE_EQ(u(0), -(s.P(0, 0) * 2.0 + s.q(0)));
}

TEST(Feedback, CrossTermAndWeight) {
  ProblemData d;
  d.n = d.l = 1;
  d.A = Coefficient::identity(1);
  d.B = Coefficient(Matrix::Constant(1, 1, 3.0));
  d.Mxx = Coefficient::identity(1);
  d.Muu = Coefficient(Matrix::Constant(1, 1, 2.0));
  d.Mxu = Coefficient(Matrix::Constant(1, 1, 0.25));
  d.terminal = {Quadratic(Matrix::Identity(1, 1), Vector::Constant(1, 0.5), 0.0)};
  const auto sol = solve_backward(ControlProblem(d), 40);
  const auto s = sol.sample(0, 0.5);
  const double x = -1.2;
  const Vector u = feedback(sol, 0, 0.5, Vector::Constant(1, x));
  EXPECT_NEAR(u(0), -(3.0 * (s.P(0, 0) * x + s.q(0)) + 0.25 * x) / 2.0, 1e-15);
}

TEST(Rollout, ScalarValueMatchesCost) {
  const auto sol = solve_backward(build_scalar_example(1.0), 200);
  const auto tr = rollout(sol, 0.0, Vector::Constant(1, 1.0), 200);
  // V(0, 1) = p(0) / 2.
  EXPECT_NEAR(tr.total_cost, 0.5 * scalar_riccati_oracle(0.0, 1.0), 1e-6);
  EXPECT_NEAR(value_at(sol, 0.0, Vector::Constant(1, 1.0)).value, tr.total_cost, 1e-6);
  EXPECT_EQ(tr.states.size(), 201u);
  EXPECT_EQ(tr.controls.size(), 201u);
  EXPECT_EQ(tr.grid.node(200), 1.0);
}

TEST(Rollout, OriginStaysPut) {
  const auto sol = solve_backward(build_scalar_example(1.0), 50);
  const auto tr = rollout(sol, 0.0, Vector::Zero(1), 50);
  EXPECT_EQ(tr.total_cost, 0.0);
  for (const auto& x : tr.states) EXPECT_EQ(x(0), 0.0);
}

TEST(Rollout, PieceFrozenAtStart) {
  const auto sol = solve_backward(build_constant_example(16, 1.0), 200);
  Vector x0 = Vector::Zero(16);
  x0(0) = 1.5;
  const auto tr = rollout(sol, 0.0, x0, 200);
  EXPECT_EQ(tr.active_piece, select_piece(sol, 0.0, x0));
  EXPECT_EQ(tr.active_piece, 1u);
  EXPECT_LE(tr.terminal_cost_min, tr.terminal_cost);
  EXPECT_DOUBLE_EQ(tr.total_cost, tr.accumulated_cost + tr.terminal_cost);
  // Tie at the origin resolves to the first piece.
  EXPECT_EQ(select_piece(sol, 0.0, Vector::Zero(16)), 0u);
}

TEST(Rollout, LaterStartOnAlignedGrid) {
  const auto sol = solve_backward(build_constant_example(4, 1.0), 200);
  Vector x0 = Vector::Zero(4);
  x0(0) = -0.8;
  const auto tr = rollout(sol, 0.5, x0, 100);
  EXPECT_NEAR(tr.total_cost, value_at(sol, 0.5, x0).value, 1e-9);
}

TEST(Rollout, MisalignedGridRejected) {
  const auto sol = solve_backward(build_scalar_example(1.0), 200);
  EXPECT_THROW(rollout(sol, 0.0, Vector::Ones(1), 150), ValidationError);
  EXPECT_THROW(rollout(sol, 1.0, Vector::Ones(1), 10), ValidationError);
  EXPECT_THROW(rollout(sol, 0.0, Vector::Ones(2), 200), ValidationError);
}

TEST(Rollout, ValueCostSweepAllBuiltins) {
  struct Case {
    ControlProblem problem;
    double tol;
  };
  const std::vector<Case> cases{
      {build_constant_example(16, 1.0), tolerances::kValueCost},
      {build_timedep_example(1, TimeDependentVariant::k1dTwoPieces, 1.0), tolerances::kValueCost},
      {build_timedep_example(16, TimeDependentVariant::k16dFourPieces, 1.0),
       tolerances::kValueCost},
      {build_newton_example(2, 1.0), tolerances::kValueCostTracking}};
  for (const auto& c : cases) {
    const auto sol = solve_backward(c.problem, 200, 2);
    const auto rows = run_value_cost_sweep(sol, 0.0, line_points(c.problem.n(), 1, -2, 2, 11), 2);
    for (const auto& r : rows) EXPECT_LT(r.gap, c.tol) << "x0_1 = " << r.x0(0);
  }
}

TEST(EvaluateCost, ReproducesRolloutCost) {
  const auto sol =
      solve_backward(build_timedep_example(1, TimeDependentVariant::k1dTwoPieces, 1.0), 200);
  const Vector x0 = Vector::Constant(1, 0.4);
  const auto tr = rollout(sol, 0.0, x0, 200);
  const double cost = evaluate_cost(sol.problem(), 0.0, x0, tr.controls, 200);
  EXPECT_NEAR(cost, tr.total_cost, 1e-7);
}

TEST(EvaluateCost, RejectsWrongSampleCount) {
  const auto problem = build_scalar_example(1.0);
  EXPECT_THROW(evaluate_cost(problem, 0.0, Vector::Ones(1), std::vector<Vector>(5, Vector::Zero(1)),
                             10),
               ValidationError);
}

TEST(Optimality, PerturbationsNeverBeatSynthesizedControl) {
  const auto sol = solve_backward(build_scalar_example(1.0), 200);
  const auto probe = run_optimality_probe(sol, 0.0, Vector::Constant(1, 1.0), 20, 0.1, 99);
  EXPECT_LE(probe.worst_improvement, tolerances::kOptimality);
  EXPECT_LT(probe.self_consistency, 1e-7);
  EXPECT_GT(probe.min_perturbed_cost, probe.synthesized_cost - tolerances::kOptimality);
}
