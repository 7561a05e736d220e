#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hjlq/problems.hpp"
#include "hjlq/riccati.hpp"
#include "hjlq/value.hpp"
#include "hjlq/verify.hpp"

using namespace hjlq;

namespace {

// Reference values from tests/oracles/generate.py (scipy DOP853, rtol 1e-13).
struct Frozen {
  double t;
  std::vector<double> head;  // leading coordinates, rest zero
  double value;
  std::size_t piece;  // 1-based
};

Vector embed(Eigen::Index n, const std::vector<double>& head) {
  Vector x = Vector::Zero(n);
  for (std::size_t i = 0; i < head.size(); ++i) x(static_cast<Eigen::Index>(i)) = head[i];
  return x;
}

void expect_frozen(const BackwardSolution& sol, const std::vector<Frozen>& cases, double tol) {
  for (const auto& c : cases) {
    const auto v = value_at(sol, c.t, embed(sol.n(), c.head));
    EXPECT_NEAR(v.value, c.value, tol) << "t = " << c.t << " x1 = " << c.head[0];
    EXPECT_EQ(v.active_piece + 1, c.piece) << "t = " << c.t << " x1 = " << c.head[0];
  }
}

}  // namespace

TEST(ValueOracle, ConstantSixteenDim) {
  const auto sol = solve_backward(build_constant_example(16, 1.0), 200);
  expect_frozen(sol,
                {{0.0, {0.0}, 0.37181654509462325, 1},
                 {0.0, {1.0}, 1.0409018689146614, 2},
                 {0.0, {0.5, -0.3, 0.2}, 0.7087066317416107, 2},
                 {0.5, {-2.0}, 2.7050293938779735, 1}},
                1e-9);
}

TEST(ValueOracle, TimeDependentOneDim) {
  const auto sol =
      solve_backward(build_timedep_example(1, TimeDependentVariant::k1dTwoPieces, 1.0), 200);
  expect_frozen(sol,
                {{0.0, {0.0}, 0.1795081738358944, 1},
                 {0.0, {0.5}, 0.06408980438960221, 2},
                 {0.0, {-1.3}, 0.6124375966777529, 1},
                 {0.5, {2.0}, 1.0557898315348777, 2}},
                1e-9);
}

TEST(ValueOracle, TimeDependentSixteenDim) {
  const auto sol =
      solve_backward(build_timedep_example(16, TimeDependentVariant::k16dFourPieces, 1.0), 200);
  expect_frozen(sol,
                {{0.0, {0.3, -0.7}, -0.14885138727977137, 3},
                 {0.0, {-1.5, 1.9}, 1.8344849024678307, 4},
                 {0.0, {0.1, 0.2, 0.3, 0.4}, 0.016597818525989266, 4}},
                1e-9);
}

TEST(ValueOracle, NewtonTracking) {
  const auto sol = solve_backward(build_newton_example(1, 1.0), 200);
  expect_frozen(sol,
                {{0.0, {0.0, 0.0}, 0.4415666418401677, 2},
                 {0.0, {1.0, -1.0}, 0.8750488691037297, 2},
                 {0.5, {-2.0, 0.5}, 5.0348857170854835, 2}},
                1e-6);
}

TEST(Value, TerminalSliceBitwise) {
  const auto problem = build_timedep_example(16, TimeDependentVariant::k16dFourPieces, 1.0);
  const auto sol = solve_backward(problem, 20);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    Vector x(16);
    for (auto& c : x) c = u(rng);
    const auto v = value_at(sol, 1.0, x);
    const auto e = problem.terminal().evaluate(x);
    ASSERT_EQ(v.value, e.value);
    ASSERT_EQ(v.active_piece, e.piece);
  }
}

TEST(Value, PerPieceValuesAndGradient) {
  const auto sol = solve_backward(build_constant_example(4, 1.0), 50);
  Vector x(4);
  x << 0.7, -0.2, 0.1, 0.0;
  const auto v = value_at(sol, 0.5, x);
  ASSERT_EQ(v.per_piece_values.size(), 2u);
  EXPECT_EQ(v.value, std::min(v.per_piece_values[0], v.per_piece_values[1]));
  const auto s = sol.sample(v.active_piece, 0.5);
  EXPECT_TRUE(v.gradient.isApprox(s.P * x + s.q));
}

TEST(Value, MinPlusProperty) {
  // Random splits of random PSD pieces: value under the concatenation equals
  // the pointwise min of the two partial solves.
  std::mt19937 rng(2024);
  std::normal_distribution<double> g;
  const auto base = build_constant_example(3, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Quadratic> a, b;
    for (int i = 0; i < 4; ++i) {
      Matrix L(3, 3);
      for (auto& c : L.reshaped()) c = g(rng);
      Vector q(3);
      for (auto& c : q) c = g(rng);
      (i % 2 == 0 ? a : b).emplace_back(0.3 * L * L.transpose(), q, g(rng));
    }
    const TerminalCost ta(a), tb(b);
    const auto full = solve_backward(base.with_terminal(TerminalCost::concat(ta, tb)), 40);
    const auto sa = solve_backward(base.with_terminal(ta), 40);
    const auto sb = solve_backward(base.with_terminal(tb), 40);
    for (int k = 0; k < 50; ++k) {
      Vector x(3);
      for (auto& c : x) c = 2 * g(rng);
      for (double t : {0.0, 0.35, 1.0}) {
        EXPECT_EQ(value_at(full, t, x).value,
                  std::min(value_at(sa, t, x).value, value_at(sb, t, x).value));
      }
    }
  }
}

TEST(Value, HamiltonianFormula) {
  const auto problem = build_newton_example(1, 1.0);
  const HamiltonianCoefficients H(problem);
  Vector x(2), p(2);
  x << 0.3, -0.4;
  p << 1.5, 0.25;
  const double t = 0.6;
  const auto s = H(t);
  const Vector d = x - problem.reference()(t, 2);
  const double expected = 0.5 * p.dot(s.Cpp * p) - p.dot(s.Cxp * x) - 0.5 * d.dot(s.Cxx * d);
  EXPECT_NEAR(hamiltonian(H, problem.reference(), t, x, p), expected, 1e-12);
}

TEST(Residual, ConstantExampleBelowTolerance) {
  const auto sol = solve_backward(build_constant_example(16, 1.0), 200);
  const auto rows = run_residual_survey(sol, {0.25, 0.5, 0.75}, Box{}, 20, {1, 2});
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) EXPECT_LT(r.max_abs, tolerances::kResidual);
}

TEST(Residual, ExactInjectionIsTruncationOnly) {
  const auto sol = exact_scalar_solution(200, 1.0);
  std::vector<Vector> xs;
  for (double x = -2.0; x <= 2.0; x += 0.25) xs.push_back(Vector::Constant(1, x));
  for (double t : {0.25, 0.5, 0.75}) {
    for (double r : residual_grid(sol, 0, t, xs)) {
      EXPECT_LT(std::abs(r), tolerances::kExactInjectionResidual);
    }
  }
}

TEST(Residual, ZeroLinearTermVanishesAtOrigin) {
  const auto sol = solve_backward(build_scalar_example(1.0), 50);
  const auto res = residual_grid(sol, 0, 0.5, {Vector::Zero(1)});
  EXPECT_EQ(res[0], 0.0);
}

TEST(Residual, AnalyticModeIsRoundingOnly) {
  const auto sol =
      solve_backward(build_timedep_example(16, TimeDependentVariant::k16dFourPieces, 1.0), 50);
  const auto rows = run_residual_survey(sol, {0.5}, Box{}, 9, {1, 2}, TimeDerivative::kAnalytic);
  for (const auto& r : rows) EXPECT_LT(r.max_abs, 1e-12);
}

TEST(Residual, NeedsInteriorNode) {
  const auto sol = solve_backward(build_scalar_example(1.0), 50);
  const std::vector<Vector> xs{Vector::Zero(1)};
  EXPECT_THROW(residual_grid(sol, 0, 0.0, xs), ValidationError);
  EXPECT_THROW(residual_grid(sol, 0, 1.0, xs), ValidationError);
  EXPECT_THROW(residual_grid(sol, 0, 0.5 + 1e-3, xs), ValidationError);
  EXPECT_NO_THROW(residual_grid(sol, 0, 0.02, xs));
}

TEST(Value, GradientMatchesFiniteDifferences) {
  const auto sol =
      solve_backward(build_timedep_example(16, TimeDependentVariant::k16dFourPieces, 1.0), 100);
  const auto pts = slice_points(16, {1, 2}, Box{}, 15);
  std::vector<Vector> xs;
  for (const auto& p : pts) xs.push_back(p.x);
  const auto [err, checked] = gradient_check(sol, 0.5, xs);
  EXPECT_GT(checked, 150u);
  EXPECT_LT(err, tolerances::kGradientRelative);
}
