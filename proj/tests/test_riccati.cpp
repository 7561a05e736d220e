#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "hjlq/problems.hpp"
#include "hjlq/riccati.hpp"
#include "hjlq/verify.hpp"

using namespace hjlq;

namespace {

// 1 + sqrt(2) tanh(sqrt(2)), 30-digit evaluation.
constexpr double kScalarP0 = 2.25636690981087962185536134956;

}  // namespace

TEST(Riccati, ScalarMatchesClosedForm) {
  const auto sol = solve_backward(build_scalar_example(1.0), 200);
  EXPECT_NEAR(sol.piece(0).P.front()(0, 0), kScalarP0, 1e-8);
  EXPECT_EQ(sol.grid().steps(), 400);
  EXPECT_EQ(sol.resolution(), 200);
  for (int k = 0; k <= sol.grid().steps(); k += 37) {
    const double t = sol.grid().node(k);
    EXPECT_NEAR(sol.piece(0).P[k](0, 0), scalar_riccati_oracle(t, 1.0), 1e-9) << t;
  }
}

TEST(Riccati, TerminalDataStoredVerbatim) {
  const auto problem = build_timedep_example(16, TimeDependentVariant::k16dFourPieces, 1.0);
  const auto sol = solve_backward(problem, 50);
  for (std::size_t i = 0; i < sol.num_pieces(); ++i) {
    EXPECT_EQ(sol.piece(i).P.back(), problem.terminal()[i].P());
    EXPECT_EQ(sol.piece(i).q.back(), problem.terminal()[i].q());
    EXPECT_EQ(sol.piece(i).r.back(), problem.terminal()[i].r());
  }
}

TEST(Riccati, PExactlySymmetricAtEveryNode) {
  const auto sol = solve_backward(build_newton_example(3, 1.0), 100);
  EXPECT_EQ(max_asymmetry(sol), 0.0);
}

TEST(Riccati, ConstantExampleStructure) {
  // A = B = Mxx = Muu = I keeps P(t) = p(t) I with p the scalar closed form.
  const auto sol = solve_backward(build_constant_example(16, 1.0), 200);
  const Matrix& P0 = sol.piece(0).P.front();
  EXPECT_LT((P0 - kScalarP0 * Matrix::Identity(16, 16)).lpNorm<Eigen::Infinity>(), 1e-8);
  EXPECT_EQ(sol.piece(0).q.front(), -sol.piece(1).q.front());
  EXPECT_EQ(sol.piece(0).r.front(), sol.piece(1).r.front());
}

TEST(Riccati, SampleAtNodesAndBetween) {
  const auto sol = solve_backward(build_scalar_example(1.0), 20);
  const auto& grid = sol.grid();
  const auto at = sol.sample(0, grid.node(5));
  EXPECT_EQ(at.P, sol.piece(0).P[5]);
  EXPECT_EQ(at.dP, sol.piece(0).dP[5]);
  const double mid = 0.5 * (grid.node(5) + grid.node(6));
  const auto between = sol.sample(0, mid);
  EXPECT_DOUBLE_EQ(between.P(0, 0), 0.5 * (sol.piece(0).P[5](0, 0) + sol.piece(0).P[6](0, 0)));
  const double p = between.P(0, 0);
  EXPECT_NEAR(between.dP(0, 0), p * p - 2 * p - 1, 1e-14);
  EXPECT_THROW(sol.sample(0, 1.5), ValidationError);
  EXPECT_THROW(sol.sample(0, -0.1), ValidationError);
}

TEST(Riccati, StoredDerivativesMatchRightHandSides) {
  const auto sol = solve_backward(build_scalar_example(1.0), 10);
  for (std::size_t k = 0; k < sol.piece(0).P.size(); ++k) {
    const double p = sol.piece(0).P[k](0, 0);
    EXPECT_NEAR(sol.piece(0).dP[k](0, 0), p * p - 2 * p - 1, 1e-13);
  }
}

TEST(Riccati, ResolutionMustBeAtLeastTwo) {
  EXPECT_THROW(solve_backward(build_scalar_example(1.0), 1), ValidationError);
  EXPECT_EQ(default_resolution(1.0), 200);
  EXPECT_EQ(default_resolution(0.5), 100);
  EXPECT_EQ(default_resolution(1.001), 201);
}

TEST(Riccati, ThreadCountDoesNotChangeResults) {
  const auto problem = build_timedep_example(16, TimeDependentVariant::k16dFourPieces, 1.0);
  const auto a = solve_backward(problem, 40, 1);
  const auto b = solve_backward(problem, 40, 4);
  for (std::size_t i = 0; i < a.num_pieces(); ++i) {
    EXPECT_EQ(a.piece(i).P, b.piece(i).P);
    EXPECT_EQ(a.piece(i).q, b.piece(i).q);
    EXPECT_EQ(a.piece(i).r, b.piece(i).r);
  }
}

TEST(Riccati, FiniteTimeEscapeIsReported) {
  // Cxp = 0, Cxx = -3: backward P follows sqrt(3) tan(...) and escapes near
  // t = T - (2 pi / 3) / sqrt(3).
  ProblemData d;
  d.n = d.l = 1;
  d.horizon = 2.0;
  d.A = Coefficient(Matrix::Constant(1, 1, 2.0));
  d.B = Coefficient::identity(1);
  d.Mxx = Coefficient::identity(1);
  d.Muu = Coefficient::identity(1);
  d.Mxu = Coefficient(Matrix::Constant(1, 1, 2.0));
  d.terminal = {Quadratic(Matrix::Identity(1, 1), Vector::Zero(1), 0.0)};
  const ControlProblem problem(d);
  try {
    solve_backward(problem, 400);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("piece 1"), std::string::npos) << what;
    EXPECT_NE(what.find("escapes in finite time"), std::string::npos) << what;
  }
}

TEST(Riccati, CsvDumpLayout) {
  const auto dir = std::filesystem::temp_directory_path() / "hjlq_riccati_csv";
  std::filesystem::remove_all(dir);
  const auto sol = solve_backward(build_constant_example(2, 1.0), 4);
  const auto files = write_backward_csv(sol, dir);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "piece1.csv");
  std::ifstream in(files[1]);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "t,P_1_1,P_1_2,P_2_1,P_2_2,q_1,q_2,r");
  EXPECT_EQ(first.substr(0, 2), "0,");
  int rows = 1;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 9);
  std::filesystem::remove_all(dir);
}

TEST(RiccatiRhs, ConstantCoefficients) {
  const auto problem = build_constant_example(4, 1.0);
  const HamiltonianCoefficients H(problem);
  const Matrix I = Matrix::Identity(4, 4);
  EXPECT_EQ(riccati_rhs(0.3, I, H), -2.0 * I);
  EXPECT_LT(riccati_rhs(0.3, (1.0 + std::sqrt(2.0)) * I, H).lpNorm<Eigen::Infinity>(), 1e-14);
  const Vector e1 = Vector::Unit(4, 0);
  EXPECT_TRUE(linear_rhs(0.3, I, e1, H, problem.reference()).isZero(0.0));
  EXPECT_EQ(scalar_rhs(0.3, e1, H, problem.reference()), 0.5);
  EXPECT_TRUE(linear_rhs(0.3, I, Vector::Zero(4), H, problem.reference()).isZero(0.0));
  EXPECT_EQ(scalar_rhs(0.3, Vector::Zero(4), H, problem.reference()), 0.0);
}

TEST(RiccatiRhs, LinearCaseIgnoresP) {
  HamiltonianSlice s{Matrix::Zero(2, 2), 3.0 * Matrix::Identity(2, 2), Matrix::Zero(2, 2)};
  Matrix P(2, 2);
  P << 5, 1, 1, 7;
  EXPECT_EQ(riccati_rhs(P, s), -3.0 * Matrix::Identity(2, 2));
}

TEST(RiccatiRhs, TrackingTerms) {
  const auto problem = build_newton_example(8, 1.0);
  const HamiltonianCoefficients H(problem);
  const double t = M_PI / 2;
  const Vector dq = linear_rhs(t, Matrix::Zero(16, 16), Vector::Zero(16), H, problem.reference());
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(dq(i), 5.0, 1e-15);
  for (int i = 8; i < 16; ++i) EXPECT_NEAR(dq(i), 0.0, 1e-14);
  for (double s : {0.0, 0.4, 1.0}) {
    EXPECT_NEAR(scalar_rhs(s, Vector::Zero(16), H, problem.reference()), -100.0, 1e-12);
  }
}

TEST(HamiltonianCoefficients, ZeroControlChannel) {
  auto d = build_constant_example(3, 1.0).data();
  d.B = Coefficient::zero(3, 3);
  d.A = Coefficient(2.0 * Matrix::Identity(3, 3));
  const auto s = derive_hamiltonian_coefficients(ControlProblem(d))(0.5);
  EXPECT_TRUE(s.Cpp.isZero(0.0));
  EXPECT_EQ(s.Cxp, 2.0 * Matrix::Identity(3, 3));
}

TEST(HamiltonianCoefficients, DefinitenessAcrossHorizon) {
  for (const auto& problem :
       {build_constant_example(4, 1.0), build_newton_example(2, 1.0),
        build_timedep_example(4, TimeDependentVariant::k16dFourPieces, 1.0)}) {
    const HamiltonianCoefficients H(problem);
    for (int k = 0; k < 100; ++k) {
      const auto s = H(k / 99.0);
      EXPECT_EQ(s.Cpp, s.Cpp.transpose());
      Eigen::SelfAdjointEigenSolver<Matrix> eig(s.Cpp);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
      EXPECT_TRUE(is_positive_definite(s.Cxx));
    }
  }
}

TEST(TerminalEvaluation, DocumentedPoints) {
  const auto c = build_constant_example(16, 1.0);
  Vector x = Vector::Zero(16);
  x(0) = x(1) = 1.0;
  auto e = c.terminal().evaluate(x);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.piece + 1, 2u);
  e = c.terminal().evaluate(Vector::Zero(16));
  EXPECT_EQ(e.value, 1.0);
  EXPECT_EQ(e.piece + 1, 1u);
  EXPECT_THROW(c.terminal().evaluate(Vector::Zero(3)), ValidationError);
}

TEST(Riccati, ZeroLinearTermsStayZero) {
  auto d = build_constant_example(3, 1.0).data();
  d.terminal = {Quadratic(Matrix::Identity(3, 3), Vector::Zero(3), 0.7),
                Quadratic(2.0 * Matrix::Identity(3, 3), Vector::Zero(3), -0.2)};
  const auto sol = solve_backward(ControlProblem(d), 20);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < sol.piece(i).q.size(); ++k) {
      EXPECT_TRUE(sol.piece(i).q[k].isZero(0.0));
      EXPECT_EQ(sol.piece(i).r[k], d.terminal[i].r());
    }
  }
}

TEST(Riccati, InterpolationAgainstFinerSolve) {
  const auto coarse = solve_backward(build_scalar_example(1.0), 200);
  const auto fine = solve_backward(build_scalar_example(1.0), 2000);
  for (double t : {0.5, 0.123, 0.777}) {
    EXPECT_NEAR(coarse.sample(0, t).P(0, 0), fine.sample(0, t).P(0, 0), 1e-6) << t;
  }
}
