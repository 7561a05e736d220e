#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hjlq/control.hpp"
#include "hjlq/core.hpp"
#include "hjlq/problems.hpp"
#include "hjlq/riccati.hpp"
#include "hjlq/value.hpp"

namespace hjlq {

/// Every tolerance used by the verification suite.
namespace tolerances {
// Residual -dV_i/dt + H on the const-16d slice (N = 200, |x| <= 2).
inline constexpr double kResidual = 1e-6;
// Residual when the grid holds the closed-form solution: FD truncation only,
// h^4/30 |f^(5)| with h = 1/400.
inline constexpr double kExactInjectionResidual = 1e-8;
// Scalar Riccati P(0) at N = 200 against the closed form; RK4 global error
// is ~ h^4 with h = 1/400.
inline constexpr double kClosedFormRiccati = 1e-8;
// Closed form substituted into its own ODE; pure rounding.
inline constexpr double kOracleSelfCheck = 1e-12;
// Error ratio between N and 2N for a fourth-order method is 16 asymptotically.
inline constexpr double kOrderRatioLow = 12.0;
inline constexpr double kOrderRatioHigh = 20.0;
inline constexpr double kOrderRatioLowStiff = 10.0;
inline constexpr double kOrderRatioHighStiff = 22.0;
inline constexpr double kEmpiricalOrder = 3.7;
// |V_NN(t0, x0) - rollout cost| at N = 200 T.
inline constexpr double kValueCost = 1e-5;
inline constexpr double kValueCostTracking = 1e-4;
// Perturbed controls may not undercut the synthesized cost by more than this.
inline constexpr double kOptimality = 1e-6;
inline constexpr double kMinPlus = 1e-12;
inline constexpr double kMirror = 1e-10;
inline constexpr double kGradientRelative = 1e-6;
inline constexpr double kGradientStep = 1e-5;
}  // namespace tolerances

/// 1 + sqrt(2) tanh(sqrt(2) (T - t)): exact solution of p' = p^2 - 2p - 1,
/// p(T) = 1 (scalar constant-coefficient Riccati equation).
double scalar_riccati_oracle(double t, double T);
/// d/dt of the closed form, computed from the formula (not from the ODE).
double scalar_riccati_oracle_derivative(double t, double T);

/// Max |oracle' - (p^2 - 2p - 1)| over `samples` uniform times in [0, T].
double oracle_self_check(double T = 1.0, int samples = 1000);

struct ConvergenceRow {
  int N;
  double error;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  std::vector<double> ratios;  // error(N_i) / error(N_{i+1})
  double min_order = 0.0;      // min log2(ratio) over consecutive doublings
};

/// Error of P_N(0) (max over pieces and entries) against a solve at 8x the
/// largest N.
ConvergenceStudy run_convergence_study(const ControlProblem& problem, const std::vector<int>& Ns,
                                       unsigned threads = 1);

/// Scalar Riccati against the closed form.
ConvergenceStudy scalar_riccati_convergence(const std::vector<int>& Ns);

/// z' = z on [0, 1], z(1) = e, against z(0) = 1.
ConvergenceStudy exponential_convergence(const std::vector<int>& Ns);

struct SweepRow {
  Vector x0;
  std::size_t piece = 0;  // 0-based
  double value = 0.0;
  double rollout_cost = 0.0;
  double gap = 0.0;
  Trajectory trajectory;
};

/// Value vs closed-loop cost for each initial condition. Uses the solution's
/// resolution for the rollout.
std::vector<SweepRow> run_value_cost_sweep(const BackwardSolution& solution, double t0,
                                           const std::vector<Vector>& x0s, unsigned threads = 1);

/// s * e_coord for `count` points s uniformly spanning [lo, hi].
std::vector<Vector> line_points(Eigen::Index n, int coord, double lo, double hi, int count);

struct Box {
  double x1_min = -2.0, x1_max = 2.0, x2_min = -2.0, x2_max = 2.0;
};

struct SlicePoint {
  double a = 0.0;  // value of the first slice coordinate
  double b = 0.0;  // value of the second slice coordinate
  Vector x;
};

/// Row-major (x2 outer, x1 inner) resolution x resolution mesh on the plane
/// spanned by the 1-based coordinates (c1, c2); remaining coordinates zero.
/// When c1 == c2 the mesh degenerates to `resolution` points along c1.
std::vector<SlicePoint> slice_points(Eigen::Index n, std::pair<int, int> coords, const Box& box,
                                     int resolution);

struct ResidualSurveyRow {
  double time;
  std::size_t piece;  // 0-based
  double max_abs;
};

std::vector<ResidualSurveyRow> run_residual_survey(
    const BackwardSolution& solution, const std::vector<double>& times, const Box& box,
    int resolution, std::pair<int, int> coords,
    TimeDerivative mode = TimeDerivative::kFiniteDifference, unsigned threads = 1);

/// Backward solution whose nodes hold the scalar closed form exactly.
BackwardSolution exact_scalar_solution(int N, double horizon = 1.0);

/// max over nodes and pieces of |P - P'|.
double max_asymmetry(const BackwardSolution& solution);

/// max |V(t, x) - V(t, -x)|.
double mirror_gap(const BackwardSolution& solution, const std::vector<double>& times,
                  const std::vector<Vector>& points);

/// True when the problem is invariant under x -> -x (pieces map onto pieces
/// with q negated, no tracking).
bool is_mirror_symmetric(const ControlProblem& problem);

/// max |V_full - min over single-piece solves| on the given times and points.
double min_plus_gap(const ControlProblem& problem, int N, const std::vector<double>& times,
                    const std::vector<Vector>& points, unsigned threads = 1);

/// Central differences of value_at versus the returned gradient; points where
/// the stencil changes the active piece are skipped. Returns the max relative
/// error and the number of points checked.
std::pair<double, std::size_t> gradient_check(const BackwardSolution& solution, double t,
                                              const std::vector<Vector>& points);

/// value_at(T, x) == evaluate_terminal(x) bitwise, value and index.
bool terminal_condition_holds(const BackwardSolution& solution,
                              const std::vector<Vector>& points);

struct OptimalityProbe {
  double synthesized_cost = 0.0;
  double min_perturbed_cost = 0.0;
  double worst_improvement = 0.0;  // max(synth - perturbed)
  double self_consistency = 0.0;   // |evaluate_cost(rollout controls) - rollout cost|
};

/// Random sinusoidal perturbations eps sin(k pi s / T + phi) on a random
/// control channel, eps in (0, eps_max], k in 1..4.
OptimalityProbe run_optimality_probe(const BackwardSolution& solution, double t0,
                                     const Vector& x0, int count, double eps_max,
                                     std::uint64_t seed);

// ---------------------------------------------------------------------------
// Packaged checks

struct CheckResult {
  std::string id;
  std::string description;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

enum class VerifyLevel { kQuick, kFull };

/// The acceptance criteria as a list of checks (sizes per `level`; kFull is
/// the reference configuration).
std::vector<CheckResult> run_acceptance_suite(VerifyLevel level, unsigned threads = 1);

/// Problem-specific checks for an arbitrary problem plus the oracle checks.
std::vector<CheckResult> run_problem_checks(const ControlProblem& problem, VerifyLevel level,
                                            unsigned threads = 1);

}  // namespace hjlq
