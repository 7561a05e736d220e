#pragma once

#include <cstddef>
#include <vector>

#include "hjlq/core.hpp"
#include "hjlq/riccati.hpp"

namespace hjlq {

/// V_NN(t, x) = min_i V_i(t, x) with V_i = 0.5 x'P_i x + q_i'x + r_i.
struct ValueSample {
  double value = 0.0;
  Vector gradient;             // P_k x + q_k of the active piece
  std::size_t active_piece = 0;  // 0-based, smallest index attaining the min
  std::vector<double> per_piece_values;
};

ValueSample value_at(const BackwardSolution& solution, double t, const Vector& x);

/// 0.5 p'Cpp p - p'Cxp x - 0.5 (x - x_r)'Cxx (x - x_r), x_r = 0 when not tracking.
double hamiltonian(const HamiltonianSlice& H, const ReferenceTrajectory& reference, double t,
                   const Vector& x, const Vector& p);
double hamiltonian(const HamiltonianCoefficients& H, const ReferenceTrajectory& reference,
                   double t, const Vector& x, const Vector& p);

/// How the time derivative of V_i enters the residual.
enum class TimeDerivative {
  kFiniteDifference,  // fourth-order five-point central difference of nodal states
  kAnalytic,          // stored right-hand-side samples
};

/// r(x) = -dV_i/dt(t, x) + H(t, x, P_i(t) x + q_i(t)) for each x. t must be a
/// grid node with two neighbours on each side.
std::vector<double> residual_grid(const BackwardSolution& solution, std::size_t piece, double t,
                                  const std::vector<Vector>& xs,
                                  TimeDerivative mode = TimeDerivative::kFiniteDifference);

}  // namespace hjlq
