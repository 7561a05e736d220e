#pragma once

#include <cstddef>
#include <vector>

#include "hjlq/core.hpp"
#include "hjlq/ode.hpp"
#include "hjlq/riccati.hpp"

namespace hjlq {

/// Closed-loop trajectory under the feedback of a single frozen piece.
struct Trajectory {
  OdeGrid grid;
  std::vector<Vector> states;    // x(t_j)
  std::vector<Vector> controls;  // u_NN(t_j, x(t_j))
  double accumulated_cost = 0.0; // integral of the running cost
  double terminal_cost = 0.0;    // active piece evaluated at x(T)
  double terminal_cost_min = 0.0;  // full min-of-quadratics at x(T)
  double total_cost = 0.0;       // accumulated_cost + terminal_cost
  std::size_t active_piece = 0;  // 0-based
};

/// u = -Muu^-1 (B'P_k x + B'q_k + Mxu'x).
Vector feedback(const BackwardSolution& solution, std::size_t piece, double t, const Vector& x);

/// Smallest index minimizing V_i(t0, x0).
std::size_t select_piece(const BackwardSolution& solution, double t0, const Vector& x0);

/// Integrates x' = (Cxp - Cpp P_k) x - Cpp q_k from (t0, x0) to T with N RK4
/// steps, together with the running cost. Every stage time must be a node of
/// the backward grid, which holds when N equals the solution's resolution and
/// t0 is one of its full-step nodes.
Trajectory rollout(const BackwardSolution& solution, double t0, const Vector& x0, int N);

/// Cost of the open-loop control given by samples on the uniform N-step mesh
/// over [t0, T]. Controls are linearly interpolated at RK4 stage times; the
/// terminal cost is the full minimum over pieces.
double evaluate_cost(const ControlProblem& problem, double t0, const Vector& x0,
                     const std::vector<Vector>& controls, int N);

}  // namespace hjlq
