#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "hjlq/core.hpp"
#include "hjlq/ode.hpp"

namespace hjlq {

/// P' = P' Cpp P - P' Cxp - Cxp' P - Cxx.
Matrix riccati_rhs(const Matrix& P, const HamiltonianSlice& H);
Matrix riccati_rhs(double t, const Matrix& P, const HamiltonianCoefficients& H);

/// q' = P' Cpp q - Cxp' q (+ Cxx x_r(t) when tracking).
Vector linear_rhs(double t, const Matrix& P, const Vector& q, const HamiltonianSlice& H,
                  const ReferenceTrajectory& reference);
Vector linear_rhs(double t, const Matrix& P, const Vector& q, const HamiltonianCoefficients& H,
                  const ReferenceTrajectory& reference);

/// r' = 0.5 q' Cpp q (- 0.5 x_r' Cxx x_r when tracking).
double scalar_rhs(double t, const Vector& q, const HamiltonianSlice& H,
                  const ReferenceTrajectory& reference);
double scalar_rhs(double t, const Vector& q, const HamiltonianCoefficients& H,
                  const ReferenceTrajectory& reference);

/// Nodal samples of (P_i, q_i, r_i) for one terminal piece, with the
/// analytic right-hand sides evaluated at the stored states.
struct PieceTrajectory {
  std::vector<Matrix> P;
  std::vector<Vector> q;
  std::vector<double> r;
  std::vector<Matrix> dP;
  std::vector<Vector> dq;
  std::vector<double> dr;
};

/// Snapshot of one piece at a single time.
struct PieceSample {
  Matrix P;
  Vector q;
  double r = 0.0;
  Matrix dP;
  Vector dq;
  double dr = 0.0;
};

/// Backward Riccati data for every terminal piece on a uniform mesh over
/// [0, T] with 2N subintervals. The half-step resolution puts every RK4 stage
/// of an N-step forward rollout on a stored node.
class BackwardSolution {
 public:
  /// Wraps nodal states (P, q, r per piece) computed elsewhere; derivatives
  /// are recomputed from the analytic right-hand sides.
  BackwardSolution(ControlProblem problem, int N, std::vector<std::vector<Matrix>> P,
                   std::vector<std::vector<Vector>> q, std::vector<std::vector<double>> r);

  const ControlProblem& problem() const noexcept { return problem_; }
  const HamiltonianCoefficients& hamiltonian() const noexcept { return ham_; }
  const OdeGrid& grid() const noexcept { return grid_; }
  /// The requested resolution; the stored grid has 2N steps.
  int resolution() const noexcept { return N_; }
  std::size_t num_pieces() const noexcept { return pieces_.size(); }
  Eigen::Index n() const noexcept { return problem_.n(); }
  double horizon() const noexcept { return problem_.horizon(); }
  const PieceTrajectory& piece(std::size_t i) const { return pieces_.at(i); }

  /// Values at t. Stored nodes are returned verbatim when t is within
  /// dt * 1e-9 of a node; otherwise states are linearly interpolated and the
  /// derivatives recomputed at the interpolated state.
  PieceSample sample(std::size_t piece, double t) const;

 private:
  ControlProblem problem_;
  HamiltonianCoefficients ham_;
  int N_;
  OdeGrid grid_;
  std::vector<PieceTrajectory> pieces_;
};

/// Default resolution ceil(200 T).
int default_resolution(double horizon);

/// Integrates the coupled (P, q, r) final-value problem of every terminal
/// piece backward from T to 0 with 2N RK4 steps. P is symmetrized after every
/// step. Pieces are processed on up to `threads` threads (0 = hardware).
BackwardSolution solve_backward(const ControlProblem& problem, int N, unsigned threads = 1);

inline PieceSample sample(const BackwardSolution& solution, std::size_t piece, double t) {
  return solution.sample(piece, t);
}

/// Writes one CSV per piece (`prefix<i>.csv`, 1-based) with columns
/// t, P_1_1..P_n_n (row-major), q_1..q_n, r.
std::vector<std::filesystem::path> write_backward_csv(const BackwardSolution& solution,
                                                      const std::filesystem::path& dir,
                                                      const std::string& prefix = "piece");

}  // namespace hjlq
