#include "hjlq/value.hpp"

#include <string>

#include "hjlq/csv.hpp"

namespace hjlq {

ValueSample value_at(const BackwardSolution& solution, double t, const Vector& x) {
  if (x.size() != solution.n()) {
    throw ValidationError("point has dimension " + std::to_string(x.size()) + ", expected " +
                          std::to_string(solution.n()));
  }
  ValueSample out;
  out.per_piece_values.resize(solution.num_pieces());
  std::vector<PieceSample> samples;
  samples.reserve(solution.num_pieces());
  for (std::size_t i = 0; i < solution.num_pieces(); ++i) {
    samples.push_back(solution.sample(i, t));
    const auto& s = samples.back();
    out.per_piece_values[i] = quadratic_value(s.P, s.q, s.r, x);
    if (i == 0 || out.per_piece_values[i] < out.value) {
      out.value = out.per_piece_values[i];
      out.active_piece = i;
    }
  }
  const auto& active = samples[out.active_piece];
  out.gradient = active.P * x + active.q;
  return out;
}

double hamiltonian(const HamiltonianSlice& H, const ReferenceTrajectory& reference, double t,
                   const Vector& x, const Vector& p) {
  const Vector dx = reference.active() ? Vector(x - reference(t, x.size())) : x;
  return 0.5 * p.dot(H.Cpp * p) - p.dot(H.Cxp * x) - 0.5 * dx.dot(H.Cxx * dx);
}

double hamiltonian(const HamiltonianCoefficients& H, const ReferenceTrajectory& reference,
                   double t, const Vector& x, const Vector& p) {
  return hamiltonian(H(t), reference, t, x, p);
}

std::vector<double> residual_grid(const BackwardSolution& solution, std::size_t piece, double t,
                                  const std::vector<Vector>& xs, TimeDerivative mode) {
  const auto& grid = solution.grid();
  const int k = grid.find_node(t);
  if (k < 0) {
    throw ValidationError("residual time " + format_double(t) + " is not a grid node");
  }
  const auto& pc = solution.piece(piece);

  Matrix dP;
  Vector dq;
  double dr;
  if (mode == TimeDerivative::kAnalytic) {
    dP = pc.dP[k];
    dq = pc.dq[k];
    dr = pc.dr[k];
  } else {
    if (k < 2 || k > grid.steps() - 2) {
      throw ValidationError("five-point stencil at t = " + format_double(t) +
                            " leaves the grid [0, T]");
    }
    // f'(t) ~ (f(t-2h) - 8 f(t-h) + 8 f(t+h) - f(t+2h)) / (12 h)
    const double inv = 1.0 / (12.0 * grid.dt());
    dP = (pc.P[k - 2] - 8.0 * pc.P[k - 1] + 8.0 * pc.P[k + 1] - pc.P[k + 2]) * inv;
    dq = (pc.q[k - 2] - 8.0 * pc.q[k - 1] + 8.0 * pc.q[k + 1] - pc.q[k + 2]) * inv;
    dr = (pc.r[k - 2] - 8.0 * pc.r[k - 1] + 8.0 * pc.r[k + 1] - pc.r[k + 2]) * inv;
  }

  const HamiltonianSlice H = solution.hamiltonian()(grid.node(k));
  const auto& ref = solution.problem().reference();
  const double tk = grid.node(k);
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    if (x.size() != solution.n()) throw ValidationError("residual point has wrong dimension");
    const double dV = quadratic_value(dP, dq, dr, x);
    const Vector p = pc.P[k] * x + pc.q[k];
    out.push_back(-dV + hamiltonian(H, ref, tk, x, p));
  }
  return out;
}

}  // namespace hjlq
