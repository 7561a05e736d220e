#include "hjlq/control.hpp"

#include <cmath>
#include <string>

#include "hjlq/csv.hpp"
#include "hjlq/value.hpp"

namespace hjlq {

namespace {

Vector feedback_from(const ControlProblem& problem, const PieceSample& s, double t,
                     const Vector& x) {
  const Matrix muu = problem.Muu()(t);
  Eigen::LLT<Matrix> llt(symmetrize(muu));
  if (llt.info() != Eigen::Success) {
    throw ValidationError("coefficient not positive definite at t = " + format_double(t) +
                          " (Muu)");
  }
  const Matrix B = problem.B()(t);
  const Vector rhs = B.transpose() * (s.P * x + s.q) + problem.Mxu()(t).transpose() * x;
  return -llt.solve(rhs);
}

}  // namespace

Vector feedback(const BackwardSolution& solution, std::size_t piece, double t, const Vector& x) {
  if (x.size() != solution.n()) throw ValidationError("feedback: state has wrong dimension");
  return feedback_from(solution.problem(), solution.sample(piece, t), t, x);
}

std::size_t select_piece(const BackwardSolution& solution, double t0, const Vector& x0) {
  return value_at(solution, t0, x0).active_piece;
}

Trajectory rollout(const BackwardSolution& solution, double t0, const Vector& x0, int N) {
  const auto& problem = solution.problem();
  const auto n = problem.n();
  const double T = problem.horizon();
  if (x0.size() != n) throw ValidationError("rollout: x0 has wrong dimension");
  if (!(t0 >= 0.0 && t0 < T)) throw ValidationError("rollout: t0 must lie in [0, T)");

  const OdeGrid fwd(t0, T, N);
  const auto& bwd = solution.grid();
  // Stage times t_j, t_j + dt/2, t_j + dt must all be stored nodes.
  for (int j = 0; j <= 2 * N; ++j) {
    const double s = j % 2 == 0 ? fwd.node(j / 2) : t0 + (j / 2 + 0.5) * fwd.dt();
    if (bwd.find_node(s) < 0) {
      throw ValidationError("rollout grid misaligned with backward grid at t = " +
                            format_double(s) + " (use t0 on a full-step node and N = " +
                            std::to_string(solution.resolution()) + ")");
    }
  }

  const std::size_t k = select_piece(solution, t0, x0);
  const auto& ham = solution.hamiltonian();

  const OdeRhs rhs = [&](double s, const Vector& z) {
    const Vector x = z.head(n);
    const PieceSample ps = solution.sample(k, s);
    const HamiltonianSlice H = ham(s);
    Vector dz(n + 1);
    dz.head(n) = (H.Cxp - H.Cpp * ps.P) * x - H.Cpp * ps.q;
    dz(n) = problem.running_cost(s, x, feedback_from(problem, ps, s, x));
    return dz;
  };

  Vector z0(n + 1);
  z0.head(n) = x0;
  z0(n) = 0.0;
  const OdeSolution sol = solve_ivp_rk4(rhs, z0, t0, T, N);

  Trajectory traj{sol.grid, {}, {}, 0.0, 0.0, 0.0, 0.0, k};
  traj.states.reserve(N + 1);
  traj.controls.reserve(N + 1);
  for (int j = 0; j <= N; ++j) {
    const double s = sol.grid.node(j);
    traj.states.push_back(sol.states[j].head(n));
    traj.controls.push_back(feedback_from(problem, solution.sample(k, s), s, traj.states.back()));
  }
  const Vector& xT = traj.states.back();
  traj.accumulated_cost = sol.back()(n);
  traj.terminal_cost = problem.terminal()[k](xT);
  traj.terminal_cost_min = problem.terminal().evaluate(xT).value;
  traj.total_cost = traj.accumulated_cost + traj.terminal_cost;
  return traj;
}

double evaluate_cost(const ControlProblem& problem, double t0, const Vector& x0,
                     const std::vector<Vector>& controls, int N) {
  const auto n = problem.n();
  const auto l = problem.l();
  if (x0.size() != n) throw ValidationError("evaluate_cost: x0 has wrong dimension");
  if (controls.size() != static_cast<std::size_t>(N) + 1) {
    throw ValidationError("evaluate_cost: expected " + std::to_string(N + 1) +
                          " control samples, got " + std::to_string(controls.size()));
  }
  for (const auto& u : controls) {
    if (u.size() != l) throw ValidationError("evaluate_cost: control sample has wrong dimension");
  }
  const OdeGrid grid(t0, problem.horizon(), N);

  const auto control_at = [&](double s) -> Vector {
    const double pos = (s - grid.t0()) / grid.dt();
    int j = static_cast<int>(std::floor(pos));
    if (j < 0) j = 0;
    if (j >= N) j = N - 1;
    const double w = pos - j;
    return (1.0 - w) * controls[j] + w * controls[j + 1];
  };

  const OdeRhs rhs = [&](double s, const Vector& z) {
    const Vector x = z.head(n);
    const Vector u = control_at(s);
    Vector dz(n + 1);
    dz.head(n) = problem.A()(s) * x + problem.B()(s) * u;
    dz(n) = problem.running_cost(s, x, u);
    return dz;
  };

  Vector z0(n + 1);
  z0.head(n) = x0;
  z0(n) = 0.0;
  const OdeSolution sol = solve_ivp_rk4(rhs, z0, t0, problem.horizon(), N);
  const Vector xT = sol.back().head(n);
  return sol.back()(n) + problem.terminal().evaluate(xT).value;
}

}  // namespace hjlq
