#include "hjlq/ode.hpp"

#include <cmath>
#include <string>

namespace hjlq {

OdeGrid::OdeGrid(double t0, double T, int steps) : t0_(t0), T_(T), steps_(steps) {
  if (steps < 1) throw ValidationError("step count must be at least 1");
  if (!(t0 < T)) throw ValidationError("grid needs t0 < T");
  dt_ = (T - t0) / steps;
}

double OdeGrid::node(int k) const noexcept {
  if (k <= 0) return t0_;
  if (k >= steps_) return T_;
  return t0_ + k * dt_;
}

std::vector<double> OdeGrid::nodes() const {
  std::vector<double> out(steps_ + 1);
  for (int k = 0; k <= steps_; ++k) out[k] = node(k);
  return out;
}

int OdeGrid::find_node(double t, double tol) const noexcept {
  const double s = (t - t0_) / dt_;
  const double k = std::round(s);
  if (k < 0 || k > steps_) return -1;
  const int ki = static_cast<int>(k);
  return std::abs(node(ki) - t) <= dt_ * tol ? ki : -1;
}

namespace {

void check_finite(const Vector& v, int step, double time) {
  if (!v.allFinite()) {
    throw BlowUpError(step, time,
                      "blow-up at t_" + std::to_string(step) + " = " + std::to_string(time));
  }
}

// One RK4 step from (t, z) with signed step h; stage times t, t + h/2, t + h.
Vector rk4_step(const OdeRhs& g, double t, double t_half, double t_next, double h,
                const Vector& z, int step) {
  const Vector d1 = h * g(t, z);
  check_finite(d1, step, t);
  const Vector d2 = h * g(t_half, z + 0.5 * d1);
  check_finite(d2, step, t_half);
  const Vector d3 = h * g(t_half, z + 0.5 * d2);
  check_finite(d3, step, t_half);
  const Vector d4 = h * g(t_next, z + d3);
  check_finite(d4, step, t_next);
  Vector next = z + d1 / 6.0 + d2 / 3.0 + d3 / 3.0 + d4 / 6.0;
  check_finite(next, step, t_next);
  return next;
}

}  // namespace

OdeSolution solve_fvp_rk4(const OdeRhs& rhs, const Vector& z_T, double t, double T, int N,
                          const StepHook& hook) {
  OdeSolution sol{OdeGrid(t, T, N), std::vector<Vector>(N + 1)};
  const auto& grid = sol.grid;
  Vector z = z_T;
  if (hook) hook(z);
  sol.states[N] = z;
  for (int k = N; k >= 1; --k) {
    const double tk = grid.node(k);
    const double t_half = grid.t0() + (k - 0.5) * grid.dt();
    z = rk4_step(rhs, tk, t_half, grid.node(k - 1), -grid.dt(), z, k);
    if (hook) hook(z);
    sol.states[k - 1] = z;
  }
  return sol;
}

OdeSolution solve_ivp_rk4(const OdeRhs& rhs, const Vector& z_0, double t0, double T, int N,
                          const StepHook& hook) {
  OdeSolution sol{OdeGrid(t0, T, N), std::vector<Vector>(N + 1)};
  const auto& grid = sol.grid;
  Vector z = z_0;
  if (hook) hook(z);
  sol.states[0] = z;
  for (int k = 0; k < N; ++k) {
    const double tk = grid.node(k);
    const double t_half = grid.t0() + (k + 0.5) * grid.dt();
    z = rk4_step(rhs, tk, t_half, grid.node(k + 1), grid.dt(), z, k);
    if (hook) hook(z);
    sol.states[k + 1] = z;
  }
  return sol;
}

std::vector<std::pair<int, double>> convergence_order(const OdeRhs& rhs, const Vector& z_T,
                                                      double t, double T,
                                                      const Vector& reference,
                                                      const std::vector<int>& Ns) {
  std::vector<std::pair<int, double>> out;
  out.reserve(Ns.size());
  for (int N : Ns) {
    const auto sol = solve_fvp_rk4(rhs, z_T, t, T, N);
    out.emplace_back(N, (sol.front() - reference).lpNorm<Eigen::Infinity>());
  }
  return out;
}

}  // namespace hjlq
