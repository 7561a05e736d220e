#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "hjlq/core.hpp"

namespace hjlq {

/// Uniform mesh t_k = t0 + k (T - t0) / N, k = 0..N. Nodes are computed from
/// the integer index, never accumulated, and the endpoints are exact.
class OdeGrid {
 public:
  OdeGrid() : OdeGrid(0.0, 1.0, 1) {}
  OdeGrid(double t0, double T, int steps);

  double t0() const noexcept { return t0_; }
  double T() const noexcept { return T_; }
  int steps() const noexcept { return steps_; }
  double dt() const noexcept { return dt_; }

  double node(int k) const noexcept;
  std::vector<double> nodes() const;

  /// Index k with |node(k) - t| <= dt * tol, or -1.
  int find_node(double t, double tol = 1e-9) const noexcept;

 private:
  double t0_;
  double T_;
  int steps_;
  double dt_;
};

struct OdeSolution {
  OdeGrid grid;
  std::vector<Vector> states;  // states[k] = z(grid.node(k))

  const Vector& front() const { return states.front(); }
  const Vector& back() const { return states.back(); }
};

/// Right-hand side g(t, z) of z' = g(t, z).
using OdeRhs = std::function<Vector(double, const Vector&)>;

/// Called on every accepted state (including the initial one) before it is
/// stored; lets callers project onto structure, e.g. symmetrize a matrix block.
using StepHook = std::function<void(Vector&)>;

/// Thrown when a stage produces a non-finite value.
class BlowUpError : public NumericError {
 public:
  BlowUpError(int step, double time, const std::string& what)
      : NumericError(what), step_(step), time_(time) {}
  int step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  int step_;
  double time_;
};

/// Classical fourth-order Runge-Kutta, marching backward from z(T) = z_T to
/// time t in N steps. The returned solution is indexed forward in time:
/// states[N] = z_T, states[0] ~ z(t).
OdeSolution solve_fvp_rk4(const OdeRhs& rhs, const Vector& z_T, double t, double T, int N,
                          const StepHook& hook = {});

/// Forward counterpart: z(t0) = z_0, marching to T in N steps.
OdeSolution solve_ivp_rk4(const OdeRhs& rhs, const Vector& z_0, double t0, double T, int N,
                          const StepHook& hook = {});

/// Max-norm error of the backward solve at t against `reference`, for each N.
std::vector<std::pair<int, double>> convergence_order(const OdeRhs& rhs, const Vector& z_T,
                                                      double t, double T,
                                                      const Vector& reference,
                                                      const std::vector<int>& Ns);

}  // namespace hjlq
