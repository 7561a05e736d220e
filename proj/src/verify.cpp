#include "hjlq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hjlq/csv.hpp"
#include "hjlq/parallel.hpp"

namespace hjlq {

namespace tol = tolerances;

double scalar_riccati_oracle(double t, double T) {
  const double s = std::sqrt(2.0);
  return 1.0 + s * std::tanh(s * (T - t));
}

double scalar_riccati_oracle_derivative(double t, double T) {
  const double th = std::tanh(std::sqrt(2.0) * (T - t));
  return -2.0 * (1.0 - th * th);
}

double oracle_self_check(double T, int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = T * i / (samples - 1);
    const double p = scalar_riccati_oracle(t, T);
    const double ode = p * p - 2.0 * p - 1.0;
    worst = std::max(worst, std::abs(scalar_riccati_oracle_derivative(t, T) - ode));
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

ConvergenceStudy finish_study(std::vector<ConvergenceRow> rows) {
  ConvergenceStudy study{std::move(rows), {}, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i + 1 < study.rows.size(); ++i) {
    const double ratio = study.rows[i].error / study.rows[i + 1].error;
    study.ratios.push_back(ratio);
    const double scale = static_cast<double>(study.rows[i + 1].N) / study.rows[i].N;
    study.min_order = std::min(study.min_order, std::log(ratio) / std::log(scale));
  }
  if (study.ratios.empty()) study.min_order = 0.0;
  return study;
}

double max_initial_p_error(const BackwardSolution& a, const BackwardSolution& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.num_pieces(); ++i) {
    worst = std::max(worst,
                     (a.piece(i).P.front() - b.piece(i).P.front()).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace

ConvergenceStudy run_convergence_study(const ControlProblem& problem, const std::vector<int>& Ns,
                                       unsigned threads) {
  if (Ns.empty()) return {};
  const int finest = *std::max_element(Ns.begin(), Ns.end());
  const auto reference = solve_backward(problem, 8 * finest, threads);
  std::vector<ConvergenceRow> rows;
  for (int N : Ns) {
    rows.push_back({N, max_initial_p_error(solve_backward(problem, N, threads), reference)});
  }
  return finish_study(std::move(rows));
}

ConvergenceStudy scalar_riccati_convergence(const std::vector<int>& Ns) {
  const auto problem = build_scalar_example(1.0);
  const double exact = scalar_riccati_oracle(0.0, 1.0);
  std::vector<ConvergenceRow> rows;
  for (int N : Ns) {
    rows.push_back({N, std::abs(solve_backward(problem, N).piece(0).P.front()(0, 0) - exact)});
  }
  return finish_study(std::move(rows));
}

ConvergenceStudy exponential_convergence(const std::vector<int>& Ns) {
  const OdeRhs rhs = [](double, const Vector& z) { return z; };
  const auto errors = convergence_order(rhs, Vector::Constant(1, std::exp(1.0)), 0.0, 1.0,
                                        Vector::Constant(1, 1.0), Ns);
  std::vector<ConvergenceRow> rows;
  for (const auto& [N, err] : errors) rows.push_back({N, err});
  return finish_study(std::move(rows));
}

// ---------------------------------------------------------------------------

std::vector<SweepRow> run_value_cost_sweep(const BackwardSolution& solution, double t0,
                                           const std::vector<Vector>& x0s, unsigned threads) {
  std::vector<SweepRow> rows(x0s.size());
  parallel_for(x0s.size(), threads, [&](std::size_t j) {
    auto& row = rows[j];
    row.x0 = x0s[j];
    const auto v = value_at(solution, t0, x0s[j]);
    row.trajectory = rollout(solution, t0, x0s[j], solution.resolution());
    row.piece = v.active_piece;
    row.value = v.value;
    row.rollout_cost = row.trajectory.total_cost;
    row.gap = std::abs(row.value - row.rollout_cost);
  });
  return rows;
}

std::vector<Vector> line_points(Eigen::Index n, int coord, double lo, double hi, int count) {
  std::vector<Vector> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vector x = Vector::Zero(n);
    x(coord - 1) = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<SlicePoint> slice_points(Eigen::Index n, std::pair<int, int> coords, const Box& box,
                                     int resolution) {
  const auto [c1, c2] = coords;
  if (c1 < 1 || c1 > n || c2 < 1 || c2 > n) {
    throw ValidationError("slice coordinates must lie in 1.." + std::to_string(n));
  }
  if (resolution < 1) throw ValidationError("slice resolution must be positive");
  const auto axis = [resolution](double lo, double hi, int i) {
    return resolution == 1 ? lo : lo + (hi - lo) * i / (resolution - 1);
  };
  std::vector<SlicePoint> out;
  const int rows = c1 == c2 ? 1 : resolution;
  out.reserve(static_cast<std::size_t>(rows) * resolution);
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < resolution; ++i) {
      SlicePoint p;
      p.a = axis(box.x1_min, box.x1_max, i);
      p.b = c1 == c2 ? 0.0 : axis(box.x2_min, box.x2_max, j);
      p.x = Vector::Zero(n);
      p.x(c1 - 1) = p.a;
      if (c1 != c2) p.x(c2 - 1) = p.b;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<ResidualSurveyRow> run_residual_survey(const BackwardSolution& solution,
                                                   const std::vector<double>& times,
                                                   const Box& box, int resolution,
                                                   std::pair<int, int> coords,
                                                   TimeDerivative mode, unsigned threads) {
  const auto pts = slice_points(solution.n(), coords, box, resolution);
  std::vector<Vector> xs;
  xs.reserve(pts.size());
  for (const auto& p : pts) xs.push_back(p.x);

  const std::size_t m = solution.num_pieces();
  std::vector<ResidualSurveyRow> rows(times.size() * m);
  parallel_for(rows.size(), threads, [&](std::size_t idx) {
    const double t = times[idx / m];
    const std::size_t piece = idx % m;
    const auto res = residual_grid(solution, piece, t, xs, mode);
    double worst = 0.0;
    for (double r : res) worst = std::max(worst, std::abs(r));
    rows[idx] = {t, piece, worst};
  });
  return rows;
}

BackwardSolution exact_scalar_solution(int N, double horizon) {
  auto problem = build_scalar_example(horizon);
  const OdeGrid grid(0.0, horizon, 2 * N);
  std::vector<std::vector<Matrix>> P(1);
  std::vector<std::vector<Vector>> q(1);
  std::vector<std::vector<double>> r(1);
  for (int k = 0; k <= grid.steps(); ++k) {
    P[0].push_back(Matrix::Constant(1, 1, scalar_riccati_oracle(grid.node(k), horizon)));
    q[0].push_back(Vector::Zero(1));
    r[0].push_back(0.0);
  }
  P[0].back() = problem.terminal()[0].P();
  return BackwardSolution(std::move(problem), N, std::move(P), std::move(q), std::move(r));
}

double max_asymmetry(const BackwardSolution& solution) {
  double worst = 0.0;
  for (std::size_t i = 0; i < solution.num_pieces(); ++i) {
    for (const auto& P : solution.piece(i).P) {
      worst = std::max(worst, (P - P.transpose()).lpNorm<Eigen::Infinity>());
    }
  }
  return worst;
}

double mirror_gap(const BackwardSolution& solution, const std::vector<double>& times,
                  const std::vector<Vector>& points) {
  double worst = 0.0;
  for (double t : times) {
    for (const auto& x : points) {
      const Vector neg = -x;
      worst = std::max(worst, std::abs(value_at(solution, t, x).value -
                                       value_at(solution, t, neg).value));
    }
  }
  return worst;
}

bool is_mirror_symmetric(const ControlProblem& problem) {
  if (problem.reference().active()) return false;
  const auto& pieces = problem.terminal().pieces();
  for (const auto& a : pieces) {
    const bool matched = std::any_of(pieces.begin(), pieces.end(), [&](const Quadratic& b) {
      return a.P() == b.P() && a.q() == -b.q() && a.r() == b.r();
    });
    if (!matched) return false;
  }
  return true;
}

double min_plus_gap(const ControlProblem& problem, int N, const std::vector<double>& times,
                    const std::vector<Vector>& points, unsigned threads) {
  const auto full = solve_backward(problem, N, threads);
  const std::size_t m = problem.terminal().size();
  std::vector<BackwardSolution> singles;
  singles.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    singles.push_back(
        solve_backward(problem.with_terminal(TerminalCost({problem.terminal()[i]})), N, 1));
  }
  double worst = 0.0;
  for (double t : times) {
    for (const auto& x : points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& s : singles) best = std::min(best, value_at(s, t, x).value);
      worst = std::max(worst, std::abs(value_at(full, t, x).value - best));
    }
  }
  return worst;
}

std::pair<double, std::size_t> gradient_check(const BackwardSolution& solution, double t,
                                              const std::vector<Vector>& points) {
  const double h = tol::kGradientStep;
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& x : points) {
    const auto center = value_at(solution, t, x);
    Vector fd(x.size());
    bool smooth = true;
    for (Eigen::Index j = 0; j < x.size() && smooth; ++j) {
      Vector xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      const auto vp = value_at(solution, t, xp);
      const auto vm = value_at(solution, t, xm);
      if (vp.active_piece != center.active_piece || vm.active_piece != center.active_piece) {
        smooth = false;
        break;
      }
      fd(j) = (vp.value - vm.value) / (2.0 * h);
    }
    if (!smooth) continue;
    ++checked;
    const double scale = std::max(1.0, center.gradient.lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (fd - center.gradient).lpNorm<Eigen::Infinity>() / scale);
  }
  return {worst, checked};
}

bool terminal_condition_holds(const BackwardSolution& solution,
                              const std::vector<Vector>& points) {
  const auto& terminal = solution.problem().terminal();
  for (const auto& x : points) {
    const auto v = value_at(solution, solution.horizon(), x);
    const auto e = terminal.evaluate(x);
    if (v.value != e.value || v.active_piece != e.piece) return false;
  }
  return true;
}

OptimalityProbe run_optimality_probe(const BackwardSolution& solution, double t0,
                                     const Vector& x0, int count, double eps_max,
                                     std::uint64_t seed) {
  const auto& problem = solution.problem();
  const int N = solution.resolution();
  const auto traj = rollout(solution, t0, x0, N);
  OptimalityProbe probe;
  probe.synthesized_cost = traj.total_cost;
  probe.self_consistency =
      std::abs(evaluate_cost(problem, t0, x0, traj.controls, N) - traj.total_cost);
  probe.min_perturbed_cost = std::numeric_limits<double>::infinity();
  probe.worst_improvement = -std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eps_dist(0.0, eps_max);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * M_PI);
  std::uniform_int_distribution<int> freq_dist(1, 4);
  std::uniform_int_distribution<Eigen::Index> channel_dist(0, problem.l() - 1);
  const double T = problem.horizon();

  for (int trial = 0; trial < count; ++trial) {
    const double eps = eps_max - eps_dist(rng);  // (0, eps_max]
    const double phase = phase_dist(rng);
    const int freq = freq_dist(rng);
    const auto channel = channel_dist(rng);
    auto controls = traj.controls;
    for (int j = 0; j <= N; ++j) {
      const double s = traj.grid.node(j);
      controls[j](channel) += eps * std::sin(freq * M_PI * s / T + phase);
    }
    const double cost = evaluate_cost(problem, t0, x0, controls, N);
    probe.min_perturbed_cost = std::min(probe.min_perturbed_cost, cost);
    probe.worst_improvement = std::max(probe.worst_improvement, probe.synthesized_cost - cost);
  }
  return probe;
}

// ---------------------------------------------------------------------------
// Packaged checks

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CheckResult below(std::string id, std::string description, double measured, double tolerance,
                  std::string detail = {}) {
  return {std::move(id), std::move(description), std::isfinite(measured) && measured < tolerance,
          measured, tolerance, std::move(detail)};
}

CheckResult at_most(std::string id, std::string description, double measured, double tolerance,
                    std::string detail = {}) {
  return {std::move(id), std::move(description), std::isfinite(measured) && measured <= tolerance,
          measured, tolerance, std::move(detail)};
}

std::vector<Vector> xs_of(const std::vector<SlicePoint>& pts) {
  std::vector<Vector> xs;
  xs.reserve(pts.size());
  for (const auto& p : pts) xs.push_back(p.x);
  return xs;
}

struct Sizes {
  int slice;       // slice resolution
  int sweep;       // initial conditions per builtin
  int probes;      // optimality perturbations
};

Sizes sizes_for(VerifyLevel level) {
  return level == VerifyLevel::kFull ? Sizes{50, 11, 20} : Sizes{11, 5, 5};
}

CheckResult at_least(std::string id, std::string description, double measured, double bound,
                     std::string detail = {}) {
  return {std::move(id), std::move(description), std::isfinite(measured) && measured >= bound,
          measured, bound, std::move(detail)};
}

CheckResult ratio_check(std::string id, std::string description, const ConvergenceStudy& s,
                        double lo, double hi) {
  bool ok = !s.ratios.empty();
  std::ostringstream detail;
  for (std::size_t i = 0; i < s.ratios.size(); ++i) {
    const double r = s.ratios[i];
    ok = ok && r >= lo && r <= hi;
    detail << (i ? "; " : "") << "N=" << s.rows[i].N << "->" << s.rows[i + 1].N
           << " ratio " << r;
  }
  detail << " (accepted [" << lo << ", " << hi << "])";
  return {std::move(id), std::move(description), ok, s.ratios.empty() ? 0.0 : s.ratios.back(),
          hi, detail.str()};
}

std::vector<CheckResult> oracle_checks() {
  std::vector<CheckResult> out;
  const double self = oracle_self_check(1.0, 1000);
  out.push_back(at_most("oracle-self-check",
                        "closed-form scalar Riccati satisfies its ODE at 1000 points", self,
                        tol::kOracleSelfCheck));
  const auto sol = solve_backward(build_scalar_example(1.0), 200);
  const double err = std::abs(sol.piece(0).P.front()(0, 0) - scalar_riccati_oracle(0.0, 1.0));
  out.push_back(below("closed-form-riccati", "scalar Riccati P(0), N=200, vs 1+sqrt2 tanh(sqrt2)",
                      err, tol::kClosedFormRiccati));
  out.back().passed = out.back().passed && out.front().passed;
  const std::vector<int> Ns{25, 50, 100};
  out.push_back(ratio_check("order4-riccati", "scalar Riccati error ratio N -> 2N",
                            scalar_riccati_convergence(Ns), tol::kOrderRatioLow,
                            tol::kOrderRatioHigh));
  out.push_back(ratio_check("order4-exponential", "z'=z error ratio N -> 2N",
                            exponential_convergence(Ns), tol::kOrderRatioLow,
                            tol::kOrderRatioHigh));
  return out;
}

double max_gap(const std::vector<SweepRow>& rows) {
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.gap);
  return worst;
}

std::vector<double> fractions(double T, std::initializer_list<double> fs) {
  std::vector<double> out;
  for (double f : fs) out.push_back(f * T);
  return out;
}

}  // namespace

std::vector<CheckResult> run_acceptance_suite(VerifyLevel level, unsigned threads) {
  const Sizes sz = sizes_for(level);
  std::vector<CheckResult> out;
  const Box box;

  const auto const16 = build_constant_example(16, 1.0);
  const auto tdep1 = build_timedep_example(1, TimeDependentVariant::k1dTwoPieces, 1.0);
  const auto tdep16 = build_timedep_example(16, TimeDependentVariant::k16dFourPieces, 1.0);
  const auto newton2 = build_newton_example(2, 1.0);
  const auto newton8 = build_newton_example(8, 1.0);
  const int N = default_resolution(1.0);

  const auto sol_const = solve_backward(const16, N, threads);
  const auto sol_tdep1 = solve_backward(tdep1, N, threads);
  const auto sol_tdep16 = solve_backward(tdep16, N, threads);
  const auto sol_newton2 = solve_backward(newton2, N, threads);
  const auto sol_newton8 = solve_backward(newton8, N, threads);

  // 1. Residual bound.
  {
    const auto rows = run_residual_survey(sol_const, fractions(1.0, {0.25, 0.5, 0.75}), box,
                                          sz.slice, {1, 2}, TimeDerivative::kFiniteDifference,
                                          threads);
    double worst = 0.0;
    std::ostringstream detail;
    for (const auto& r : rows) {
      worst = std::max(worst, r.max_abs);
      detail << "t=" << r.time << " piece " << r.piece + 1 << ": " << fmt(r.max_abs) << "; ";
    }
    out.push_back(below("1-residual", "const-16d max |-dV_i/dt + H| on [-2,2]^2 slice", worst,
                        tol::kResidual, detail.str()));
  }

  // 2 and 3. Closed form and convergence order.
  {
    auto oracles = oracle_checks();
    oracles[1].id = "2-closed-form-riccati";
    oracles[0].id = "2-oracle-self-check";
    oracles[2].id = "3-order4-riccati";
    oracles[3].id = "3-order4-exponential";
    out.insert(out.end(), oracles.begin(), oracles.end());
  }

  // 4. Value-cost agreement.
  {
    const auto check = [&](const char* id, const BackwardSolution& sol, double tolerance) {
      const auto x0s = line_points(sol.n(), 1, -2.0, 2.0, sz.sweep);
      const auto rows = run_value_cost_sweep(sol, 0.0, x0s, threads);
      out.push_back(below(id, "max |V(0,x0) - rollout cost| over x0 in [-2,2] e1", max_gap(rows),
                          tolerance, std::to_string(x0s.size()) + " initial conditions"));
    };
    check("4-value-cost-const-16d", sol_const, tol::kValueCost);
    check("4-value-cost-tdep-1d", sol_tdep1, tol::kValueCost);
    check("4-value-cost-tdep-16d", sol_tdep16, tol::kValueCost);
    check("4-value-cost-newton-l2", sol_newton2, tol::kValueCostTracking);
  }

  // 5. Optimality probe.
  {
    const auto sol = solve_backward(build_scalar_example(1.0), N);
    const auto probe = run_optimality_probe(sol, 0.0, Vector::Constant(1, 1.0), sz.probes, 0.1,
                                            20240601);
    out.push_back(at_most("5-optimality", "max(synthesized - perturbed cost), eps <= 0.1",
                          probe.worst_improvement, tol::kOptimality,
                          "synthesized " + format_double(probe.synthesized_cost) +
                              ", cheapest perturbed " + format_double(probe.min_perturbed_cost)));
  }

  // 6. Min-plus combination.
  {
    const auto pts = xs_of(slice_points(16, {1, 2}, box, sz.slice));
    const double gap =
        min_plus_gap(const16, N, fractions(1.0, {0.0, 0.25, 0.5, 0.75, 1.0}), pts, threads);
    out.push_back(at_most("6-min-plus", "V under 2 pieces vs min of single-piece solves", gap,
                          tol::kMinPlus));
  }

  // 7. Terminal condition.
  {
    bool ok = true;
    for (const auto* sol : {&sol_const, &sol_tdep1, &sol_tdep16, &sol_newton2, &sol_newton8}) {
      const auto coords = default_slice_coords(sol->problem());
      ok = ok && terminal_condition_holds(*sol, xs_of(slice_points(sol->n(), coords, box,
                                                                   sz.slice)));
    }
    out.push_back({"7-terminal", "value_at(T, x) == evaluate_terminal(x) bitwise", ok,
                   ok ? 0.0 : 1.0, 0.0, "all builtins, slice meshes"});
  }

  // 8. Structural invariants.
  {
    double asym = 0.0;
    for (const auto* sol : {&sol_const, &sol_tdep1, &sol_tdep16, &sol_newton2, &sol_newton8}) {
      asym = std::max(asym, max_asymmetry(*sol));
    }
    out.push_back(at_most("8-symmetry", "max |P - P'| over nodes, all builtins", asym, 0.0));

    double mirror = 0.0;
    const auto times = fractions(1.0, {0.0, 0.25, 0.5, 0.75, 1.0});
    for (const auto* sol : {&sol_const, &sol_tdep1, &sol_tdep16}) {
      const auto coords = default_slice_coords(sol->problem());
      mirror = std::max(mirror,
                        mirror_gap(*sol, times, xs_of(slice_points(sol->n(), coords, box,
                                                                   sz.slice))));
    }
    out.push_back(below("8-mirror", "max |V(t,x) - V(t,-x)|, const-16d and tdep builtins",
                        mirror, tol::kMirror));

    double grad = 0.0;
    std::size_t checked = 0;
    for (const auto* sol : {&sol_const, &sol_tdep1, &sol_tdep16}) {
      const auto coords = default_slice_coords(sol->problem());
      const auto pts = xs_of(slice_points(sol->n(), coords, box, sz.slice));
      for (double t : {0.0, 0.5}) {
        const auto [err, n] = gradient_check(*sol, t, pts);
        grad = std::max(grad, err);
        checked += n;
      }
    }
    out.push_back(below("8-gradient", "central differences vs gradient (relative)", grad,
                        tol::kGradientRelative, std::to_string(checked) + " points checked"));
  }
  return out;
}

std::vector<CheckResult> run_problem_checks(const ControlProblem& problem, VerifyLevel level,
                                            unsigned threads) {
  const Sizes sz = sizes_for(level);
  const Box box;
  const double T = problem.horizon();
  const int N = default_resolution(T);
  std::vector<CheckResult> out = oracle_checks();

  const auto sol = solve_backward(problem, N, threads);
  const auto coords = default_slice_coords(problem);
  const auto pts = xs_of(slice_points(problem.n(), coords, box, sz.slice));

  out.push_back(at_most("symmetry", "max |P - P'| over nodes", max_asymmetry(sol), 0.0));
  const bool terminal_ok = terminal_condition_holds(sol, pts);
  out.push_back({"terminal", "value_at(T, x) == evaluate_terminal(x) bitwise", terminal_ok,
                 terminal_ok ? 0.0 : 1.0, 0.0, ""});

  {
    const auto rows = run_residual_survey(sol, fractions(T, {0.25, 0.5, 0.75}), box, sz.slice,
                                          coords, TimeDerivative::kAnalytic, threads);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.max_abs);
    // Algebraic identity between the FVP right-hand sides and the Hamiltonian.
    const double scale = 1.0 + std::abs(worst);
    out.push_back(below("residual-identity", "residual with analytic dV/dt (rounding only)",
                        worst / scale, 1e-9));
  }
  {
    const auto rows = run_residual_survey(sol, fractions(T, {0.25, 0.5, 0.75}), box, sz.slice,
                                          coords, TimeDerivative::kFiniteDifference, threads);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.max_abs);
    out.push_back(below("residual", "max |-dV_i/dt + H| on the default slice", worst,
                        tol::kResidual));
  }

  {
    const auto x0s = line_points(problem.n(), 1, -2.0, 2.0, sz.sweep);
    const auto rows = run_value_cost_sweep(sol, 0.0, x0s, threads);
    const double tolerance =
        problem.reference().active() ? tol::kValueCostTracking : tol::kValueCost;
    out.push_back(below("value-cost", "max |V(0,x0) - rollout cost| over x0 in [-2,2] e1",
                        max_gap(rows), tolerance));
  }

  if (is_mirror_symmetric(problem)) {
    out.push_back(below("mirror", "max |V(t,x) - V(t,-x)|",
                        mirror_gap(sol, fractions(T, {0.0, 0.5, 1.0}), pts), tol::kMirror));
  }

  {
    const auto [err, n] = gradient_check(sol, 0.0, pts);
    out.push_back(below("gradient", "central differences vs gradient (relative)", err,
                        tol::kGradientRelative, std::to_string(n) + " points checked"));
  }

  if (level == VerifyLevel::kFull) {
    const auto study = run_convergence_study(problem, {N / 2, N}, threads);
    out.push_back(at_least("convergence-order", "empirical order of P(0) vs 8x reference (>=)",
                           study.min_order, tol::kEmpiricalOrder));
  }
  return out;
}

}  // namespace hjlq
