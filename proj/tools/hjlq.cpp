#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hjlq/control.hpp"
#include "hjlq/csv.hpp"
#include "hjlq/ode.hpp"
#include "hjlq/parallel.hpp"
#include "hjlq/problems.hpp"
#include "hjlq/riccati.hpp"
#include "hjlq/value.hpp"
#include "hjlq/verify.hpp"

namespace fs = std::filesystem;
using namespace hjlq;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitAcceptance = 4;

struct Options {
  std::string problem = "const-16d";
  int steps = 0;  // 0: ceil(200 T)
  std::vector<std::string> times;
  std::string box = "-2,2,-2,2";
  int resolution = 50;
  double t0 = 0.0;
  std::vector<std::string> x0;
  std::string out = ".";
  std::string level = "quick";
  std::string slice_coords;
};

unsigned solver_threads() {
  const char* env = std::getenv("SOLVER_THREADS");
  if (env == nullptr || *env == '\0') return resolve_threads(0);
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0') throw ValidationError("SOLVER_THREADS must be a non-negative integer");
  return resolve_threads(static_cast<unsigned>(v));
}

double parse_number(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ValidationError(std::string("invalid ") + what + ": '" + s + "'");
  }
  return v;
}

// "0.25T" is a fraction of the horizon; anything else is absolute.
double parse_time(const std::string& s, double T) {
  if (!s.empty() && (s.back() == 'T' || s.back() == 't')) {
    const std::string head = s.substr(0, s.size() - 1);
    return (head.empty() ? 1.0 : parse_number(head, "time")) * T;
  }
  return parse_number(s, "time");
}

std::vector<double> resolve_times(const std::vector<std::string>& given,
                                  std::initializer_list<double> fallback, double T) {
  std::vector<double> out;
  if (given.empty()) {
    for (double f : fallback) out.push_back(f * T);
    return out;
  }
  for (const auto& s : given) {
    const double t = parse_time(s, T);
    if (!(t >= 0.0 && t <= T)) throw ValidationError("time " + s + " outside [0, T]");
    out.push_back(t);
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

Box parse_box(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 4) throw ValidationError("--box expects x1min,x1max,x2min,x2max");
  Box b{parse_number(parts[0], "box"), parse_number(parts[1], "box"),
        parse_number(parts[2], "box"), parse_number(parts[3], "box")};
  if (!(b.x1_min < b.x1_max && b.x2_min < b.x2_max)) throw ValidationError("--box is empty");
  return b;
}

std::pair<int, int> parse_coords(const std::string& s, const ControlProblem& problem) {
  if (s.empty()) return default_slice_coords(problem);
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw ValidationError("--slice-coords expects i,j (1-based)");
  return {static_cast<int>(parse_number(parts[0], "slice coordinate")),
          static_cast<int>(parse_number(parts[1], "slice coordinate"))};
}

// Scalar entries are multiples of e1; "a:b:c..." gives the full vector.
std::vector<Vector> parse_x0(const std::vector<std::string>& given, Eigen::Index n) {
  if (given.empty()) return line_points(n, 1, -2.0, 2.0, 11);
  std::vector<Vector> out;
  for (const auto& s : given) {
    const auto parts = split(s, ':');
    Vector x = Vector::Zero(n);
    if (parts.size() == 1) {
      x(0) = parse_number(parts[0], "x0");
    } else if (static_cast<Eigen::Index>(parts.size()) == n) {
      for (Eigen::Index i = 0; i < n; ++i) x(i) = parse_number(parts[i], "x0");
    } else {
      throw ValidationError("x0 '" + s + "' has " + std::to_string(parts.size()) +
                            " entries, expected 1 or " + std::to_string(n));
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string problem_hash(const ControlProblem& problem) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(problem_to_json(problem).dump())));
  return buf;
}

struct Loaded {
  ControlProblem problem;
  int N;
};

Loaded load(const Options& o) {
  auto problem = resolve_problem(o.problem);
  const int N = o.steps > 0 ? o.steps : default_resolution(problem.horizon());
  return {std::move(problem), N};
}

fs::path prepare_out(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

int cmd_solve(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  auto [problem, N] = load(o);
  const auto sol = solve_backward(problem, N, solver_threads());
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto dir = prepare_out(o.out);
  const auto files = write_backward_csv(sol, dir);

  nlohmann::json manifest{{"problem", o.problem},
                          {"problem_hash", problem_hash(problem)},
                          {"N", N},
                          {"T", problem.horizon()},
                          {"pieces", sol.num_pieces()},
                          {"wall_time_s", wall}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  std::cout << "solved " << sol.num_pieces() << " piece(s), N = " << N << ", wrote "
            << files.size() + 1 << " file(s) to " << dir.string() << '\n';
  return 0;
}

int cmd_slice(const Options& o) {
  auto [problem, N] = load(o);
  const double T = problem.horizon();
  const auto times = resolve_times(o.times, {1.0, 0.75, 0.5, 0.25}, T);
  const auto coords = parse_coords(o.slice_coords, problem);
  const auto pts = slice_points(problem.n(), coords, parse_box(o.box), o.resolution);
  const auto sol = solve_backward(problem, N, solver_threads());
  const auto dir = prepare_out(o.out);
  for (double t : times) {
    CsvWriter csv(dir / ("slice_" + time_tag(t) + ".csv"), {"x1", "x2", "value", "piece"});
    for (const auto& p : pts) {
      const auto v = value_at(sol, t, p.x);
      csv << p.a << p.b << v.value << v.active_piece + 1;
      csv.end_row();
    }
  }
  std::cout << "wrote " << times.size() << " slice(s) to " << dir.string() << '\n';
  return 0;
}

int cmd_residual(const Options& o) {
  auto [problem, N] = load(o);
  const double T = problem.horizon();
  const auto times = resolve_times(o.times, {0.25, 0.5, 0.75}, T);
  const auto coords = parse_coords(o.slice_coords, problem);
  const auto pts = slice_points(problem.n(), coords, parse_box(o.box), o.resolution);
  std::vector<Vector> xs;
  for (const auto& p : pts) xs.push_back(p.x);
  const auto sol = solve_backward(problem, N, solver_threads());
  const auto dir = prepare_out(o.out);
  for (double t : times) {
    for (std::size_t i = 0; i < sol.num_pieces(); ++i) {
      const auto res = residual_grid(sol, i, t, xs);
      CsvWriter csv(dir / ("residual_" + time_tag(t) + "_piece" + std::to_string(i + 1) + ".csv"),
                    {"x1", "x2", "residual"});
      double worst = 0.0;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        csv << pts[j].a << pts[j].b << res[j];
        csv.end_row();
        worst = std::max(worst, std::abs(res[j]));
      }
      std::cout << "t = " << time_tag(t) << " piece " << i + 1
                << " max |residual| = " << format_double(worst) << '\n';
    }
  }
  return 0;
}

int cmd_rollout(const Options& o) {
  auto [problem, N] = load(o);
  const double T = problem.horizon();
  const auto x0s = parse_x0(o.x0, problem.n());
  const auto sol = solve_backward(problem, N, solver_threads());
  const int k = sol.grid().find_node(o.t0);
  if (k < 0 || k % 2 != 0 || o.t0 >= T) {
    throw ValidationError("--t0 must be one of the solve's step times k T / N with k < N");
  }
  const int steps = N - k / 2;

  std::vector<SweepRow> rows(x0s.size());
  parallel_for(x0s.size(), solver_threads(), [&](std::size_t j) {
    auto& row = rows[j];
    const auto v = value_at(sol, o.t0, x0s[j]);
    row.x0 = x0s[j];
    row.trajectory = rollout(sol, o.t0, x0s[j], steps);
    row.piece = v.active_piece;
    row.value = v.value;
    row.rollout_cost = row.trajectory.total_cost;
    row.gap = std::abs(row.value - row.rollout_cost);
  });

  const auto dir = prepare_out(o.out);
  const auto n = problem.n();
  const auto l = problem.l();
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));
  for (Eigen::Index i = 1; i <= l; ++i) header.push_back("u" + std::to_string(i));

  std::vector<std::string> summary_header{"index"};
  for (Eigen::Index i = 1; i <= n; ++i) summary_header.push_back("x0_" + std::to_string(i));
  for (const char* h : {"piece", "value", "cost", "gap"}) summary_header.emplace_back(h);
  CsvWriter summary(dir / "summary.csv", summary_header);

  double worst = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& tr = rows[j].trajectory;
    CsvWriter csv(dir / ("trajectory_" + std::to_string(j + 1) + ".csv"), header);
    for (std::size_t s = 0; s < tr.states.size(); ++s) {
      csv << tr.grid.node(static_cast<int>(s));
      for (Eigen::Index i = 0; i < n; ++i) csv << tr.states[s](i);
      for (Eigen::Index i = 0; i < l; ++i) csv << tr.controls[s](i);
      csv.end_row();
    }
    summary << j + 1;
    for (Eigen::Index i = 0; i < n; ++i) summary << rows[j].x0(i);
    summary << rows[j].piece + 1 << rows[j].value << rows[j].rollout_cost << rows[j].gap;
    summary.end_row();
    worst = std::max(worst, rows[j].gap);
  }
  std::cout << rows.size() << " trajectories, max |value - cost| = " << format_double(worst)
            << '\n';
  return 0;
}

int cmd_verify(const Options& o, bool problem_given) {
  VerifyLevel level;
  if (o.level == "quick") {
    level = VerifyLevel::kQuick;
  } else if (o.level == "full") {
    level = VerifyLevel::kFull;
  } else {
    throw ValidationError("--level must be quick or full");
  }
  const unsigned threads = solver_threads();
  const auto checks = problem_given
                          ? run_problem_checks(resolve_problem(o.problem), level, threads)
                          : run_acceptance_suite(level, threads);
  const auto dir = prepare_out(o.out);
  CsvWriter csv(dir / "report.csv", {"id", "passed", "measured", "tolerance", "description"});
  int failed = 0;
  for (const auto& c : checks) {
    std::printf("%s  %-26s %10.3e  tol %8.1e  %s\n", c.passed ? "PASS" : "FAIL", c.id.c_str(),
                c.measured, c.tolerance, c.description.c_str());
    if (!c.detail.empty()) std::printf("      %s\n", c.detail.c_str());
    csv << c.id << (c.passed ? "1" : "0") << c.measured << c.tolerance << c.description;
    csv.end_row();
    failed += c.passed ? 0 : 1;
  }
  std::printf("%zu/%zu checks passed\n", checks.size() - failed, checks.size());
  return failed == 0 ? 0 : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-horizon LQ control with min-of-quadratics terminal costs"};
  app.require_subcommand(1);
  Options o;

  const std::string problem_help =
      "builtin name (const-16d, tdep-1d, tdep-16d, newton-16d) or path to a JSON problem file";
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--problem", o.problem, problem_help)->capture_default_str();
    sub->add_option("--steps", o.steps, "RK4 resolution N (default ceil(200 T))")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
  };
  const auto grid = [&](CLI::App* sub) {
    sub->add_option("--times", o.times, "times, absolute or as fractions like 0.25T")
        ->delimiter(',');
    sub->add_option("--box", o.box, "x1min,x1max,x2min,x2max")->capture_default_str();
    sub->add_option("--resolution", o.resolution, "points per slice axis")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--slice-coords", o.slice_coords,
                    "1-based coordinates spanning the slice (default 1,l+1 for newton-16d, "
                    "1,2 otherwise)");
  };

  auto* solve = app.add_subcommand("solve", "backward Riccati solve; per-piece CSVs + manifest");
  common(solve);
  auto* slice = app.add_subcommand("slice", "value function on a 2-D slice");
  common(slice);
  grid(slice);
  auto* residual = app.add_subcommand("residual", "HJ residual per piece on a 2-D slice");
  common(residual);
  grid(residual);
  auto* roll = app.add_subcommand("rollout", "closed-loop trajectories and value-cost summary");
  common(roll);
  roll->add_option("--t0", o.t0, "initial time")->capture_default_str();
  roll->add_option("--x0", o.x0, "initial states: scalar (times e1) or colon-separated vector")
      ->delimiter(',')
      ->allow_extra_args(false);
  auto* verify = app.add_subcommand("verify", "run the verification checks");
  auto* verify_problem =
      verify->add_option("--problem", o.problem,
                         "check this problem instead of running the acceptance suite");
  verify->add_option("--level", o.level, "quick or full")->capture_default_str();
  verify->add_option("--out", o.out, "directory for report.csv")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*slice) return cmd_slice(o);
    if (*residual) return cmd_residual(o);
    if (*roll) return cmd_rollout(o);
    if (*verify) return cmd_verify(o, verify_problem->count() > 0);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
