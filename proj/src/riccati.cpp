#include "hjlq/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hjlq/csv.hpp"
#include "hjlq/parallel.hpp"

namespace hjlq {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix riccati_rhs(const Matrix& P, const HamiltonianSlice& H) {
  if (P.rows() != P.cols() || P.rows() != H.Cpp.rows()) {
    throw ValidationError("riccati_rhs: P must be " + std::to_string(H.Cpp.rows()) + " square");
  }
  const Matrix Pt = P.transpose();
  return Pt * H.Cpp * P - Pt * H.Cxp - H.Cxp.transpose() * P - H.Cxx;
}

Matrix riccati_rhs(double t, const Matrix& P, const HamiltonianCoefficients& H) {
  return riccati_rhs(P, H(t));
}

Vector linear_rhs(double t, const Matrix& P, const Vector& q, const HamiltonianSlice& H,
                  const ReferenceTrajectory& reference) {
  Vector dq = P.transpose() * (H.Cpp * q) - H.Cxp.transpose() * q;
  if (reference.active()) dq += H.Cxx * reference(t, q.size());
  return dq;
}

Vector linear_rhs(double t, const Matrix& P, const Vector& q, const HamiltonianCoefficients& H,
                  const ReferenceTrajectory& reference) {
  return linear_rhs(t, P, q, H(t), reference);
}

double scalar_rhs(double t, const Vector& q, const HamiltonianSlice& H,
                  const ReferenceTrajectory& reference) {
  double dr = 0.5 * q.dot(H.Cpp * q);
  if (reference.active()) {
    const Vector xr = reference(t, q.size());
    dr -= 0.5 * xr.dot(H.Cxx * xr);
  }
  return dr;
}

double scalar_rhs(double t, const Vector& q, const HamiltonianCoefficients& H,
                  const ReferenceTrajectory& reference) {
  return scalar_rhs(t, q, H(t), reference);
}

// ---------------------------------------------------------------------------

namespace {

// Flat layout: [P row-major (n*n), q (n), r (1)].
Vector pack(const Matrix& P, const Vector& q, double r) {
  const auto n = q.size();
  Vector z(n * n + n + 1);
  Eigen::Map<RowMajorMatrix>(z.data(), n, n) = P;
  z.segment(n * n, n) = q;
  z(n * n + n) = r;
  return z;
}

void unpack(const Vector& z, Eigen::Index n, Matrix& P, Vector& q, double& r) {
  P = Eigen::Map<const RowMajorMatrix>(z.data(), n, n);
  q = z.segment(n * n, n);
  r = z(n * n + n);
}

}  // namespace

BackwardSolution::BackwardSolution(ControlProblem problem, int N,
                                   std::vector<std::vector<Matrix>> P,
                                   std::vector<std::vector<Vector>> q,
                                   std::vector<std::vector<double>> r)
    : problem_(std::move(problem)),
      ham_(problem_),
      N_(N),
      grid_(0.0, problem_.horizon(), 2 * N) {
  if (N < 1) throw ValidationError("resolution N must be at least 1");
  const std::size_t m = problem_.terminal().size();
  const std::size_t nodes = static_cast<std::size_t>(grid_.steps()) + 1;
  if (P.size() != m || q.size() != m || r.size() != m) {
    throw ValidationError("backward solution needs data for " + std::to_string(m) + " pieces");
  }

  std::vector<HamiltonianSlice> slices(nodes);
  for (std::size_t k = 0; k < nodes; ++k) slices[k] = ham_(grid_.node(static_cast<int>(k)));

  const auto& ref = problem_.reference();
  pieces_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (P[i].size() != nodes || q[i].size() != nodes || r[i].size() != nodes) {
      throw ValidationError("piece " + std::to_string(i + 1) + " needs " +
                            std::to_string(nodes) + " nodal samples");
    }
    auto& pc = pieces_[i];
    pc.P = std::move(P[i]);
    pc.q = std::move(q[i]);
    pc.r = std::move(r[i]);
    pc.dP.resize(nodes);
    pc.dq.resize(nodes);
    pc.dr.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
      const double t = grid_.node(static_cast<int>(k));
      pc.dP[k] = riccati_rhs(pc.P[k], slices[k]);
      pc.dq[k] = linear_rhs(t, pc.P[k], pc.q[k], slices[k], ref);
      pc.dr[k] = scalar_rhs(t, pc.q[k], slices[k], ref);
    }
  }
}

PieceSample BackwardSolution::sample(std::size_t piece, double t) const {
  const auto& pc = pieces_.at(piece);
  const double T = grid_.T();
  if (!(t >= 0.0 && t <= T)) {
    throw ValidationError("sample time " + format_double(t) + " outside [0, " +
                          format_double(T) + "]");
  }
  const int k = grid_.find_node(t);
  if (k >= 0) {
    return {pc.P[k], pc.q[k], pc.r[k], pc.dP[k], pc.dq[k], pc.dr[k]};
  }
  const int lo = std::min(static_cast<int>(std::floor(t / grid_.dt())), grid_.steps() - 1);
  const double w = (t - grid_.node(lo)) / grid_.dt();
  PieceSample s;
  s.P = symmetrize((1.0 - w) * pc.P[lo] + w * pc.P[lo + 1]);
  s.q = (1.0 - w) * pc.q[lo] + w * pc.q[lo + 1];
  s.r = (1.0 - w) * pc.r[lo] + w * pc.r[lo + 1];
  const HamiltonianSlice H = ham_(t);
  s.dP = riccati_rhs(s.P, H);
  s.dq = linear_rhs(t, s.P, s.q, H, problem_.reference());
  s.dr = scalar_rhs(t, s.q, H, problem_.reference());
  return s;
}

int default_resolution(double horizon) {
  return std::max(1, static_cast<int>(std::ceil(200.0 * horizon - 1e-9)));
}

BackwardSolution solve_backward(const ControlProblem& problem, int N, unsigned threads) {
  if (N < 2) throw ValidationError("resolution N must be at least 2");
  const auto n = problem.n();
  const auto& terminal = problem.terminal();
  const std::size_t m = terminal.size();
  const HamiltonianCoefficients ham(problem);
  const auto& ref = problem.reference();

  const OdeRhs rhs = [&](double t, const Vector& z) {
    Matrix P;
    Vector q;
    double r;
    unpack(z, n, P, q, r);
    const HamiltonianSlice H = ham(t);
    return pack(riccati_rhs(P, H), linear_rhs(t, P, q, H, ref), scalar_rhs(t, q, H, ref));
  };
  const StepHook symmetrize_block = [n](Vector& z) {
    Eigen::Map<RowMajorMatrix> P(z.data(), n, n);
    const RowMajorMatrix S = (P + P.transpose()) * 0.5;
    P = S;
  };

  std::vector<std::vector<Matrix>> Ps(m);
  std::vector<std::vector<Vector>> qs(m);
  std::vector<std::vector<double>> rs(m);
  parallel_for(m, threads, [&](std::size_t i) {
    const auto& piece = terminal[i];
    const OdeSolution sol = [&] {
      try {
        return solve_fvp_rk4(rhs, pack(piece.P(), piece.q(), piece.r()), 0.0, problem.horizon(),
                             2 * N, symmetrize_block);
      } catch (const BlowUpError& e) {
        throw BlowUpError(e.step(), e.time(),
                          "Riccati solution for piece " + std::to_string(i + 1) +
                              " escapes in finite time near t = " + format_double(e.time()) +
                              " (" + e.what() + ")");
      }
    }();
    const std::size_t nodes = sol.states.size();
    Ps[i].resize(nodes);
    qs[i].resize(nodes);
    rs[i].resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) unpack(sol.states[k], n, Ps[i][k], qs[i][k], rs[i][k]);
    // Terminal data verbatim.
    Ps[i].back() = piece.P();
    qs[i].back() = piece.q();
    rs[i].back() = piece.r();
  });
  return BackwardSolution(problem, N, std::move(Ps), std::move(qs), std::move(rs));
}

std::vector<std::filesystem::path> write_backward_csv(const BackwardSolution& solution,
                                                      const std::filesystem::path& dir,
                                                      const std::string& prefix) {
  const auto n = solution.n();
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      header.push_back("P_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  for (Eigen::Index i = 0; i < n; ++i) header.push_back("q_" + std::to_string(i + 1));
  header.emplace_back("r");

  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  const auto& grid = solution.grid();
  for (std::size_t p = 0; p < solution.num_pieces(); ++p) {
    auto path = dir / (prefix + std::to_string(p + 1) + ".csv");
    CsvWriter csv(path, header);
    const auto& pc = solution.piece(p);
    for (int k = 0; k <= grid.steps(); ++k) {
      csv << grid.node(k);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) csv << pc.P[k](i, j);
      for (Eigen::Index i = 0; i < n; ++i) csv << pc.q[k](i);
      csv << pc.r[k];
      csv.end_row();
    }
    files.push_back(std::move(path));
  }
  return files;
}

}  // namespace hjlq
