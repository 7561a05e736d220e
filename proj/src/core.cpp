#include "hjlq/core.hpp"

#include <cmath>
#include <sstream>

namespace hjlq {

namespace {

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void require_shape(const Coefficient& c, Eigen::Index rows, Eigen::Index cols,
                   const char* name) {
  if (c.rows() != rows || c.cols() != cols) {
    throw ValidationError(std::string(name) + " must be " + dims(rows, cols) +
                          ", got " + dims(c.rows(), c.cols()));
  }
}

std::string format_time(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

}  // namespace

Matrix symmetrize(const Matrix& P) { return (P + P.transpose()) * 0.5; }

bool is_positive_definite(const Matrix& M) {
  if (M.rows() != M.cols() || !M.allFinite()) return false;
  Eigen::LLT<Matrix> llt(M);
  return llt.info() == Eigen::Success;
}

double quadratic_value(const Matrix& P, const Vector& q, double r, const Vector& x) {
  return 0.5 * x.dot(P * x) + q.dot(x) + r;
}

// ---------------------------------------------------------------------------

Quadratic::Quadratic(Matrix P, Vector q, double r)
    : P_(std::move(P)), q_(std::move(q)), r_(r) {
  if (P_.rows() != P_.cols()) {
    throw ValidationError("quadratic P must be square, got " + dims(P_.rows(), P_.cols()));
  }
  if (P_.rows() != q_.size()) {
    throw ValidationError("quadratic q has length " + std::to_string(q_.size()) +
                          " but P is " + dims(P_.rows(), P_.cols()));
  }
  if (!P_.allFinite() || !q_.allFinite() || !std::isfinite(r_)) {
    throw ValidationError("quadratic has non-finite entries");
  }
  P_ = symmetrize(P_);
}

double Quadratic::operator()(const Vector& x) const {
  if (x.size() != dim()) {
    throw ValidationError("point has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(dim()));
  }
  return quadratic_value(P_, q_, r_, x);
}

TerminalCost::TerminalCost(std::vector<Quadratic> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ValidationError("terminal cost needs at least one piece");
  const auto n = pieces_.front().dim();
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& piece = pieces_[i];
    if (piece.dim() != n) {
      throw ValidationError("terminal piece " + std::to_string(i + 1) + " has dimension " +
                            std::to_string(piece.dim()) + ", expected " + std::to_string(n));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(piece.P(), Eigen::EigenvaluesOnly);
    const double smallest = eig.eigenvalues().minCoeff();
    if (smallest < kPsdTolerance) {
      throw ValidationError("terminal piece " + std::to_string(i + 1) +
                            " P is not positive semi-definite (smallest eigenvalue " +
                            format_time(smallest) + ")");
    }
  }
}

TerminalEvaluation TerminalCost::evaluate(const Vector& x) const {
  TerminalEvaluation best{pieces_.front()(x), 0};
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    const double v = pieces_[i](x);
    if (v < best.value) best = {v, i};
  }
  return best;
}

TerminalCost TerminalCost::concat(const TerminalCost& a, const TerminalCost& b) {
  std::vector<Quadratic> pieces = a.pieces_;
  pieces.insert(pieces.end(), b.pieces_.begin(), b.pieces_.end());
  return TerminalCost(std::move(pieces));
}

// ---------------------------------------------------------------------------

double Profile::operator()(double t) const {
  switch (kind) {
    case Kind::kConstant:
      return c;
    case Kind::kExp:
      return c * std::exp(rate * t);
    case Kind::kSin:
      return c * std::sin(rate * t);
    case Kind::kCos:
      return c * std::cos(rate * t);
  }
  return c;
}

std::string to_string(Profile::Kind kind) {
  switch (kind) {
    case Profile::Kind::kConstant:
      return "constant";
    case Profile::Kind::kExp:
      return "exp";
    case Profile::Kind::kSin:
      return "sin";
    case Profile::Kind::kCos:
      return "cos";
  }
  return "constant";
}

Coefficient::Coefficient(Matrix base, Profile profile)
    : base_(std::move(base)), profile_(profile), rows_(base_.rows()), cols_(base_.cols()) {}

Coefficient Coefficient::zero(Eigen::Index rows, Eigen::Index cols) {
  return Coefficient(Matrix::Zero(rows, cols));
}

Coefficient Coefficient::identity(Eigen::Index n, Profile profile) {
  return Coefficient(Matrix::Identity(n, n), profile);
}

Coefficient Coefficient::custom(Eigen::Index rows, Eigen::Index cols, Function f) {
  Coefficient c;
  c.custom_ = std::move(f);
  c.rows_ = rows;
  c.cols_ = cols;
  return c;
}

Matrix Coefficient::operator()(double t) const {
  if (custom_) {
    Matrix m = custom_(t);
    if (m.rows() != rows_ || m.cols() != cols_) {
      throw ValidationError("custom coefficient returned " + dims(m.rows(), m.cols()) +
                            ", declared " + dims(rows_, cols_));
    }
    return m;
  }
  if (profile_.kind == Profile::Kind::kConstant && profile_.c == 1.0) return base_;
  return profile_(t) * base_;
}

bool Coefficient::is_identically_zero(const std::vector<double>& probe_times) const {
  if (!custom_) return base_.isZero(0.0) || profile_.c == 0.0;
  for (double t : probe_times) {
    if (!(*this)(t).isZero(0.0)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Vector ReferenceTrajectory::operator()(double t, Eigen::Index n) const {
  Vector xr = Vector::Zero(n);
  if (mode == Mode::kSinCosBlock) {
    const Eigen::Index half = n / 2;
    xr.head(half).setConstant(amplitude * std::sin(t));
    xr.tail(n - half).setConstant(amplitude * std::cos(t));
  }
  return xr;
}

// ---------------------------------------------------------------------------

ControlProblem::ControlProblem(ProblemData data)
    : data_(std::move(data)), terminal_(data_.terminal) {
  const auto n = data_.n;
  const auto l = data_.l;
  if (n < 1) throw ValidationError("state dimension n must be positive");
  if (l < 1) throw ValidationError("control dimension l must be positive");
  if (!(data_.horizon > 0.0) || !std::isfinite(data_.horizon)) {
    throw ValidationError("horizon T must be positive and finite");
  }
  require_shape(data_.A, n, n, "A");
  require_shape(data_.B, n, l, "B");
  require_shape(data_.Mxx, n, n, "Mxx");
  require_shape(data_.Muu, l, l, "Muu");
  require_shape(data_.Mxu, n, l, "Mxu");
  if (terminal_.dim() != n) {
    throw ValidationError("terminal pieces have dimension " + std::to_string(terminal_.dim()) +
                          ", expected n = " + std::to_string(n));
  }

  const std::vector<double> probes{0.0, 0.5 * data_.horizon, data_.horizon};
  for (double t : probes) {
    const Matrix muu = data_.Muu(t);
    const Matrix mxx = data_.Mxx(t);
    if (!muu.isApprox(muu.transpose(), 1e-12) || !is_positive_definite(symmetrize(muu))) {
      throw ValidationError("Muu is not symmetric positive definite at t = " + format_time(t));
    }
    if (!mxx.isApprox(mxx.transpose(), 1e-12) || !is_positive_definite(symmetrize(mxx))) {
      throw ValidationError("Mxx is not symmetric positive definite at t = " + format_time(t));
    }
  }

  if (data_.reference.active()) {
    if (!data_.Mxu.is_identically_zero(probes)) {
      throw ValidationError("reference tracking requires Mxu == 0");
    }
    if (n % 2 != 0) {
      throw ValidationError("sin-cos-block reference requires even n, got " + std::to_string(n));
    }
  }
  data_.terminal = terminal_.pieces();
}

ControlProblem ControlProblem::with_terminal(TerminalCost terminal) const {
  ProblemData d = data_;
  d.terminal = terminal.pieces();
  return ControlProblem(std::move(d));
}

double ControlProblem::running_cost(double t, const Vector& x, const Vector& u) const {
  const Vector dx = data_.reference.active() ? Vector(x - data_.reference(t, n())) : x;
  double cost = 0.5 * dx.dot(data_.Mxx(t) * dx) + 0.5 * u.dot(data_.Muu(t) * u);
  if (!data_.reference.active()) cost += x.dot(data_.Mxu(t) * u);
  return cost;
}

// ---------------------------------------------------------------------------

HamiltonianCoefficients::HamiltonianCoefficients(const ControlProblem& problem)
    : A_(problem.A()),
      B_(problem.B()),
      Mxx_(problem.Mxx()),
      Muu_(problem.Muu()),
      Mxu_(problem.Mxu()) {}

HamiltonianSlice HamiltonianCoefficients::operator()(double t) const {
  const Matrix muu = Muu_(t);
  Eigen::LLT<Matrix> llt(symmetrize(muu));
  if (llt.info() != Eigen::Success || !muu.allFinite()) {
    throw ValidationError("coefficient not positive definite at t = " + format_time(t) +
                          " (Muu)");
  }
  const Matrix B = B_(t);
  const Matrix Mxu = Mxu_(t);
  const Matrix inv_Bt = llt.solve(B.transpose());     // Muu^-1 B'
  const Matrix inv_Mxut = llt.solve(Mxu.transpose()); // Muu^-1 Mxu'

  HamiltonianSlice s;
  s.Cpp = symmetrize(B * inv_Bt);
  s.Cxx = symmetrize(Mxx_(t) - Mxu * inv_Mxut);
  s.Cxp = A_(t) - B * inv_Mxut;
  return s;
}

HamiltonianCoefficients derive_hamiltonian_coefficients(const ControlProblem& problem) {
  return HamiltonianCoefficients(problem);
}

}  // namespace hjlq
