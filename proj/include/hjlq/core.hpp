#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hjlq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Problem data violates a modelling assumption (dimensions, definiteness,
/// unsupported combinations).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration document could not be parsed. `path()` is the JSON pointer
/// of the offending field.
class ParseError : public std::invalid_argument {
 public:
  ParseError(std::string path, const std::string& message)
      : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Floating-point failure during integration (finite-time escape of a Riccati
/// solution, overflow, NaN).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Quadratics and terminal costs
// ---------------------------------------------------------------------------

/// 0.5 x'Px + q'x + r. Shared by every quadratic evaluation in the library so
/// that terminal data and value slices at t = T agree bitwise.
double quadratic_value(const Matrix& P, const Vector& q, double r, const Vector& x);

/// The quadratic function 0.5 x'Px + q'x + r. P is symmetrized on construction.
class Quadratic {
 public:
  Quadratic(Matrix P, Vector q, double r);

  const Matrix& P() const noexcept { return P_; }
  const Vector& q() const noexcept { return q_; }
  double r() const noexcept { return r_; }
  Eigen::Index dim() const noexcept { return q_.size(); }

  double operator()(const Vector& x) const;
  Vector gradient(const Vector& x) const { return P_ * x + q_; }

 private:
  Matrix P_;
  Vector q_;
  double r_;
};

struct TerminalEvaluation {
  double value;
  std::size_t piece;  // 0-based; smallest index attaining the minimum
};

/// Pointwise minimum of finitely many convex quadratics.
class TerminalCost {
 public:
  /// Smallest eigenvalue allowed for a piece's P before it is rejected.
  static constexpr double kPsdTolerance = -1e-10;

  explicit TerminalCost(std::vector<Quadratic> pieces);

  const std::vector<Quadratic>& pieces() const noexcept { return pieces_; }
  std::size_t size() const noexcept { return pieces_.size(); }
  Eigen::Index dim() const noexcept { return pieces_.front().dim(); }
  const Quadratic& operator[](std::size_t i) const { return pieces_.at(i); }

  TerminalEvaluation evaluate(const Vector& x) const;

  /// Pieces of `a` followed by pieces of `b`.
  static TerminalCost concat(const TerminalCost& a, const TerminalCost& b);

 private:
  std::vector<Quadratic> pieces_;
};

// ---------------------------------------------------------------------------
// Time-dependent coefficients
// ---------------------------------------------------------------------------

/// Scalar time profile multiplying a constant matrix.
struct Profile {
  enum class Kind { kConstant, kExp, kSin, kCos };

  Kind kind = Kind::kConstant;
  double c = 1.0;
  double rate = 0.0;  // alpha for kExp, omega for kSin / kCos

  static Profile constant(double c = 1.0) { return {Kind::kConstant, c, 0.0}; }
  static Profile exp(double c, double alpha) { return {Kind::kExp, c, alpha}; }
  static Profile sin(double c, double omega) { return {Kind::kSin, c, omega}; }
  static Profile cos(double c, double omega) { return {Kind::kCos, c, omega}; }

  double operator()(double t) const;
  bool operator==(const Profile&) const = default;
};

std::string to_string(Profile::Kind kind);

/// A matrix-valued function of time. Either profile(t) * base, which is what
/// configuration files can express, or an arbitrary user callable.
class Coefficient {
 public:
  using Function = std::function<Matrix(double)>;

  Coefficient() = default;
  Coefficient(Matrix base, Profile profile = Profile::constant());  // NOLINT

  static Coefficient zero(Eigen::Index rows, Eigen::Index cols);
  static Coefficient identity(Eigen::Index n, Profile profile = Profile::constant());
  static Coefficient custom(Eigen::Index rows, Eigen::Index cols, Function f);

  Matrix operator()(double t) const;

  Eigen::Index rows() const noexcept { return rows_; }
  Eigen::Index cols() const noexcept { return cols_; }

  /// True when the coefficient is profile * base (and hence serializable).
  bool is_profiled() const noexcept { return !custom_; }
  const Matrix& base() const noexcept { return base_; }
  const Profile& profile() const noexcept { return profile_; }

  /// Exact zero for every t (profiled coefficients only; custom ones are
  /// probed at the given times).
  bool is_identically_zero(const std::vector<double>& probe_times) const;

 private:
  Matrix base_;
  Profile profile_;
  Function custom_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
};

// ---------------------------------------------------------------------------
// Reference trajectory
// ---------------------------------------------------------------------------

/// Reference x_r(t) tracked by the running cost 0.5 (x - x_r)' Mxx (x - x_r).
struct ReferenceTrajectory {
  enum class Mode { kNone, kSinCosBlock };

  Mode mode = Mode::kNone;
  double amplitude = 0.0;

  static ReferenceTrajectory none() { return {}; }
  static ReferenceTrajectory sin_cos_block(double amplitude) {
    return {Mode::kSinCosBlock, amplitude};
  }

  bool active() const noexcept { return mode != Mode::kNone; }

  /// First n/2 entries amplitude*sin t, last n/2 amplitude*cos t. Zero vector
  /// when inactive.
  Vector operator()(double t, Eigen::Index n) const;

  bool operator==(const ReferenceTrajectory&) const = default;
};

// ---------------------------------------------------------------------------
// Control problem
// ---------------------------------------------------------------------------

/// Raw data for a linear-quadratic problem with min-of-quadratics terminal
/// cost. Validated when wrapped in a ControlProblem.
struct ProblemData {
  Eigen::Index n = 0;  // state dimension
  Eigen::Index l = 0;  // control dimension
  double horizon = 1.0;
  Coefficient A;    // n x n
  Coefficient B;    // n x l
  Coefficient Mxx;  // n x n, SPD
  Coefficient Muu;  // l x l, SPD
  Coefficient Mxu;  // n x l
  std::vector<Quadratic> terminal;
  ReferenceTrajectory reference;
};

/// Immutable, validated control problem.
///
/// Dynamics x' = A(t)x + B(t)u, running cost
///   0.5 x'Mxx x + 0.5 u'Muu u + x'Mxu u     (no tracking), or
///   0.5 (x - x_r)'Mxx (x - x_r) + 0.5 u'Muu u  (tracking, Mxu == 0),
/// terminal cost min_i 0.5 x'P_i x + q_i'x + r_i.
class ControlProblem {
 public:
  explicit ControlProblem(ProblemData data);

  Eigen::Index n() const noexcept { return data_.n; }
  Eigen::Index l() const noexcept { return data_.l; }
  double horizon() const noexcept { return data_.horizon; }
  const Coefficient& A() const noexcept { return data_.A; }
  const Coefficient& B() const noexcept { return data_.B; }
  const Coefficient& Mxx() const noexcept { return data_.Mxx; }
  const Coefficient& Muu() const noexcept { return data_.Muu; }
  const Coefficient& Mxu() const noexcept { return data_.Mxu; }
  const TerminalCost& terminal() const noexcept { return terminal_; }
  const ReferenceTrajectory& reference() const noexcept { return data_.reference; }
  const ProblemData& data() const noexcept { return data_; }

  /// Same problem with a different terminal cost.
  ControlProblem with_terminal(TerminalCost terminal) const;

  /// Running cost L(t, x, u).
  double running_cost(double t, const Vector& x, const Vector& u) const;

 private:
  ProblemData data_;
  TerminalCost terminal_;
};

// ---------------------------------------------------------------------------
// Hamiltonian coefficients
// ---------------------------------------------------------------------------

struct HamiltonianSlice {
  Matrix Cpp;  // B Muu^-1 B'
  Matrix Cxx;  // Mxx - Mxu Muu^-1 Mxu'
  Matrix Cxp;  // A - B Muu^-1 Mxu'
};

/// Evaluable C_pp, C_xx, C_xp of the Hamiltonian
///   H(t, x, p) = 0.5 p'Cpp p - p'Cxp x - 0.5 x'Cxx x.
/// Muu^-1 is applied through a Cholesky factorization at every evaluation.
class HamiltonianCoefficients {
 public:
  explicit HamiltonianCoefficients(const ControlProblem& problem);

  /// Throws ValidationError if Muu(t) is not positive definite.
  HamiltonianSlice operator()(double t) const;

  Matrix Cpp(double t) const { return (*this)(t).Cpp; }
  Matrix Cxx(double t) const { return (*this)(t).Cxx; }
  Matrix Cxp(double t) const { return (*this)(t).Cxp; }

  Eigen::Index n() const noexcept { return A_.rows(); }

 private:
  Coefficient A_, B_, Mxx_, Muu_, Mxu_;
};

HamiltonianCoefficients derive_hamiltonian_coefficients(const ControlProblem& problem);

/// Exact (P + P') / 2.
Matrix symmetrize(const Matrix& P);

/// Cholesky succeeds (numerically positive definite symmetric matrix).
bool is_positive_definite(const Matrix& M);

}  // namespace hjlq
