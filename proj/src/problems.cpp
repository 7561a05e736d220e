#include "hjlq/problems.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace hjlq {

using nlohmann::json;

ControlProblem build_constant_example(Eigen::Index n, double horizon) {
  if (n < 2) throw ValidationError("constant example needs n >= 2");
  ProblemData d;
  d.n = n;
  d.l = n;
  d.horizon = horizon;
  d.A = Coefficient::identity(n);
  d.B = Coefficient::identity(n);
  d.Mxx = Coefficient::identity(n);
  d.Muu = Coefficient::identity(n);
  d.Mxu = Coefficient::zero(n, n);
  Vector shift = Vector::Zero(n);
  shift.head(2).setOnes();
  d.terminal = {Quadratic(Matrix::Identity(n, n), shift, 1.0),
                Quadratic(Matrix::Identity(n, n), -shift, 1.0)};
  return ControlProblem(std::move(d));
}

ControlProblem build_scalar_example(double horizon) {
  ProblemData d;
  d.n = 1;
  d.l = 1;
  d.horizon = horizon;
  d.A = Coefficient::identity(1);
  d.B = Coefficient::identity(1);
  d.Mxx = Coefficient::identity(1);
  d.Muu = Coefficient::identity(1);
  d.Mxu = Coefficient::zero(1, 1);
  d.terminal = {Quadratic(Matrix::Identity(1, 1), Vector::Zero(1), 0.0)};
  return ControlProblem(std::move(d));
}

ControlProblem build_timedep_example(Eigen::Index n, TimeDependentVariant variant,
                                     double horizon) {
  ProblemData d;
  d.n = n;
  d.l = n;
  d.horizon = horizon;
  d.A = Coefficient(0.5 * Matrix::Identity(n, n));
  d.B = Coefficient::identity(n);
  d.Mxx = Coefficient::identity(n, Profile::exp(0.5, -1.0));
  d.Muu = Coefficient::identity(n, Profile::exp(2.0, -1.0));
  d.Mxu = Coefficient::zero(n, n);

  switch (variant) {
    case TimeDependentVariant::k1dTwoPieces: {
      if (n != 1) throw ValidationError("1d-m2 variant requires n = 1");
      const Matrix one = Matrix::Identity(1, 1);
      d.terminal = {Quadratic(one, Vector::Constant(1, 0.9), 0.405),
                    Quadratic(one, Vector::Constant(1, -0.9), 0.405)};
      break;
    }
    case TimeDependentVariant::k16dFourPieces: {
      if (n < 2) throw ValidationError("16d-m4 variant requires n >= 2");
      // Polynomial coefficients 0.5 (pieces 1, 2) and 0.25 (pieces 3, 4) on
      // x1^2 and x2^2 give P = diag(1, 1, 0, ...) and diag(0.5, 0.5, 0, ...).
      Matrix wide = Matrix::Zero(n, n);
      wide(0, 0) = wide(1, 1) = 1.0;
      Matrix flat = Matrix::Zero(n, n);
      flat(0, 0) = flat(1, 1) = 0.5;
      Vector e1 = Vector::Zero(n);
      e1(0) = 0.9;
      Vector e2 = Vector::Zero(n);
      e2(1) = 0.9;
      d.terminal = {Quadratic(wide, e1, 0.405), Quadratic(wide, -e1, 0.405),
                    Quadratic(flat, e2, 0.405), Quadratic(flat, -e2, 0.405)};
      break;
    }
  }
  return ControlProblem(std::move(d));
}

ControlProblem build_newton_example(Eigen::Index l, double horizon) {
  if (l < 1) throw ValidationError("newton example needs l >= 1");
  const Eigen::Index n = 2 * l;
  ProblemData d;
  d.n = n;
  d.l = l;
  d.horizon = horizon;
  Matrix A = Matrix::Zero(n, n);
  A.topRightCorner(l, l).setIdentity();
  Matrix B = Matrix::Zero(n, l);
  B.bottomRows(l).setIdentity();
  d.A = Coefficient(A);
  d.B = Coefficient(B);
  d.Mxx = Coefficient::identity(n);
  d.Muu = Coefficient(Matrix::Identity(l, l) / 1000.0);
  d.Mxu = Coefficient::zero(n, l);
  d.reference = ReferenceTrajectory::sin_cos_block(5.0);
  Vector a = Vector::Zero(n);
  a(0) = 1.0 / 80.0;
  const Matrix Q = Matrix::Identity(n, n) / 160.0;
  d.terminal = {Quadratic(Q, a, 1.0 / 80.0), Quadratic(Q, -a, 1.0 / 80.0)};
  return ControlProblem(std::move(d));
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"const-16d", "tdep-1d", "tdep-16d", "newton-16d"};
  return names;
}

std::pair<int, int> default_slice_coords(const ControlProblem& problem) {
  if (problem.n() == 1) return {1, 1};
  if (problem.reference().active()) return {1, static_cast<int>(problem.n() / 2) + 1};
  return {1, 2};
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) {
  return path + "/" + std::to_string(i);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(child(path, key), "missing required field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return j.get<double>();
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.get<long long>();
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path.empty() ? "/" : path, "expected an object");
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ParseError(child(path, it.key()), "unknown field");
  }
}

Matrix parse_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                    const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  Matrix M(rows, cols);
  const bool nested = !j.empty() && j.front().is_array();
  if (nested) {
    if (static_cast<Eigen::Index>(j.size()) != rows) {
      throw ParseError(path, "expected " + std::to_string(rows) + " rows, got " +
                                 std::to_string(j.size()));
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto& row = j[r];
      const auto rp = child(path, r);
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        throw ParseError(rp, "expected a row of " + std::to_string(cols) + " numbers");
      }
      for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = number(row[c], child(rp, c));
    }
  } else {
    if (static_cast<Eigen::Index>(j.size()) != rows * cols) {
      throw ParseError(path, "expected " + std::to_string(rows * cols) +
                                 " row-major entries, got " + std::to_string(j.size()));
    }
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        M(r, c) = number(j[r * cols + c], child(path, r * cols + c));
  }
  return M;
}

Vector parse_vector(const json& j, Eigen::Index n, const std::string& path) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw ParseError(path, "expected an array of " + std::to_string(n) + " numbers");
  }
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = number(j[i], child(path, i));
  return v;
}

Profile parse_profile(const json& j, const std::string& path) {
  require_object(j, path);
  const auto& kind_j = require(j, "kind", path);
  if (!kind_j.is_string()) throw ParseError(child(path, "kind"), "expected a string");
  const auto kind = kind_j.get<std::string>();
  const double c = j.contains("c") ? number(j["c"], child(path, "c")) : 1.0;
  if (kind == "constant") {
    reject_unknown(j, {"kind", "c"}, path);
    return Profile::constant(c);
  }
  if (kind == "exp") {
    reject_unknown(j, {"kind", "c", "alpha"}, path);
    return Profile::exp(c, number(require(j, "alpha", path), child(path, "alpha")));
  }
  if (kind == "sin" || kind == "cos") {
    reject_unknown(j, {"kind", "c", "omega"}, path);
    const double omega = number(require(j, "omega", path), child(path, "omega"));
    return kind == "sin" ? Profile::sin(c, omega) : Profile::cos(c, omega);
  }
  throw ParseError(child(path, "kind"), "unknown profile kind '" + kind +
                                            "' (expected constant, exp, sin or cos)");
}

Coefficient parse_coefficient(const json& j, Eigen::Index rows, Eigen::Index cols,
                              const std::string& path) {
  if (j.is_array()) return Coefficient(parse_matrix(j, rows, cols, path));
  require_object(j, path);
  reject_unknown(j, {"matrix", "profile"}, path);
  Matrix base = parse_matrix(require(j, "matrix", path), rows, cols, child(path, "matrix"));
  Profile profile = j.contains("profile") ? parse_profile(j["profile"], child(path, "profile"))
                                          : Profile::constant();
  return Coefficient(std::move(base), profile);
}

ReferenceTrajectory parse_reference(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, {"mode", "amplitude"}, path);
  const auto& mode_j = require(j, "mode", path);
  if (!mode_j.is_string()) throw ParseError(child(path, "mode"), "expected a string");
  const auto mode = mode_j.get<std::string>();
  if (mode == "none") return ReferenceTrajectory::none();
  if (mode == "sin-cos-block") {
    return ReferenceTrajectory::sin_cos_block(
        number(require(j, "amplitude", path), child(path, "amplitude")));
  }
  throw ParseError(child(path, "mode"),
                   "unknown reference mode '" + mode + "' (expected none or sin-cos-block)");
}

Eigen::Index dimension(const json& doc, const char* key) {
  const auto v = integer(require(doc, key, ""), child("", key));
  if (v < 1) throw ParseError(child("", key), "must be a positive integer");
  return static_cast<Eigen::Index>(v);
}

ControlProblem load_builtin(const json& doc) {
  const auto& name_j = doc["builtin"];
  if (!name_j.is_string()) throw ParseError("/builtin", "expected a string");
  const auto name = name_j.get<std::string>();
  const double T = doc.contains("T") ? number(doc["T"], "/T") : 1.0;
  if (name == "const-16d") {
    reject_unknown(doc, {"builtin", "n", "T"}, "");
    return build_constant_example(doc.contains("n") ? dimension(doc, "n") : 16, T);
  }
  if (name == "tdep-1d") {
    reject_unknown(doc, {"builtin", "T"}, "");
    return build_timedep_example(1, TimeDependentVariant::k1dTwoPieces, T);
  }
  if (name == "tdep-16d") {
    reject_unknown(doc, {"builtin", "n", "T"}, "");
    return build_timedep_example(doc.contains("n") ? dimension(doc, "n") : 16,
                                 TimeDependentVariant::k16dFourPieces, T);
  }
  if (name == "newton-16d") {
    reject_unknown(doc, {"builtin", "l", "T"}, "");
    return build_newton_example(doc.contains("l") ? dimension(doc, "l") : 8, T);
  }
  throw ParseError("/builtin", "unknown builtin '" + name + "'");
}

}  // namespace

ControlProblem load_problem(const json& doc) {
  require_object(doc, "");
  if (doc.contains("builtin")) return load_builtin(doc);

  reject_unknown(doc, {"n", "l", "T", "A", "B", "Mxx", "Muu", "Mxu", "terminal", "x_ref"}, "");
  ProblemData d;
  d.n = dimension(doc, "n");
  d.l = dimension(doc, "l");
  d.horizon = number(require(doc, "T", ""), "/T");
  d.A = parse_coefficient(require(doc, "A", ""), d.n, d.n, "/A");
  d.B = parse_coefficient(require(doc, "B", ""), d.n, d.l, "/B");
  d.Mxx = parse_coefficient(require(doc, "Mxx", ""), d.n, d.n, "/Mxx");
  d.Muu = parse_coefficient(require(doc, "Muu", ""), d.l, d.l, "/Muu");
  d.Mxu = doc.contains("Mxu") ? parse_coefficient(doc["Mxu"], d.n, d.l, "/Mxu")
                              : Coefficient::zero(d.n, d.l);

  const auto& terminal = require(doc, "terminal", "");
  if (!terminal.is_array() || terminal.empty()) {
    throw ParseError("/terminal", "expected a non-empty array of {P, q, r}");
  }
  for (std::size_t i = 0; i < terminal.size(); ++i) {
    const auto path = child("/terminal", i);
    const auto& piece = terminal[i];
    require_object(piece, path);
    reject_unknown(piece, {"P", "q", "r"}, path);
    Matrix P = parse_matrix(require(piece, "P", path), d.n, d.n, child(path, "P"));
    Vector q = piece.contains("q") ? parse_vector(piece["q"], d.n, child(path, "q"))
                                   : Vector::Zero(d.n);
    const double r = piece.contains("r") ? number(piece["r"], child(path, "r")) : 0.0;
    d.terminal.emplace_back(std::move(P), std::move(q), r);
  }
  if (doc.contains("x_ref")) d.reference = parse_reference(doc["x_ref"], "/x_ref");
  return ControlProblem(std::move(d));
}

ControlProblem load_problem_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("/", std::string("invalid JSON: ") + e.what());
  }
  return load_problem(doc);
}

ControlProblem resolve_problem(const std::string& ref) {
  for (const auto& name : builtin_names()) {
    if (ref == name) return load_problem(json{{"builtin", name}});
  }
  std::ifstream in(ref);
  if (!in) {
    std::string known;
    for (const auto& name : builtin_names()) known += (known.empty() ? "" : ", ") + name;
    throw ValidationError("problem '" + ref + "' is neither a builtin (" + known +
                          ") nor a readable file");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return load_problem_text(ss.str());
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json coefficient_json(const Coefficient& c, const char* name) {
  if (!c.is_profiled()) {
    throw ValidationError(std::string(name) + " is a custom callable and cannot be serialized");
  }
  json p{{"kind", to_string(c.profile().kind)}, {"c", c.profile().c}};
  switch (c.profile().kind) {
    case Profile::Kind::kExp:
      p["alpha"] = c.profile().rate;
      break;
    case Profile::Kind::kSin:
    case Profile::Kind::kCos:
      p["omega"] = c.profile().rate;
      break;
    case Profile::Kind::kConstant:
      break;
  }
  return json{{"matrix", matrix_json(c.base())}, {"profile", std::move(p)}};
}

bool same_coefficient(const Coefficient& a, const Coefficient& b) {
  if (!a.is_profiled() || !b.is_profiled()) return false;
  return a.rows() == b.rows() && a.cols() == b.cols() && a.base() == b.base() &&
         a.profile() == b.profile();
}

}  // namespace

json problem_to_json(const ControlProblem& problem) {
  json doc;
  doc["n"] = problem.n();
  doc["l"] = problem.l();
  doc["T"] = problem.horizon();
  doc["A"] = coefficient_json(problem.A(), "A");
  doc["B"] = coefficient_json(problem.B(), "B");
  doc["Mxx"] = coefficient_json(problem.Mxx(), "Mxx");
  doc["Muu"] = coefficient_json(problem.Muu(), "Muu");
  doc["Mxu"] = coefficient_json(problem.Mxu(), "Mxu");
  json terminal = json::array();
  for (const auto& piece : problem.terminal().pieces()) {
    json q = json::array();
    for (Eigen::Index i = 0; i < piece.dim(); ++i) q.push_back(piece.q()(i));
    terminal.push_back({{"P", matrix_json(piece.P())}, {"q", std::move(q)}, {"r", piece.r()}});
  }
  doc["terminal"] = std::move(terminal);
  const auto& ref = problem.reference();
  doc["x_ref"] = ref.active() ? json{{"mode", "sin-cos-block"}, {"amplitude", ref.amplitude}}
                              : json{{"mode", "none"}};
  return doc;
}

bool same_problem(const ControlProblem& a, const ControlProblem& b) {
  if (a.n() != b.n() || a.l() != b.l() || a.horizon() != b.horizon()) return false;
  if (!same_coefficient(a.A(), b.A()) || !same_coefficient(a.B(), b.B()) ||
      !same_coefficient(a.Mxx(), b.Mxx()) || !same_coefficient(a.Muu(), b.Muu()) ||
      !same_coefficient(a.Mxu(), b.Mxu())) {
    return false;
  }
  if (!(a.reference() == b.reference())) return false;
  const auto& pa = a.terminal().pieces();
  const auto& pb = b.terminal().pieces();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i].P() != pb[i].P() || pa[i].q() != pb[i].q() || pa[i].r() != pb[i].r()) return false;
  }
  return true;
}

}  // namespace hjlq
