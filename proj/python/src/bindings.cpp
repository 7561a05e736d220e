// Python bindings. Piece indices are 1-based on this side.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hjlq/control.hpp"
#include "hjlq/problems.hpp"
#include "hjlq/riccati.hpp"
#include "hjlq/value.hpp"
#include "hjlq/verify.hpp"

namespace py = pybind11;
using namespace hjlq;

namespace {

std::size_t piece_index(const BackwardSolution& sol, std::size_t piece) {
  if (piece < 1 || piece > sol.num_pieces()) {
    throw ValidationError("piece must lie in 1.." + std::to_string(sol.num_pieces()));
  }
  return piece - 1;
}

Matrix stack(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  Matrix out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = rows[i].transpose();
  return out;
}

std::vector<double> nodes_of(const OdeGrid& g) { return g.nodes(); }

py::dict check_dict(const CheckResult& c) {
  py::dict d;
  d["id"] = c.id;
  d["description"] = c.description;
  d["passed"] = c.passed;
  d["measured"] = c.measured;
  d["tolerance"] = c.tolerance;
  d["detail"] = c.detail;
  return d;
}

VerifyLevel parse_level(const std::string& level) {
  if (level == "quick") return VerifyLevel::kQuick;
  if (level == "full") return VerifyLevel::kFull;
  throw ValidationError("level must be 'quick' or 'full'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "LQ optimal control with min-of-quadratics terminal costs";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError",
                                                            PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", validation.ptr());
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<ControlProblem>(m, "ControlProblem")
      .def_property_readonly("n", &ControlProblem::n)
      .def_property_readonly("l", &ControlProblem::l)
      .def_property_readonly("horizon", &ControlProblem::horizon)
      .def_property_readonly("num_pieces",
                             [](const ControlProblem& p) { return p.terminal().size(); })
      .def_property_readonly("tracking",
                             [](const ControlProblem& p) { return p.reference().active(); })
      .def("terminal_cost",
           [](const ControlProblem& p, const Vector& x) {
             const auto e = p.terminal().evaluate(x);
             return py::make_tuple(e.value, e.piece + 1);
           })
      .def("to_json", [](const ControlProblem& p) { return problem_to_json(p).dump(); })
      .def("__repr__", [](const ControlProblem& p) {
        return "<ControlProblem n=" + std::to_string(p.n()) + " l=" + std::to_string(p.l()) +
               " pieces=" + std::to_string(p.terminal().size()) + ">";
      });

  m.def("constant_example", &build_constant_example, py::arg("n") = 16, py::arg("T") = 1.0);
  m.def("scalar_example", &build_scalar_example, py::arg("T") = 1.0);
  m.def(
      "timedep_example",
      [](Eigen::Index n, double T) {
        return build_timedep_example(n,
                                     n == 1 ? TimeDependentVariant::k1dTwoPieces
                                            : TimeDependentVariant::k16dFourPieces,
                                     T);
      },
      py::arg("n") = 16, py::arg("T") = 1.0);
  m.def("newton_example", &build_newton_example, py::arg("l") = 8, py::arg("T") = 1.0);
  m.def("load_problem", [](const std::string& text) { return load_problem_text(text); },
        py::arg("json_text"));
  m.def("resolve_problem", &resolve_problem, py::arg("ref"));
  m.def("builtin_names", &builtin_names);

  py::class_<BackwardSolution>(m, "BackwardSolution")
      .def_property_readonly("problem", &BackwardSolution::problem)
      .def_property_readonly("resolution", &BackwardSolution::resolution)
      .def_property_readonly("num_pieces", &BackwardSolution::num_pieces)
      .def_property_readonly("times",
                             [](const BackwardSolution& s) { return nodes_of(s.grid()); })
      .def(
          "P",
          [](const BackwardSolution& s, std::size_t piece, double t) {
            return s.sample(piece_index(s, piece), t).P;
          },
          py::arg("piece"), py::arg("t"))
      .def(
          "q",
          [](const BackwardSolution& s, std::size_t piece, double t) {
            return s.sample(piece_index(s, piece), t).q;
          },
          py::arg("piece"), py::arg("t"))
      .def(
          "r",
          [](const BackwardSolution& s, std::size_t piece, double t) {
            return s.sample(piece_index(s, piece), t).r;
          },
          py::arg("piece"), py::arg("t"))
      .def("write_csv",
           [](const BackwardSolution& s, const std::string& dir) {
             std::vector<std::string> out;
             for (const auto& p : write_backward_csv(s, dir)) out.push_back(p.string());
             return out;
           });

  m.def(
      "solve_backward",
      [](const ControlProblem& p, int N, unsigned threads) {
        py::gil_scoped_release release;
        return solve_backward(p, N > 0 ? N : default_resolution(p.horizon()), threads);
      },
      py::arg("problem"), py::arg("N") = 0, py::arg("threads") = 1,
      "Backward Riccati solve; N = 0 picks ceil(200 T).");

  m.def(
      "value_at",
      [](const BackwardSolution& s, double t, const Vector& x) {
        const auto v = value_at(s, t, x);
        py::dict d;
        d["value"] = v.value;
        d["gradient"] = v.gradient;
        d["piece"] = v.active_piece + 1;
        d["per_piece"] = v.per_piece_values;
        return d;
      },
      py::arg("solution"), py::arg("t"), py::arg("x"));

  m.def(
      "residual",
      [](const BackwardSolution& s, std::size_t piece, double t, const std::vector<Vector>& xs) {
        return residual_grid(s, piece_index(s, piece), t, xs);
      },
      py::arg("solution"), py::arg("piece"), py::arg("t"), py::arg("xs"));

  m.def(
      "feedback",
      [](const BackwardSolution& s, std::size_t piece, double t, const Vector& x) {
        return feedback(s, piece_index(s, piece), t, x);
      },
      py::arg("solution"), py::arg("piece"), py::arg("t"), py::arg("x"));

  m.def(
      "rollout",
      [](const BackwardSolution& s, double t0, const Vector& x0, int N) {
        const auto tr = rollout(s, t0, x0, N > 0 ? N : s.resolution());
        py::dict d;
        d["t"] = nodes_of(tr.grid);
        d["x"] = stack(tr.states);
        d["u"] = stack(tr.controls);
        d["piece"] = tr.active_piece + 1;
        d["running_cost"] = tr.accumulated_cost;
        d["terminal_cost"] = tr.terminal_cost;
        d["total_cost"] = tr.total_cost;
        return d;
      },
      py::arg("solution"), py::arg("t0"), py::arg("x0"), py::arg("N") = 0);

  m.def("scalar_riccati_oracle", &scalar_riccati_oracle, py::arg("t"), py::arg("T") = 1.0);

  m.def(
      "acceptance_suite",
      [](const std::string& level, unsigned threads) {
        std::vector<CheckResult> checks;
        {
          py::gil_scoped_release release;
          checks = run_acceptance_suite(parse_level(level), threads);
        }
        py::list out;
        for (const auto& c : checks) out.append(check_dict(c));
        return out;
      },
      py::arg("level") = "quick", py::arg("threads") = 1);
}
