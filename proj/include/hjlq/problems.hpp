#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hjlq/core.hpp"

namespace hjlq {

/// Constant coefficients: A = B = Mxx = Muu = I_n, Mxu = 0, two pieces
/// 0.5 |x -/+ (1,1,0,...)|^2, i.e. P_i = I, q_1 = (1,1,0,...) = -q_2, r_i = 1.
ControlProblem build_constant_example(Eigen::Index n = 16, double horizon = 1.0);

/// Scalar version of the constant example: n = l = 1, A = B = Mxx = Muu = 1,
/// Mxu = 0, one piece 0.5 x^2. Its Riccati solution is known in closed form.
ControlProblem build_scalar_example(double horizon = 1.0);

enum class TimeDependentVariant {
  k1dTwoPieces,    // n = 1, 0.5 (x +/- 0.9)^2
  k16dFourPieces,  // four quadratics on (x1, x2), any n >= 2
};

/// Muu = 2e^{-t} I, Mxx = e^{-t}/2 I, A = I/2, B = I, Mxu = 0.
ControlProblem build_timedep_example(Eigen::Index n, TimeDependentVariant variant,
                                     double horizon = 1.0);

/// Double integrator x1' = x2, x2' = u with n = 2l, tracking
/// x_r(t) = 5 (sin t 1_l, cos t 1_l), running cost 0.5|x - x_r|^2 + |u|^2/2000,
/// terminal min over pieces (1/320)(|x -/+ 2e1|^2).
ControlProblem build_newton_example(Eigen::Index l = 8, double horizon = 1.0);

/// Names accepted by load_problem's {"builtin": ...} form.
const std::vector<std::string>& builtin_names();

/// Coordinates (1-based) used for 2-D slices of this problem: (1, l+1) for
/// the tracking example, (1, 2) otherwise (or (1, 1) when n = 1).
std::pair<int, int> default_slice_coords(const ControlProblem& problem);

/// Builds a problem from a configuration document: either
///   {"builtin": "<name>", "n"|"l": ..., "T": ...}
/// or the explicit schema described in the README. Malformed fields raise
/// ParseError carrying their JSON pointer; well-formed data that violates the
/// modelling assumptions raises ValidationError.
ControlProblem load_problem(const nlohmann::json& doc);
ControlProblem load_problem_text(std::string_view text);

/// Builtin name or path to a JSON file.
ControlProblem resolve_problem(const std::string& ref);

/// Explicit-schema document for `problem`. Custom (callable) coefficients
/// cannot be serialized and raise ValidationError.
nlohmann::json problem_to_json(const ControlProblem& problem);

/// Field-wise equality of two serializable problems.
bool same_problem(const ControlProblem& a, const ControlProblem& b);

}  // namespace hjlq
