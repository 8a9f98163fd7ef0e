#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "kcontract/system_model.hpp"

namespace kcontract {

inline constexpr double kThomasD = 0.193186;

/// x_i' = sin(x_{i+1}) - d x_i (cyclic). Box and invariant set D = {d |x|_inf <= 1}.
SystemModel thomas(double d = kThomasD);

/// thomas plus the controller g(x) = -diag(c, c, 0) x.
SystemModel thomas_controlled(double d = kThomasD, double c = 1.1 - 2 * kThomasD);

/// Controlled Thomas driven by b exp(alpha t), written on (x1, x2, x3, y)
/// with y' = alpha y; start trajectories at y = 1.
SystemModel thomas_perturbed(double d = kThomasD, double c = 1.1 - 2 * kThomasD, double alpha = -0.1,
                             const Vector& b = Vector::Constant(3, 0.125));

/// x1' = A x1, x2' = B x1 + C x2.
SystemModel lti_series(const Matrix& a, const Matrix& b, const Matrix& c);
/// A = diag(1, -2), B = 0, C = diag(zeta1, zeta2).
SystemModel lti_series(double zeta1, double zeta2);

/// x1' = -x1^2/2 - x1, x2' = x2 x1 on the box [0, upper]^2.
SystemModel remark2(double upper = 10.0);

/// x' = A x.
SystemModel linear(const Matrix& a);

/// x' = [[J11, J12], [-c J12^T, J22]] x.
SystemModel skew_linear(const Matrix& j11, const Matrix& j22, const Matrix& j12, double c);

/// The nine initial conditions of the Thomas experiments.
std::vector<Vector> thomas_initial_conditions();

/// Builds a named system from JSON parameters. Throws ParseError for unknown
/// names, unknown keys or mistyped values.
SystemModel make_builtin(const std::string& name, const nlohmann::json& params);

/// Dimension of the driving sub-system for built-ins with a natural split
/// (lti_series, remark2, skew_linear); 0 otherwise.
int builtin_split(const std::string& name, const nlohmann::json& params);

/// Names accepted by make_builtin.
std::vector<std::string> builtin_names();

/// Matrix from {rows, cols, entries} or nested row arrays.
Matrix matrix_param(const nlohmann::json& j, const std::string& what);

}  // namespace kcontract
