#include "kcontract/systems.hpp"

#include <cmath>
#include <set>

#include "kcontract/matrix_io.hpp"

namespace kcontract {

namespace {

Box cube(int n, double lo, double hi) { return Box{Vector::Constant(n, lo), Vector::Constant(n, hi)}; }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
}

// Constant-Jacobian system x' = A x.
SystemModel linear_model(std::string name, const Matrix& a) {
  if (a.rows() != a.cols() || a.size() == 0) throw DomainError("system matrix must be square");
  require_finite(a, "system matrix");
  SystemModel s;
  s.name = std::move(name);
  s.dim = static_cast<int>(a.rows());
  s.field = [a](double, const Vector& x) -> Vector { return a * x; };
  s.jacobian = [a](double, const Vector&) -> Matrix { return a; };
  s.box = cube(s.dim, -1.0, 1.0);
  s.entry_bounds = EntryBounds::exact(a);
  s.envelope = AffineEnvelope::constant(a);
  return s;
}

// Jacobian of the controlled Thomas system; c = 0 gives the plain one.
Matrix thomas_jacobian(double d, double c, const Vector& x) {
  Matrix j = Matrix::Zero(3, 3);
  j(0, 0) = -d - c;
  j(1, 1) = -d - c;
  j(2, 2) = -d;
  j(0, 1) = std::cos(x(1));
  j(1, 2) = std::cos(x(2));
  j(2, 0) = std::cos(x(0));
  return j;
}

Vector thomas_field(double d, double c, const Vector& x) {
  Vector dx(3);
  dx(0) = std::sin(x(1)) - (d + c) * x(0);
  dx(1) = std::sin(x(2)) - (d + c) * x(1);
  dx(2) = std::sin(x(0)) - d * x(2);
  return dx;
}

// The cosines range over [-1, 1].
void attach_thomas_bounds(SystemModel& s, double d, double c) {
  Matrix base = Matrix::Zero(3, 3);
  base(0, 0) = -d - c;
  base(1, 1) = -d - c;
  base(2, 2) = -d;
  EntryBounds eb{base, base};
  AffineEnvelope env{base, {}, Vector::Constant(3, -1.0), Vector::Constant(3, 1.0)};
  for (auto [r, col] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{2, 0}}) {
    eb.lo(r, col) = -1.0;
    eb.hi(r, col) = 1.0;
    Matrix t = Matrix::Zero(3, 3);
    t(r, col) = 1.0;
    env.terms.push_back(t);
  }
  s.entry_bounds = eb;
  s.envelope = env;
}

double number(const nlohmann::json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number()) throw ParseError(std::string("parameter ") + key + " must be a number");
  const double v = p[key].get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string("parameter ") + key + " must be finite");
  return v;
}

void allow_keys(const nlohmann::json& p, const std::string& name, std::set<std::string> keys) {
  if (p.is_null()) return;
  if (!p.is_object()) throw ParseError("params must be a JSON object");
  for (auto it = p.begin(); it != p.end(); ++it) {
    if (!keys.count(it.key())) throw ParseError("unknown parameter '" + it.key() + "' for system " + name);
  }
}

const nlohmann::json& empty_object() {
  static const nlohmann::json e = nlohmann::json::object();
  return e;
}

}  // namespace

Matrix matrix_param(const nlohmann::json& j, const std::string& what) {
  if (j.is_object()) return matrix_from_json(j);
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ParseError(what + ": expected nested row arrays or {rows, cols, entries}");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  if (cols == 0) throw ParseError(what + ": empty row");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ParseError(what + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ParseError(what + ": non-numeric entry");
      m(r, c) = v.get<double>();
    }
  }
  if (!m.allFinite()) throw ParseError(what + ": non-finite entry");
  return m;
}

SystemModel thomas(double d) {
  require_positive(d, "dissipation d");
  SystemModel s;
  s.name = "thomas";
  s.dim = 3;
  s.field = [d](double, const Vector& x) { return thomas_field(d, 0.0, x); };
  s.jacobian = [d](double, const Vector& x) { return thomas_jacobian(d, 0.0, x); };
  s.box = cube(3, -1.0 / d, 1.0 / d);
  s.invariant_box = s.box;
  attach_thomas_bounds(s, d, 0.0);
  return s;
}

SystemModel thomas_controlled(double d, double c) {
  require_positive(d, "dissipation d");
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("controller gain c must be non-negative");
  SystemModel s;
  s.name = "thomas_controlled";
  s.dim = 3;
  s.field = [d, c](double, const Vector& x) { return thomas_field(d, c, x); };
  s.jacobian = [d, c](double, const Vector& x) { return thomas_jacobian(d, c, x); };
  s.box = cube(3, -1.0 / d, 1.0 / d);
  s.invariant_box = s.box;
  attach_thomas_bounds(s, d, c);
  return s;
}

SystemModel thomas_perturbed(double d, double c, double alpha, const Vector& b) {
  require_positive(d, "dissipation d");
  if (!(alpha < 0.0)) throw DomainError("perturbation rate alpha must be negative");
  if (b.size() != 3 || !b.allFinite()) throw DomainError("perturbation direction b must be a finite 3-vector");
  SystemModel s;
  s.name = "thomas_perturbed";
  s.dim = 4;
  s.field = [d, c, alpha, b](double, const Vector& z) {
    Vector dz(4);
    dz.head(3) = thomas_field(d, c, z.head(3)) + b * z(3);
    dz(3) = alpha * z(3);
    return dz;
  };
  s.jacobian = [d, c, alpha, b](double, const Vector& z) {
    Matrix j = Matrix::Zero(4, 4);
    j.topLeftCorner(3, 3) = thomas_jacobian(d, c, z.head(3));
    j.block(0, 3, 3, 1) = b;
    j(3, 3) = alpha;
    return j;
  };
  Box box{Vector(4), Vector(4)};
  box.lower << Vector::Constant(3, -1.0 / d), 0.0;
  box.upper << Vector::Constant(3, 1.0 / d), 1.0;
  s.box = box;

  SystemModel inner = thomas_controlled(d, c);
  const auto& eb = *inner.entry_bounds;
  EntryBounds out{Matrix::Zero(4, 4), Matrix::Zero(4, 4)};
  out.lo.topLeftCorner(3, 3) = eb.lo;
  out.hi.topLeftCorner(3, 3) = eb.hi;
  out.lo.block(0, 3, 3, 1) = b;
  out.hi.block(0, 3, 3, 1) = b;
  out.lo(3, 3) = out.hi(3, 3) = alpha;
  s.entry_bounds = out;
  const auto& env = *inner.envelope;
  AffineEnvelope aenv{Matrix::Zero(4, 4), {}, env.lo, env.hi};
  aenv.base.topLeftCorner(3, 3) = env.base;
  aenv.base.block(0, 3, 3, 1) = b;
  aenv.base(3, 3) = alpha;
  for (const auto& t : env.terms) {
    Matrix big = Matrix::Zero(4, 4);
    big.topLeftCorner(3, 3) = t;
    aenv.terms.push_back(big);
  }
  s.envelope = aenv;
  return s;
}

SystemModel lti_series(const Matrix& a, const Matrix& b, const Matrix& c) {
  if (a.rows() != a.cols() || c.rows() != c.cols() || b.rows() != c.rows() || b.cols() != a.cols() ||
      a.size() == 0 || c.size() == 0) {
    throw DomainError("lti_series: A (n x n), B (m x n), C (m x m) have inconsistent shapes");
  }
  const auto n = a.rows();
  const auto m = c.rows();
  Matrix j = Matrix::Zero(n + m, n + m);
  j.topLeftCorner(n, n) = a;
  j.bottomLeftCorner(m, n) = b;
  j.bottomRightCorner(m, m) = c;
  return linear_model("lti_series", j);
}

SystemModel lti_series(double zeta1, double zeta2) {
  const Matrix a = Vector{{1.0, -2.0}}.asDiagonal();
  const Matrix c = Vector{{zeta1, zeta2}}.asDiagonal();
  return lti_series(a, Matrix::Zero(2, 2), c);
}

SystemModel remark2(double upper) {
  require_positive(upper, "box size");
  SystemModel s;
  s.name = "remark2";
  s.dim = 2;
  s.field = [](double, const Vector& x) {
    Vector dx(2);
    dx(0) = -0.5 * x(0) * x(0) - x(0);
    dx(1) = x(1) * x(0);
    return dx;
  };
  s.jacobian = [](double, const Vector& x) {
    Matrix j(2, 2);
    j << -x(0) - 1.0, 0.0, x(1), x(0);
    return j;
  };
  s.box = cube(2, 0.0, upper);
  // J = base + x1 * diag(-1, 1) + x2 * e2 e1^T keeps the trace at -1.
  AffineEnvelope env;
  env.base = Matrix::Zero(2, 2);
  env.base(0, 0) = -1.0;
  Matrix t1 = Matrix::Zero(2, 2);
  t1(0, 0) = -1.0;
  t1(1, 1) = 1.0;
  Matrix t2 = Matrix::Zero(2, 2);
  t2(1, 0) = 1.0;
  env.terms = {t1, t2};
  env.lo = Vector::Zero(2);
  env.hi = Vector::Constant(2, upper);
  s.envelope = env;
  return s;
}

SystemModel linear(const Matrix& a) { return linear_model("linear", a); }

SystemModel skew_linear(const Matrix& j11, const Matrix& j22, const Matrix& j12, double c) {
  if (j11.rows() != j11.cols() || j22.rows() != j22.cols() || j12.rows() != j11.rows() ||
      j12.cols() != j22.rows()) {
    throw DomainError("skew_linear: J11 (n x n), J22 (m x m), J12 (n x m) have inconsistent shapes");
  }
  const auto n = j11.rows();
  const auto m = j22.rows();
  Matrix j(n + m, n + m);
  j << j11, j12, -c * j12.transpose(), j22;
  auto s = linear_model("skew_linear", j);
  return s;
}

std::vector<Vector> thomas_initial_conditions() {
  auto v = [](double a, double b, double c) { return Vector{{a, b, c}}; };
  return {v(-0.5, 0.5, 0.5), v(-1, 1, 1),        v(1, 1, 1),
          v(1, -1, 1),       v(1, 1, -1),        v(-1, 1, -1),
          v(0.5, 0.25, 0.0), v(0.05, 0.025, 0.0), v(0.5, -0.5, -2)};
}

std::vector<std::string> builtin_names() {
  return {"thomas", "thomas_controlled", "thomas_perturbed", "lti_series", "remark2", "linear", "skew_linear"};
}

SystemModel make_builtin(const std::string& name, const nlohmann::json& params) {
  const nlohmann::json& p = params.is_null() ? empty_object() : params;
  if (name == "thomas") {
    allow_keys(p, name, {"d"});
    return thomas(number(p, "d", kThomasD));
  }
  if (name == "thomas_controlled") {
    allow_keys(p, name, {"d", "c"});
    const double d = number(p, "d", kThomasD);
    return thomas_controlled(d, number(p, "c", 1.1 - 2 * d));
  }
  if (name == "thomas_perturbed") {
    allow_keys(p, name, {"d", "c", "alpha", "b"});
    const double d = number(p, "d", kThomasD);
    Vector b = Vector::Constant(3, 0.125);
    if (p.contains("b")) {
      if (!p["b"].is_array() || p["b"].size() != 3) throw ParseError("parameter b must be a 3-element array");
      for (std::size_t i = 0; i < 3; ++i) {
        if (!p["b"][i].is_number()) throw ParseError("parameter b must be numeric");
        b(static_cast<Eigen::Index>(i)) = p["b"][i].get<double>();
      }
    }
    return thomas_perturbed(d, number(p, "c", 1.1 - 2 * d), number(p, "alpha", -0.1), b);
  }
  if (name == "lti_series") {
    allow_keys(p, name, {"A", "B", "C", "zeta1", "zeta2"});
    if (p.contains("A") || p.contains("B") || p.contains("C")) {
      if (!p.contains("A") || !p.contains("C")) throw ParseError("lti_series needs both A and C");
      const Matrix a = matrix_param(p["A"], "A");
      const Matrix c = matrix_param(p["C"], "C");
      const Matrix b = p.contains("B") ? matrix_param(p["B"], "B") : Matrix::Zero(c.rows(), a.cols());
      return lti_series(a, b, c);
    }
    return lti_series(number(p, "zeta1", -1.5), number(p, "zeta2", -2.0));
  }
  if (name == "remark2") {
    allow_keys(p, name, {"upper"});
    return remark2(number(p, "upper", 10.0));
  }
  if (name == "linear") {
    allow_keys(p, name, {"A"});
    if (!p.contains("A")) throw ParseError("linear needs A");
    return linear(matrix_param(p["A"], "A"));
  }
  if (name == "skew_linear") {
    allow_keys(p, name, {"J11", "J22", "J12", "c"});
    if (!p.contains("J11") || !p.contains("J22") || !p.contains("J12")) {
      throw ParseError("skew_linear needs J11, J22 and J12");
    }
    return skew_linear(matrix_param(p["J11"], "J11"), matrix_param(p["J22"], "J22"), matrix_param(p["J12"], "J12"),
                       number(p, "c", 1.0));
  }
  throw ParseError("unknown system '" + name + "'");
}

int builtin_split(const std::string& name, const nlohmann::json& params) {
  const nlohmann::json& p = params.is_null() ? empty_object() : params;
  if (name == "lti_series") return p.contains("A") ? static_cast<int>(matrix_param(p["A"], "A").rows()) : 2;
  if (name == "remark2") return 1;
  if (name == "skew_linear") return p.contains("J11") ? static_cast<int>(matrix_param(p["J11"], "J11").rows()) : 0;
  return 0;
}

}  // namespace kcontract
