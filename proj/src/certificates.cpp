#include "kcontract/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace kcontract {

namespace {

constexpr std::size_t kMaxGridSamples = 5'000'000;
constexpr double kSkewTolerance = 1e-9;

bool is_grid(const DomainMethod& method) { return std::holds_alternative<GridSampling>(method); }

bool is_positive_diagonal(const Matrix& t) {
  if (t.rows() != t.cols()) return false;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      if (i == j ? !(t(i, j) > 0.0) : t(i, j) != 0.0) return false;
    }
  }
  return true;
}

// Whether the analytic worst-case entry formula applies to this kind.
bool worst_case_applies(const SystemModel& sys, const DomainMethod& method, const MeasureKind& kind) {
  if (is_grid(method) || !sys.entry_bounds) return false;
  if (kind.norm == Norm::L2) return false;
  return !kind.scaling || is_positive_diagonal(*kind.scaling);
}

// Whether a kind can be evaluated at all under this method.
bool kind_supported(const SystemModel& sys, const DomainMethod& method, const MeasureKind& kind) {
  if (is_grid(method)) return sys.box.has_value();
  return worst_case_applies(sys, method, kind) || sys.envelope.has_value();
}

void require_kind_supported(const SystemModel& sys, const DomainMethod& method, const MeasureKind& kind) {
  if (kind_supported(sys, method, kind)) return;
  if (is_grid(method)) throw DomainError("grid sampling needs a box domain");
  if (kind.norm == Norm::L2 && sys.entry_bounds) {
    throw DomainError("L2 measure rejected in analytic-bounds mode: it is not monotone in the entry "
                      "bounds (supply an affine envelope or use grid sampling)");
  }
  if (kind.scaling && sys.entry_bounds) {
    throw DomainError("analytic entry bounds accept only positive diagonal scalings");
  }
  throw DomainError("analytic-bounds mode needs entry bounds or an affine envelope");
}

std::string describe_method(const SystemModel& sys, const DomainMethod& method, bool worst_case,
                            std::size_t samples) {
  std::ostringstream os;
  if (const auto* grid = std::get_if<GridSampling>(&method)) {
    os << "grid " << grid->points_per_dim << " points/dim" << (grid->refine_midpoints ? " + midpoints" : "")
       << " x " << grid->times.size() << " time(s), " << samples << " samples; sampled (not a proof)";
  } else if (worst_case) {
    os << "worst-case entries from entry bounds";
  } else {
    os << "affine envelope vertices (" << sys.envelope->vertex_count() << ")";
  }
  return os.str();
}

struct Sup {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
  std::string detail;
};

Sup domain_sup(const SystemModel& sys, const DomainMethod& method, const MeasureKind& kind,
               const std::function<double(const Matrix&)>& g) {
  require_kind_supported(sys, method, kind);
  const bool worst = worst_case_applies(sys, method, kind);
  Sup sup;
  sup.samples = for_each_domain_jacobian(sys, method, worst, [&](const Matrix& j) {
    sup.value = std::max(sup.value, g(j));
  });
  sup.detail = describe_method(sys, method, worst, sup.samples);
  return sup;
}

std::vector<MeasureKind> candidate_kinds(const SystemModel& sys, const DomainMethod& method) {
  std::vector<MeasureKind> out;
  for (Norm n : {Norm::L1, Norm::L2, Norm::Linf}) {
    if (kind_supported(sys, method, MeasureKind(n))) out.emplace_back(n);
  }
  if (out.empty()) require_kind_supported(sys, method, MeasureKind(Norm::L1));
  return out;
}

struct Evaluated {
  MeasureKind kind;
  Sup sup;
};

// Tries the candidates in order; returns the first passing one, or the one
// with the smallest bound when none passes.
Evaluated search_kinds(const std::vector<MeasureKind>& candidates,
                       const std::function<Sup(const MeasureKind&)>& evaluate) {
  std::optional<Evaluated> best;
  for (const auto& kind : candidates) {
    Evaluated e{kind, evaluate(kind)};
    if (e.sup.value <= -kStrictMargin) return e;
    if (!best || e.sup.value < best->sup.value) best = std::move(e);
  }
  return *best;
}

ConditionRecord make_record(int index, std::string description, const Evaluated& e) {
  ConditionRecord r;
  r.index = index;
  r.description = std::move(description);
  r.kind = e.kind.label();
  r.bound = e.sup.value;
  r.margin = -e.sup.value;
  r.passed = e.sup.value <= -kStrictMargin;
  return r;
}

void finish_verdict(CertificateReport& report, const DomainMethod& method) {
  const bool all = std::all_of(report.conditions.begin(), report.conditions.end(),
                               [](const ConditionRecord& c) { return c.passed; });
  report.method = is_grid(method) ? "grid-sampling" : "analytic-bounds";
  if (!all) {
    report.verdict = Verdict::Fail;
  } else if (is_grid(method)) {
    report.verdict = Verdict::Inconclusive;
    report.notes.emplace_back("all sampled conditions hold; sampled (not a proof)");
  } else {
    report.verdict = Verdict::Pass;
  }
}

// Block sizes, permutation and kinds of the hierarchic norm for Q(k, n, m).
struct SeriesLayout {
  int n = 0;
  int m = 0;
  int k = 0;
  BlockRange range;
  Permutation perm;
  HierarchicNormSpec spec;

  SeriesLayout(int n_, int m_, int k_, const std::vector<MeasureKind>& kinds)
      : n(n_), m(m_), k(k_), range(block_range(k_, n_, m_)), perm(build_permutation(k_, n_, m_)) {
    for (int i = range.first; i <= range.last; ++i) {
      spec.partition.push_back(static_cast<int>(binomial(n, k - i) * binomial(m, i)));
    }
    spec.block_kinds = kinds;
    spec.outer = Norm::Linf;
  }

  double coupling_norm(const Matrix& j, bool magnitudes) const {
    Matrix e = Matrix::Zero(n + m, n + m);
    e.bottomLeftCorner(m, n) = magnitudes ? Matrix(j.bottomLeftCorner(m, n).cwiseAbs())
                                          : Matrix(j.bottomLeftCorner(m, n));
    Matrix ek = add_compound(e, k).data;
    if (magnitudes) ek = ek.cwiseAbs();
    return hierarchic_norm_upper_bound(permute_to_block(perm, ek), spec);
  }

  double scaled_measure(const Matrix& j, double epsilon) const {
    Vector t = Vector::Ones(n + m);
    t.tail(m).setConstant(epsilon);
    const Matrix scaled = t.asDiagonal() * j * t.cwiseInverse().asDiagonal();
    const Matrix ck = add_compound(scaled, k).data;
    return hierarchic_measure_upper_bound(permute_to_block(perm, ck), spec);
  }
};

void check_order(int k, int n, const char* what) {
  if (k < 1 || k > n) {
    throw DomainError(std::string(what) + ": order k=" + std::to_string(k) + " outside [1, " +
                      std::to_string(n) + "]");
  }
}

void check_jacobian_shape(const Matrix& j, int dim) {
  if (j.rows() != dim || j.cols() != dim) {
    throw DomainError("Jacobian evaluator returned " + std::to_string(j.rows()) + "x" +
                      std::to_string(j.cols()) + ", expected " + std::to_string(dim) + "x" +
                      std::to_string(dim));
  }
  require_finite(j, "Jacobian");
}

std::vector<MeasureKind> expand_kinds(const std::vector<MeasureKind>& kinds, std::size_t count) {
  if (kinds.size() == count) return kinds;
  if (kinds.size() == 1) return std::vector<MeasureKind>(count, kinds.front());
  throw DomainError("expected " + std::to_string(count) + " measure kinds, got " +
                    std::to_string(kinds.size()));
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return 0;
    case Verdict::Fail:
      return 1;
    case Verdict::Inconclusive:
      return 4;
  }
  return 1;
}

double CertificateReport::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : conditions) m = std::min(m, c.margin);
  return m;
}

std::vector<Vector> grid_points(const Box& box, int points_per_dim, bool refine_midpoints) {
  box.validate();
  if (points_per_dim < 1) throw DomainError("grid needs at least one point per dimension");
  const Eigen::Index n = box.dim();
  auto axis = [&](Eigen::Index d, bool midpoints) {
    std::vector<double> c;
    const double lo = box.lower(d);
    const double hi = box.upper(d);
    if (lo == hi) {
      c.push_back(lo);
    } else if (points_per_dim == 1) {
      c.push_back(0.5 * (lo + hi));
    } else if (midpoints) {
      for (int i = 0; i + 1 < points_per_dim; ++i) c.push_back(lo + (hi - lo) * (i + 0.5) / (points_per_dim - 1));
    } else {
      for (int i = 0; i < points_per_dim; ++i) c.push_back(lo + (hi - lo) * i / (points_per_dim - 1));
    }
    return c;
  };
  std::vector<Vector> out;
  auto product = [&](bool midpoints) {
    std::vector<std::vector<double>> axes;
    std::size_t total = 1;
    for (Eigen::Index d = 0; d < n; ++d) {
      axes.push_back(axis(d, midpoints));
      total *= axes.back().size();
      if (total > kMaxGridSamples) throw DomainError("grid exceeds the sample limit");
    }
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (std::size_t s = 0; s < total; ++s) {
      Vector x(n);
      for (Eigen::Index d = 0; d < n; ++d) x(d) = axes[static_cast<std::size_t>(d)][idx[static_cast<std::size_t>(d)]];
      out.push_back(std::move(x));
      for (std::size_t d = 0; d < idx.size(); ++d) {
        if (++idx[d] < axes[d].size()) break;
        idx[d] = 0;
      }
    }
  };
  product(false);
  if (refine_midpoints && points_per_dim > 1) product(true);
  return out;
}

std::size_t for_each_domain_jacobian(const SystemModel& sys, const DomainMethod& method,
                                     bool use_entry_bounds,
                                     const std::function<void(const Matrix&)>& fn) {
  if (const auto* grid = std::get_if<GridSampling>(&method)) {
    if (!sys.box) throw DomainError("grid sampling needs a box domain");
    if (sys.box->dim() != sys.dim) throw DomainError("box dimension differs from state dimension");
    if (grid->times.empty()) throw DomainError("grid sampling needs at least one time");
    const auto points = grid_points(*sys.box, grid->points_per_dim, grid->refine_midpoints);
    std::size_t count = 0;
    for (double t : grid->times) {
      for (const auto& x : points) {
        const Matrix j = sys.jacobian(t, x);
        check_jacobian_shape(j, sys.dim);
        fn(j);
        ++count;
      }
    }
    return count;
  }
  if (use_entry_bounds) {
    if (!sys.entry_bounds) throw DomainError("system has no entry bounds");
    sys.entry_bounds->validate();
    const Matrix w = sys.entry_bounds->worst_case();
    check_jacobian_shape(w, sys.dim);
    fn(w);
    return 1;
  }
  if (!sys.envelope) throw DomainError("system has no affine envelope");
  sys.envelope->validate();
  const auto count = sys.envelope->vertex_count();
  for (std::size_t v = 0; v < count; ++v) {
    const Matrix j = sys.envelope->vertex(v);
    check_jacobian_shape(j, sys.dim);
    fn(j);
  }
  return count;
}

CertificateReport certify_k_contraction(const SystemModel& sys, int k,
                                        const std::optional<MeasureKind>& kind,
                                        const DomainMethod& method) {
  check_order(k, sys.dim, "k-contraction");
  if (kind) scaling_condition_number(*kind);
  const auto candidates = kind ? std::vector<MeasureKind>{*kind} : candidate_kinds(sys, method);
  const auto chosen = search_kinds(candidates, [&](const MeasureKind& kd) {
    return domain_sup(sys, method, kd, [&](const Matrix& j) { return compound_measure(j, k, kd); });
  });

  CertificateReport report;
  report.certificate = "k-contraction";
  report.system = sys.name;
  report.k = k;
  report.samples = chosen.sup.samples;
  report.method_detail = chosen.sup.detail;
  report.conditions.push_back(make_record(k, "mu(J^[" + std::to_string(k) + "])", chosen));
  finish_verdict(report, method);
  if (report.verdict != Verdict::Fail) report.certified_rate = report.min_margin();
  if (kind && kind->scaling) {
    std::ostringstream os;
    os << "scaled norm, condition number " << std::setprecision(6) << scaling_condition_number(*kind);
    report.notes.push_back(os.str());
  }
  return report;
}

CertificateReport certify_series(const SeriesModel& model, int k, const std::vector<MeasureKind>& kinds,
                                 const DomainMethod& method) {
  const SystemModel& sys = model.system;
  const int n = model.upstream_dim;
  const int m = sys.dim - n;
  if (n < 1 || m < 1) throw DomainError("series split must leave both sub-systems non-empty");
  check_order(k, n + m, "series");
  for (const auto& kd : kinds) {
    if (kd.scaling) throw DomainError("series conditions use plain Lp measures");
  }
  const auto range = block_range(k, n, m);
  const auto count = static_cast<std::size_t>(range.last - range.first + 1);
  if (!kinds.empty() && kinds.size() != 1 && kinds.size() != count) {
    throw DomainError("expected " + std::to_string(count) + " measure kinds (one per i), got " +
                      std::to_string(kinds.size()));
  }

  auto condition = [&](int i, const MeasureKind& kd) {
    return [&, i, kd](const Matrix& j) {
      if (j.topRightCorner(n, m).cwiseAbs().maxCoeff() > 0.0) {
        throw DomainError("series model Jacobian is not block lower-triangular (J12 != 0)");
      }
      return compound_measure(j.topLeftCorner(n, n), k - i, kd) +
             compound_measure(j.bottomRightCorner(m, m), i, kd);
    };
  };

  CertificateReport report;
  report.certificate = "series";
  report.system = sys.name;
  report.k = k;
  std::vector<MeasureKind> used;
  for (int i = range.first; i <= range.last; ++i) {
    std::vector<MeasureKind> candidates;
    if (kinds.empty()) {
      candidates = candidate_kinds(sys, method);
    } else {
      candidates = {kinds.size() == 1 ? kinds.front() : kinds[static_cast<std::size_t>(i - range.first)]};
    }
    const auto chosen = search_kinds(candidates, [&](const MeasureKind& kd) {
      return domain_sup(sys, method, kd, condition(i, kd));
    });
    std::ostringstream desc;
    desc << "mu(J11^[" << k - i << "]) + mu(J22^[" << i << "])";
    report.conditions.push_back(make_record(i, desc.str(), chosen));
    report.samples = std::max(report.samples, chosen.sup.samples);
    report.method_detail = chosen.sup.detail;
    used.push_back(chosen.kind);
  }
  finish_verdict(report, method);
  if (report.verdict == Verdict::Fail) return report;

  // Scaled norm |T(eps) y| realizing the certificate for the coupled system.
  const double min_eta = report.min_margin();
  const SeriesLayout layout(n, m, k, used);
  const bool worst = !is_grid(method) && sys.entry_bounds.has_value();
  double sup = 0.0;
  for_each_domain_jacobian(sys, method, worst,
                           [&](const Matrix& j) { sup = std::max(sup, layout.coupling_norm(j, worst)); });
  report.coupling_norm_sup = sup;
  report.outer_norm = "Linf";
  report.certified_rate = 0.5 * min_eta;
  if (sup == 0.0) {
    report.epsilon_star = 1.0;
    report.notes.emplace_back("coupling term vanishes in the compound; any epsilon > 0 works");
  } else {
    report.epsilon_star = min_eta / (2.0 * sup);
  }
  if (is_grid(method)) report.notes.emplace_back("epsilon_star uses the sampled coupling supremum");
  return report;
}

CertificateReport certify_skew_feedback(const SkewPair& pair, int k, double c, const DomainMethod& method) {
  const SystemModel& sys = pair.system;
  const int n = pair.first_dim;
  const int m = sys.dim - n;
  if (n < 1 || m < 1) throw DomainError("skew pair split must leave both sub-systems non-empty");
  check_order(k, n + m, "skew feedback");
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("skew coupling constant c must be positive");

  auto check_identity = [&](const Matrix& j, const std::string& where) {
    const Matrix resid = j.bottomLeftCorner(m, n) + c * j.topRightCorner(n, m).transpose();
    const double scale = std::max(1.0, j.cwiseAbs().maxCoeff());
    if (resid.cwiseAbs().maxCoeff() > kSkewTolerance * scale) {
      std::ostringstream os;
      os << "coupling violates J21 = -c J12^T at " << where << " (residual " << std::setprecision(6)
         << resid.cwiseAbs().maxCoeff() << ")";
      throw DomainError(os.str());
    }
  };

  // Pointwise identity check on the evaluator.
  std::vector<double> times{0.0};
  if (const auto* grid = std::get_if<GridSampling>(&method)) times = grid->times;
  std::vector<Vector> points;
  if (sys.box) {
    points = grid_points(*sys.box, 5, false);
  } else {
    std::mt19937 rng(2024);
    std::normal_distribution<double> normal;
    points.push_back(Vector::Zero(sys.dim));
    for (int s = 0; s < 32; ++s) {
      Vector x(sys.dim);
      for (Eigen::Index d = 0; d < x.size(); ++d) x(d) = normal(rng);
      points.push_back(std::move(x));
    }
  }
  std::size_t checked = 0;
  for (double t : times) {
    for (const auto& x : points) {
      const Matrix j = sys.jacobian(t, x);
      check_jacobian_shape(j, sys.dim);
      std::ostringstream where;
      where << "t=" << t << ", x=(" << x.transpose() << ")";
      check_identity(j, where.str());
      ++checked;
    }
  }
  if (!is_grid(method) && sys.envelope) {
    for (std::size_t v = 0; v < sys.envelope->vertex_count(); ++v) {
      check_identity(sys.envelope->vertex(v), "envelope vertex " + std::to_string(v));
    }
  }

  const MeasureKind l2(Norm::L2);
  CertificateReport report;
  report.certificate = "skew-feedback";
  report.system = sys.name;
  report.k = k;
  const auto range = block_range(k, n, m);
  for (int i = range.first; i <= range.last; ++i) {
    Evaluated e{l2, domain_sup(sys, method, l2, [&](const Matrix& j) {
                  return compound_measure(j.topLeftCorner(n, n), k - i, l2) +
                         compound_measure(j.bottomRightCorner(m, m), i, l2);
                })};
    std::ostringstream desc;
    desc << "mu2(J11^[" << k - i << "]) + mu2(J22^[" << i << "])";
    report.conditions.push_back(make_record(i, desc.str(), e));
    report.samples = std::max(report.samples, e.sup.samples);
    report.method_detail = e.sup.detail;
  }
  finish_verdict(report, method);
  report.notes.push_back("skew identity verified at " + std::to_string(checked) + " points");
  if (report.verdict != Verdict::Fail) {
    report.certified_rate = report.min_margin();
    std::ostringstream os;
    os << "certified for |T^(k) y|_2 with T = diag(sqrt(c) I_n, I_m), sqrt(c) = " << std::setprecision(6)
       << std::sqrt(c);
    report.notes.push_back(os.str());
  }
  return report;
}

CertificateReport certify_exp_input(const SystemModel& sys, double g_jacobian_bound, double alpha, int k,
                                    const std::vector<MeasureKind>& kinds, const DomainMethod& method) {
  const int n = sys.dim;
  check_order(k, n, "exponential input");
  if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
  if (!(g_jacobian_bound >= 0.0) || !std::isfinite(g_jacobian_bound)) {
    throw DomainError("input Jacobian bound must be finite and non-negative");
  }

  // Cascade (y, x): y' = alpha y drives x' = f(x) + g(y).
  SystemModel aug;
  aug.name = sys.name + "+exp-input";
  aug.dim = n + 1;
  aug.time_varying = sys.time_varying;
  const Vector coupling = Vector::Constant(n, g_jacobian_bound);
  aug.jacobian = [jac = sys.jacobian, alpha, coupling, n](double t, const Vector& z) {
    Matrix j = Matrix::Zero(n + 1, n + 1);
    j(0, 0) = alpha;
    j.block(1, 0, n, 1) = coupling;
    j.bottomRightCorner(n, n) = jac(t, z.tail(n));
    return j;
  };
  if (sys.box) {
    // The Jacobian does not depend on y, so one y value covers the domain.
    Box box;
    box.lower.resize(n + 1);
    box.upper.resize(n + 1);
    box.lower << 1.0, sys.box->lower;
    box.upper << 1.0, sys.box->upper;
    aug.box = box;
  }
  if (sys.entry_bounds) {
    EntryBounds eb{Matrix::Zero(n + 1, n + 1), Matrix::Zero(n + 1, n + 1)};
    eb.lo(0, 0) = eb.hi(0, 0) = alpha;
    eb.lo.block(1, 0, n, 1) = -coupling;
    eb.hi.block(1, 0, n, 1) = coupling;
    eb.lo.bottomRightCorner(n, n) = sys.entry_bounds->lo;
    eb.hi.bottomRightCorner(n, n) = sys.entry_bounds->hi;
    aug.entry_bounds = eb;
  }
  if (sys.envelope) {
    const auto& env = sys.envelope.value();
    AffineEnvelope out;
    out.base = Matrix::Zero(n + 1, n + 1);
    out.base(0, 0) = alpha;
    out.base.bottomRightCorner(n, n) = env.base;
    const auto p = env.terms.size();
    out.lo.resize(static_cast<Eigen::Index>(p) + n);
    out.hi.resize(static_cast<Eigen::Index>(p) + n);
    for (std::size_t q = 0; q < p; ++q) {
      Matrix t = Matrix::Zero(n + 1, n + 1);
      t.bottomRightCorner(n, n) = env.terms[q];
      out.terms.push_back(std::move(t));
      out.lo(static_cast<Eigen::Index>(q)) = env.lo(static_cast<Eigen::Index>(q));
      out.hi(static_cast<Eigen::Index>(q)) = env.hi(static_cast<Eigen::Index>(q));
    }
    // Each input-gain entry ranges over [-bound, bound].
    for (int r = 0; r < n; ++r) {
      Matrix t = Matrix::Zero(n + 1, n + 1);
      t(r + 1, 0) = 1.0;
      out.terms.push_back(std::move(t));
      out.lo(static_cast<Eigen::Index>(p) + r) = -g_jacobian_bound;
      out.hi(static_cast<Eigen::Index>(p) + r) = g_jacobian_bound;
    }
    aug.envelope = out;
  }

  auto report = certify_series(SeriesModel{aug, 1}, k, kinds, method);
  report.certificate = "exp-input";
  report.system = sys.name;
  for (auto& c : report.conditions) {
    if (c.index == k) {
      c.description = "mu((df/dx)^[" + std::to_string(k) + "])";
    } else if (k == 1) {
      c.description = "alpha";
    } else {
      c.description = "mu((df/dx)^[" + std::to_string(k - 1) + "]) + alpha";
    }
  }
  // Open-loop condition first, input condition second.
  std::reverse(report.conditions.begin(), report.conditions.end());
  {
    std::ostringstream os;
    os << "input u(t) = exp(alpha t), alpha = " << std::setprecision(6) << alpha
       << ", |dg/du| <= " << g_jacobian_bound;
    report.notes.push_back(os.str());
  }
  if (report.verdict != Verdict::Fail && k == 2) {
    report.notes.emplace_back(
        "time-invariant augmentation is 2-contracting: every bounded trajectory converges to the "
        "set of equilibria");
  }
  return report;
}

double coupling_compound_norm(const Matrix& full_jacobian, int upstream_dim, int k,
                              const std::vector<MeasureKind>& kinds, bool entrywise_magnitudes) {
  const int n = upstream_dim;
  const int m = static_cast<int>(full_jacobian.rows()) - n;
  const auto range = block_range(k, n, m);
  const SeriesLayout layout(n, m, k, expand_kinds(kinds, static_cast<std::size_t>(range.last - range.first + 1)));
  return layout.coupling_norm(full_jacobian, entrywise_magnitudes);
}

double scaled_series_measure(const Matrix& full_jacobian, int upstream_dim, int k,
                             const std::vector<MeasureKind>& kinds, double epsilon) {
  const int n = upstream_dim;
  const int m = static_cast<int>(full_jacobian.rows()) - n;
  const auto range = block_range(k, n, m);
  const SeriesLayout layout(n, m, k, expand_kinds(kinds, static_cast<std::size_t>(range.last - range.first + 1)));
  return layout.scaled_measure(full_jacobian, epsilon);
}

nlohmann::json to_json(const CertificateReport& report) {
  nlohmann::json j;
  j["certificate"] = report.certificate;
  j["system"] = report.system;
  j["verdict"] = to_string(report.verdict);
  j["k"] = report.k;
  j["method"] = report.method;
  j["method_detail"] = report.method_detail;
  j["samples"] = report.samples;
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : report.conditions) {
    conds.push_back({{"index", c.index},
                     {"description", c.description},
                     {"kind", c.kind},
                     {"bound", c.bound},
                     {"margin", c.margin},
                     {"passed", c.passed}});
  }
  j["conditions"] = conds;
  j["epsilon_star"] = report.epsilon_star ? nlohmann::json(*report.epsilon_star) : nlohmann::json();
  j["certified_rate"] = report.certified_rate ? nlohmann::json(*report.certified_rate) : nlohmann::json();
  j["coupling_norm_sup"] =
      report.coupling_norm_sup ? nlohmann::json(*report.coupling_norm_sup) : nlohmann::json();
  j["outer_norm"] = report.outer_norm ? nlohmann::json(*report.outer_norm) : nlohmann::json();
  j["notes"] = report.notes;
  return j;
}

std::string to_text(const CertificateReport& report) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << report.certificate << " certificate for " << report.system << " (k=" << report.k << ")\n";
  os << "  verdict: " << to_string(report.verdict) << "\n";
  os << "  method:  " << report.method << " [" << report.method_detail << "]\n";
  for (const auto& c : report.conditions) {
    os << "  [" << (c.passed ? "ok" : "FAIL") << "] i=" << c.index << "  " << c.description << " <= "
       << c.bound << "  (" << c.kind << ", margin " << c.margin << ")\n";
  }
  if (report.epsilon_star) os << "  epsilon_star: " << *report.epsilon_star << "\n";
  if (report.certified_rate) os << "  certified rate: " << *report.certified_rate << "\n";
  if (report.outer_norm) os << "  outer norm: " << *report.outer_norm << " (default choice)\n";
  for (const auto& note : report.notes) os << "  note: " << note << "\n";
  return os.str();
}

}  // namespace kcontract
