#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kcontract/measures.hpp"
#include "kcontract/system_model.hpp"

namespace kcontract {

/// A condition passes only if its bound is at or below -kStrictMargin.
inline constexpr double kStrictMargin = 1e-9;

/// Sound mode. Uses the worst-case entry formula when the system carries
/// EntryBounds and the norm is L1/Linf; otherwise the vertices of the
/// system's AffineEnvelope. L2 with EntryBounds only is rejected.
struct AnalyticBounds {};

/// Sampled mode over the system's box: points_per_dim per coordinate (one
/// point along degenerate coordinates), plus the cell midpoints when
/// refine_midpoints is set, at every time in `times`. Not a proof.
struct GridSampling {
  int points_per_dim = 21;
  bool refine_midpoints = true;
  std::vector<double> times{0.0};
};

using DomainMethod = std::variant<AnalyticBounds, GridSampling>;

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);
/// 0 pass, 1 fail, 4 inconclusive.
int exit_code(Verdict v);

struct ConditionRecord {
  int index = 0;  // i for interconnections, k for a single system
  std::string description;
  std::string kind;
  double bound = 0.0;   // sup over the domain of the condition's left-hand side
  double margin = 0.0;  // -bound; positive when the condition holds
  bool passed = false;
};

struct CertificateReport {
  std::string certificate;
  std::string system;
  Verdict verdict = Verdict::Fail;
  int k = 0;
  std::string method;  // "analytic-bounds" or "grid-sampling"
  std::string method_detail;
  std::size_t samples = 0;
  std::vector<ConditionRecord> conditions;
  std::optional<double> epsilon_star;
  std::optional<double> certified_rate;
  std::optional<double> coupling_norm_sup;
  std::optional<std::string> outer_norm;
  std::vector<std::string> notes;

  /// Smallest margin over all conditions.
  double min_margin() const;
};

nlohmann::json to_json(const CertificateReport& report);
/// Human-readable summary with 6 significant digits.
std::string to_text(const CertificateReport& report);

/// Cascade x1' = f1(t, x1), x2' = f2(t, x1, x2) written as one system on
/// R^{n+m}: the Jacobian is block lower-triangular with blocks J11 (n x n),
/// J21 (m x n) and J22 (m x m).
struct SeriesModel {
  SystemModel system;
  int upstream_dim = 0;
};

/// Feedback pair on R^{n+m} whose Jacobian satisfies J21 = -c J12^T.
struct SkewPair {
  SystemModel system;
  int first_dim = 0;
};

/// sup over the domain of mu((J)^[k]) <= -eta. With `kind` unset the
/// certifier tries L1, L2, Linf in that order and keeps the first that passes.
CertificateReport certify_k_contraction(const SystemModel& sys, int k,
                                        const std::optional<MeasureKind>& kind,
                                        const DomainMethod& method);

/// One condition per i in max{0, k-n}..min{m, k}:
/// mu_i((J11)^[k-i]) + mu_i((J22)^[i]) <= -eta_i. `kinds` holds one kind per
/// i, a single shared kind, or is empty for a per-i search. On success the
/// report carries epsilon_star for the scaling T = diag(I_n, eps I_m) and
/// the rate min_i eta_i / 2.
CertificateReport certify_series(const SeriesModel& model, int k,
                                 const std::vector<MeasureKind>& kinds,
                                 const DomainMethod& method);

/// Skew-symmetric feedback: checks J21 = -c J12^T at sample points, then the
/// L2 conditions on the diagonal blocks.
CertificateReport certify_skew_feedback(const SkewPair& pair, int k, double c,
                                        const DomainMethod& method);

/// x' = f(x) + g(u) with u = exp(alpha t), |dg_i/du| <= g_jacobian_bound.
/// Checks mu((df/dx)^[k]) <= -eta and mu((df/dx)^[k-1]) + alpha <= -eta via
/// the cascade (y, x) with y' = alpha y. `kinds` is ordered as
/// {kind for the alpha condition, kind for the k condition}, one shared kind,
/// or empty for a search.
CertificateReport certify_exp_input(const SystemModel& sys, double g_jacobian_bound, double alpha,
                                    int k, const std::vector<MeasureKind>& kinds,
                                    const DomainMethod& method);

/// Calls fn(J) for every Jacobian the method inspects: the worst-case matrix,
/// each envelope vertex, or each grid sample. Returns the number of calls.
/// `use_entry_bounds` selects the worst-case matrix when both sources exist.
std::size_t for_each_domain_jacobian(const SystemModel& sys, const DomainMethod& method,
                                     bool use_entry_bounds,
                                     const std::function<void(const Matrix&)>& fn);

/// Grid points of the box used by GridSampling (without times).
std::vector<Vector> grid_points(const Box& box, int points_per_dim, bool refine_midpoints);

/// Upper bound on the certificate norm of E^[k], E = [[0, 0], [J21, 0]],
/// measured in the permuted hierarchic norm with the given per-block kinds.
double coupling_compound_norm(const Matrix& full_jacobian, int upstream_dim, int k,
                              const std::vector<MeasureKind>& kinds, bool entrywise_magnitudes);

/// Ström upper bound on mu_P((T(eps) J T(eps)^{-1})^[k]) for the permuted
/// hierarchic norm with per-block kinds (outer Linf).
double scaled_series_measure(const Matrix& full_jacobian, int upstream_dim, int k,
                             const std::vector<MeasureKind>& kinds, double epsilon);

}  // namespace kcontract
