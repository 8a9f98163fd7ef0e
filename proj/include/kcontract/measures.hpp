#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kcontract/compounds.hpp"

namespace kcontract {

enum class Norm { L1, L2, Linf };

std::string to_string(Norm norm);
/// Accepts "L1", "L2", "Linf" (also "1", "2", "inf"). Throws DomainError otherwise.
Norm parse_norm(const std::string& text);

/// Lp vector norm, optionally composed with an invertible change of
/// coordinates T: |y|_T := |T y|_p.
struct MeasureKind {
  Norm norm = Norm::L1;
  std::optional<Matrix> scaling;

  MeasureKind() = default;
  MeasureKind(Norm n) : norm(n) {}  // NOLINT(google-explicit-constructor)
  MeasureKind(Norm n, Matrix t) : norm(n), scaling(std::move(t)) {}

  std::string label() const;
};

class SingularScalingError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// 2-norm condition number of the scaling (1 when absent). Throws
/// SingularScalingError for non-square or numerically singular scalings.
double scaling_condition_number(const MeasureKind& kind);

/// T M T^{-1} for a scaled kind, M itself otherwise.
Matrix conjugate_by_scaling(const Matrix& m, const MeasureKind& kind);

/// Vector norm |v|_p.
double vector_norm(const Vector& v, Norm norm);

/// Induced operator norm ||M||_p.
double induced_norm(const Matrix& m, Norm norm);

/// Induced norm sup |M z|_to / |z|_from for the pairs with an exact closed
/// form: equal norms, L1->Linf (max |entry|), L1->L2 (max column 2-norm) and
/// L2->Linf (max row 2-norm); a zero matrix has norm 0 for any pair. Other
/// mixed pairs throw DomainError.
double induced_norm(const Matrix& m, Norm from, Norm to);

/// Like induced_norm(m, from, to) but falls back to a norm-equivalence upper
/// bound through L2 for pairs without a closed form. Never underestimates.
double induced_norm_upper_bound(const Matrix& m, Norm from, Norm to);

/// Logarithmic norm mu(M) of a square matrix under `kind`.
double matrix_measure(const Matrix& m, const MeasureKind& kind);

/// mu(A^[k]) from closed forms over Q(k, n), without assembling A^[k].
/// A scaled kind is interpreted as the norm |T^(k) y|, which amounts to
/// evaluating the closed form on T A T^{-1}. k = 0 returns 0.
double compound_measure(const Matrix& a, int k, const MeasureKind& kind);

/// Eigenvalues of (M + M^T)/2 in descending order.
Vector symmetric_part_eigenvalues(const Matrix& m);

/// Block norm |x| := |(|x^1|_1, ..., |x^r|_r)|_outer.
struct HierarchicNormSpec {
  std::vector<int> partition;
  std::vector<MeasureKind> block_kinds;
  Norm outer = Norm::Linf;
};

struct HierarchicBounds {
  double lower = 0.0;
  double upper = 0.0;
  Matrix reduced;  // c_ii = mu_i(B^ii), c_ij = ||B^ij||_ij
};

/// Lower and upper bounds max_i mu_i(B^ii) <= mu(B) <= mu_outer(C).
/// Off-diagonal norms use the exact induced norms; unsupported mixed pairs throw.
HierarchicBounds hierarchic_measure_bounds(const Matrix& b, const HierarchicNormSpec& spec);

/// Same construction with induced_norm_upper_bound for the off-diagonal
/// blocks, so any mix of block norms is accepted. Upper bound stays sound.
double hierarchic_measure_upper_bound(const Matrix& b, const HierarchicNormSpec& spec);

/// Bound on the hierarchic induced norm: ||N||_outer with N_ij = ||B^ij||_ij
/// (upper-bounded where no closed form exists).
double hierarchic_norm_upper_bound(const Matrix& b, const HierarchicNormSpec& spec);

struct BlockCompoundMeasure {
  double value = 0.0;
  double lower_bound = 0.0;
  std::vector<double> per_block;  // mu_i(A^[k-i]) + mu_i(B^[i]) for i = i1..i2
};

/// mu_P(diag(A, B)^[k]) = max_i mu_i(A^[k-i]) + mu_i(B^[i]) under the
/// permuted hierarchic norm. `kinds` holds one kind per i in i1..i2, or a
/// single kind used for every i.
BlockCompoundMeasure block_diag_compound_measure(const Matrix& a, const Matrix& b, int k,
                                                 const std::vector<MeasureKind>& kinds);

}  // namespace kcontract
