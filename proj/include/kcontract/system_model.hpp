#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kcontract/compounds.hpp"

namespace kcontract {

using VectorField = std::function<Vector(double t, const Vector& x)>;
using JacobianField = std::function<Matrix(double t, const Vector& x)>;

/// Axis-aligned box {x : lower <= x <= upper}.
struct Box {
  Vector lower;
  Vector upper;

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Vector& x, double slack = 0.0) const;
  /// Throws DomainError if the box is empty or malformed.
  void validate() const;
};

/// Interval enclosure [lo_ij, hi_ij] of every Jacobian entry, valid over the
/// whole domain and all t >= 0.
struct EntryBounds {
  Matrix lo;
  Matrix hi;

  static EntryBounds exact(const Matrix& m);
  void validate() const;

  /// Diagonal entries at hi, off-diagonal entries at max(|lo|, |hi|). The
  /// mu_1 / mu_inf compound measure closed forms are nondecreasing in each
  /// of these, so evaluating them here bounds the supremum over the domain.
  Matrix worst_case() const;

  EntryBounds block(Eigen::Index row, Eigen::Index col, Eigen::Index rows, Eigen::Index cols) const;

  /// Bounds for T J T^{-1} with T = diag(t), t > 0.
  EntryBounds conjugated_by_diagonal(const Vector& t) const;
};

/// Jacobians of the form base + sum_p theta_p * terms[p] with each theta_p in
/// [lo_p, hi_p]. Convex functionals of J (matrix measures of compounds,
/// induced norms) attain their maximum over this set at a vertex.
struct AffineEnvelope {
  Matrix base;
  std::vector<Matrix> terms;
  Vector lo;
  Vector hi;

  static AffineEnvelope constant(const Matrix& m);
  void validate() const;
  std::size_t vertex_count() const;
  /// Jacobian at vertex number v (bit p of v selects hi_p over lo_p).
  Matrix vertex(std::size_t v) const;
};

/// Largest number of affine parameters accepted (2^20 vertices).
inline constexpr std::size_t kMaxEnvelopeParams = 20;

struct SystemModel {
  std::string name;
  int dim = 0;
  VectorField field;
  JacobianField jacobian;
  std::optional<Box> box;
  std::optional<EntryBounds> entry_bounds;
  std::optional<AffineEnvelope> envelope;
  /// Declared forward-invariant set; integration warns when a state leaves it.
  std::optional<Box> invariant_box;
  bool time_varying = false;
};

}  // namespace kcontract
