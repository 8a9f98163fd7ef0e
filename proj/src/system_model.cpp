#include "kcontract/system_model.hpp"

#include <algorithm>
#include <cmath>

namespace kcontract {

bool Box::contains(const Vector& x, double slack) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < lower(i) - slack || x(i) > upper(i) + slack) return false;
  }
  return true;
}

void Box::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) throw DomainError("malformed box");
  if (!lower.allFinite() || !upper.allFinite()) throw DomainError("box bounds must be finite");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (lower(i) > upper(i)) throw DomainError("empty domain: box lower bound exceeds upper bound");
  }
}

EntryBounds EntryBounds::exact(const Matrix& m) { return {m, m}; }

void EntryBounds::validate() const {
  if (lo.rows() != hi.rows() || lo.cols() != hi.cols() || lo.size() == 0) {
    throw DomainError("entry bounds: lo and hi must have equal, non-zero shape");
  }
  if (!lo.allFinite() || !hi.allFinite()) throw DomainError("entry bounds must be finite");
  if ((lo.array() > hi.array()).any()) throw DomainError("entry bounds: lo exceeds hi");
}

Matrix EntryBounds::worst_case() const {
  Matrix w = lo.cwiseAbs().cwiseMax(hi.cwiseAbs());
  for (Eigen::Index i = 0; i < std::min(w.rows(), w.cols()); ++i) w(i, i) = hi(i, i);
  return w;
}

EntryBounds EntryBounds::block(Eigen::Index row, Eigen::Index col, Eigen::Index rows,
                               Eigen::Index cols) const {
  return {lo.block(row, col, rows, cols), hi.block(row, col, rows, cols)};
}

EntryBounds EntryBounds::conjugated_by_diagonal(const Vector& t) const {
  if (t.size() != lo.rows() || lo.rows() != lo.cols()) {
    throw DomainError("diagonal scaling size does not match entry bounds");
  }
  if ((t.array() <= 0.0).any()) throw DomainError("diagonal scaling must be positive");
  EntryBounds out = *this;
  for (Eigen::Index i = 0; i < lo.rows(); ++i) {
    for (Eigen::Index j = 0; j < lo.cols(); ++j) {
      const double f = t(i) / t(j);
      out.lo(i, j) = lo(i, j) * f;
      out.hi(i, j) = hi(i, j) * f;
    }
  }
  return out;
}

AffineEnvelope AffineEnvelope::constant(const Matrix& m) { return {m, {}, Vector(), Vector()}; }

void AffineEnvelope::validate() const {
  if (base.rows() != base.cols() || base.size() == 0) throw DomainError("envelope base must be square");
  if (static_cast<std::size_t>(lo.size()) != terms.size() ||
      static_cast<std::size_t>(hi.size()) != terms.size()) {
    throw DomainError("envelope needs one interval per term");
  }
  if (terms.size() > kMaxEnvelopeParams) throw DomainError("envelope has too many parameters");
  for (const auto& t : terms) {
    if (t.rows() != base.rows() || t.cols() != base.cols()) {
      throw DomainError("envelope term shape differs from base");
    }
  }
  if (!lo.allFinite() || !hi.allFinite()) throw DomainError("envelope intervals must be finite");
  if ((lo.array() > hi.array()).any()) throw DomainError("envelope interval lo exceeds hi");
}

std::size_t AffineEnvelope::vertex_count() const { return std::size_t{1} << terms.size(); }

Matrix AffineEnvelope::vertex(std::size_t v) const {
  Matrix j = base;
  for (std::size_t p = 0; p < terms.size(); ++p) {
    const auto idx = static_cast<Eigen::Index>(p);
    j += ((v >> p) & 1U ? hi(idx) : lo(idx)) * terms[p];
  }
  return j;
}

}  // namespace kcontract
