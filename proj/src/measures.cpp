#include "kcontract/measures.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace kcontract {

namespace {

void check_square(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DomainError("matrix measure needs a non-empty square matrix");
  }
}

double max_column_abs_sum(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }
double max_row_abs_sum(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

const MeasureKind& kind_for_block(const std::vector<MeasureKind>& kinds, std::size_t i) {
  return kinds.size() == 1 ? kinds.front() : kinds[i];
}

// T_to * m * T_from^{-1}: the block seen through the scaled norms.
Matrix scaled_block(const Matrix& m, const MeasureKind& to, const MeasureKind& from) {
  Matrix out = m;
  if (to.scaling) out = (*to.scaling) * out;
  if (from.scaling) out = out * from.scaling->inverse();
  return out;
}

struct Offsets {
  std::vector<Eigen::Index> start;
  std::vector<Eigen::Index> size;
};

Offsets check_partition(const Matrix& b, const HierarchicNormSpec& spec) {
  check_square(b);
  if (spec.partition.empty()) throw DomainError("hierarchic norm needs at least one block");
  if (spec.block_kinds.size() != 1 && spec.block_kinds.size() != spec.partition.size()) {
    throw DomainError("hierarchic norm needs one block kind per block (or a single shared kind)");
  }
  Offsets off;
  Eigen::Index pos = 0;
  for (int s : spec.partition) {
    if (s < 1) throw DomainError("hierarchic block sizes must be positive");
    off.start.push_back(pos);
    off.size.push_back(s);
    pos += s;
  }
  if (pos != b.rows()) {
    throw DomainError("partition sums to " + std::to_string(pos) + " but matrix has size " +
                      std::to_string(b.rows()));
  }
  for (std::size_t i = 0; i < spec.partition.size(); ++i) {
    const auto& kind = kind_for_block(spec.block_kinds, i);
    if (kind.scaling && kind.scaling->rows() != off.size[i]) {
      throw DomainError("block scaling does not match block size");
    }
  }
  return off;
}

template <typename NormFn>
Matrix reduced_matrix(const Matrix& b, const HierarchicNormSpec& spec, const Offsets& off,
                      NormFn offdiag_norm) {
  const auto r = static_cast<Eigen::Index>(spec.partition.size());
  Matrix c(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& ki = kind_for_block(spec.block_kinds, static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < r; ++j) {
      const auto& kj = kind_for_block(spec.block_kinds, static_cast<std::size_t>(j));
      const Matrix blk = b.block(off.start[i], off.start[j], off.size[i], off.size[j]);
      if (i == j) {
        c(i, i) = matrix_measure(blk, ki);
      } else {
        c(i, j) = offdiag_norm(scaled_block(blk, ki, kj), kj.norm, ki.norm);
      }
    }
  }
  return c;
}

}  // namespace

std::string to_string(Norm norm) {
  switch (norm) {
    case Norm::L1:
      return "L1";
    case Norm::L2:
      return "L2";
    case Norm::Linf:
      return "Linf";
  }
  return "?";
}

Norm parse_norm(const std::string& text) {
  if (text == "L1" || text == "l1" || text == "1") return Norm::L1;
  if (text == "L2" || text == "l2" || text == "2") return Norm::L2;
  if (text == "Linf" || text == "linf" || text == "inf" || text == "Inf" || text == "LInf") {
    return Norm::Linf;
  }
  throw DomainError("unknown norm '" + text + "' (expected L1, L2 or Linf)");
}

std::string MeasureKind::label() const {
  return scaling ? to_string(norm) + " (scaled)" : to_string(norm);
}

double scaling_condition_number(const MeasureKind& kind) {
  if (!kind.scaling) return 1.0;
  const Matrix& t = *kind.scaling;
  if (t.rows() != t.cols() || t.rows() == 0) throw SingularScalingError("scaling must be square");
  if (!t.allFinite()) throw SingularScalingError("scaling has non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(t);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > smax * 1e-14)) throw SingularScalingError("scaling matrix is singular");
  return smax / smin;
}

Matrix conjugate_by_scaling(const Matrix& m, const MeasureKind& kind) {
  if (!kind.scaling) return m;
  scaling_condition_number(kind);
  const Matrix& t = *kind.scaling;
  if (t.rows() != m.rows()) throw DomainError("scaling size does not match matrix");
  return t * m * t.inverse();
}

double vector_norm(const Vector& v, Norm norm) {
  switch (norm) {
    case Norm::L1:
      return v.lpNorm<1>();
    case Norm::L2:
      return v.norm();
    case Norm::Linf:
      return v.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

double induced_norm(const Matrix& m, Norm norm) {
  switch (norm) {
    case Norm::L1:
      return max_column_abs_sum(m);
    case Norm::L2:
      return spectral_norm(m);
    case Norm::Linf:
      return max_row_abs_sum(m);
  }
  return 0.0;
}

double induced_norm(const Matrix& m, Norm from, Norm to) {
  if (from == to) return induced_norm(m, from);
  if (from == Norm::L1 && to == Norm::Linf) return m.cwiseAbs().maxCoeff();
  if (from == Norm::L1 && to == Norm::L2) return m.colwise().norm().maxCoeff();
  if (from == Norm::L2 && to == Norm::Linf) return m.rowwise().norm().maxCoeff();
  if (m.size() == 0 || m.isZero(0.0)) return 0.0;
  throw DomainError("no closed-form induced norm from " + to_string(from) + " to " + to_string(to));
}

double induced_norm_upper_bound(const Matrix& m, Norm from, Norm to) {
  if (from == to || (from == Norm::L1) || (from == Norm::L2 && to == Norm::Linf)) {
    return induced_norm(m, from, to);
  }
  if (from == Norm::L2 && to == Norm::L1) {
    // |Mz|_1 <= sum_i |row_i|_2 |z|_2
    return m.rowwise().norm().sum();
  }
  // from == Linf
  const Vector row_sums = m.cwiseAbs().rowwise().sum();
  return to == Norm::L1 ? row_sums.sum() : row_sums.norm();
}

Vector symmetric_part_eigenvalues(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  Vector ev = solver.eigenvalues();  // ascending
  return ev.reverse();
}

double matrix_measure(const Matrix& m, const MeasureKind& kind) {
  check_square(m);
  require_finite(m, "matrix");
  const Matrix a = conjugate_by_scaling(m, kind);
  switch (kind.norm) {
    case Norm::L1: {
      double best = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double v = a(j, j) + a.col(j).cwiseAbs().sum() - std::abs(a(j, j));
        best = std::max(best, v);
      }
      return best;
    }
    case Norm::Linf: {
      double best = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double v = a(i, i) + a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
        best = std::max(best, v);
      }
      return best;
    }
    case Norm::L2:
      return symmetric_part_eigenvalues(a)(0);
  }
  return 0.0;
}

double compound_measure(const Matrix& a_in, int k, const MeasureKind& kind) {
  check_square(a_in);
  require_finite(a_in, "matrix");
  const int n = static_cast<int>(a_in.rows());
  if (k < 0 || k > n) {
    throw DomainError("compound order k=" + std::to_string(k) + " outside [0, " + std::to_string(n) + "]");
  }
  if (k == 0) return 0.0;
  const Matrix a = conjugate_by_scaling(a_in, kind);
  if (kind.norm == Norm::L2) {
    const Vector ev = symmetric_part_eigenvalues(a);
    return ev.head(k).sum();
  }
  // L1 works on columns, Linf on rows: mu_inf(A^[k]) = mu_1((A^T)^[k]).
  const Matrix abs = (kind.norm == Norm::L1 ? a : Matrix(a.transpose())).cwiseAbs();
  const Vector diag = a.diagonal();
  const Vector col_sums = abs.colwise().sum();
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& alpha : enumerate_sequences(k, n)) {
    double v = 0.0;
    for (int p : alpha) {
      // diagonal term plus |entries| of column p outside the rows in alpha
      double inside = 0.0;
      for (int q : alpha) inside += abs(q - 1, p - 1);
      v += diag(p - 1) + col_sums(p - 1) - inside;
    }
    best = std::max(best, v);
  }
  return best;
}

HierarchicBounds hierarchic_measure_bounds(const Matrix& b, const HierarchicNormSpec& spec) {
  const auto off = check_partition(b, spec);
  HierarchicBounds out;
  out.reduced = reduced_matrix(b, spec, off, [](const Matrix& blk, Norm from, Norm to) {
    return induced_norm(blk, from, to);
  });
  out.lower = out.reduced.diagonal().maxCoeff();
  out.upper = matrix_measure(out.reduced, MeasureKind(spec.outer));
  return out;
}

double hierarchic_measure_upper_bound(const Matrix& b, const HierarchicNormSpec& spec) {
  const auto off = check_partition(b, spec);
  const Matrix c = reduced_matrix(b, spec, off, [](const Matrix& blk, Norm from, Norm to) {
    return induced_norm_upper_bound(blk, from, to);
  });
  return matrix_measure(c, MeasureKind(spec.outer));
}

double hierarchic_norm_upper_bound(const Matrix& b, const HierarchicNormSpec& spec) {
  const auto off = check_partition(b, spec);
  const auto r = static_cast<Eigen::Index>(spec.partition.size());
  Matrix nrm(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& ki = kind_for_block(spec.block_kinds, static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < r; ++j) {
      const auto& kj = kind_for_block(spec.block_kinds, static_cast<std::size_t>(j));
      const Matrix blk = b.block(off.start[i], off.start[j], off.size[i], off.size[j]);
      nrm(i, j) = induced_norm_upper_bound(scaled_block(blk, ki, kj), kj.norm, ki.norm);
    }
  }
  return induced_norm(nrm, spec.outer);
}

BlockCompoundMeasure block_diag_compound_measure(const Matrix& a, const Matrix& b, int k,
                                                 const std::vector<MeasureKind>& kinds) {
  check_square(a);
  check_square(b);
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.rows());
  if (k < 1 || k > n + m) {
    throw DomainError("compound order k=" + std::to_string(k) + " outside [1, " +
                      std::to_string(n + m) + "]");
  }
  const auto range = block_range(k, n, m);
  const auto count = static_cast<std::size_t>(range.last - range.first + 1);
  if (kinds.size() != 1 && kinds.size() != count) {
    throw DomainError("expected " + std::to_string(count) + " measure kinds (one per block), got " +
                      std::to_string(kinds.size()));
  }
  for (const auto& kind : kinds) {
    if (kind.scaling) throw DomainError("block measures must be plain Lp measures");
  }
  BlockCompoundMeasure out;
  out.value = -std::numeric_limits<double>::infinity();
  out.lower_bound = std::numeric_limits<double>::infinity();
  for (int i = range.first; i <= range.last; ++i) {
    const auto& kind = kind_for_block(kinds, static_cast<std::size_t>(i - range.first));
    const double v = compound_measure(a, k - i, kind) + compound_measure(b, i, kind);
    const double lb = -compound_measure(-a, k - i, kind) - compound_measure(-b, i, kind);
    out.per_block.push_back(v);
    out.value = std::max(out.value, v);
    out.lower_bound = std::min(out.lower_bound, lb);
  }
  return out;
}

}  // namespace kcontract
