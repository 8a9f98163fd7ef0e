#include "kcontract/compounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kcontract {

namespace {

void check_mult_order(const Matrix& m, int k) {
  const auto limit = std::min(m.rows(), m.cols());
  if (k < 0 || k > limit) {
    throw DomainError("compound order k=" + std::to_string(k) + " outside [0, " +
                      std::to_string(limit) + "]");
  }
}

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DomainError(std::string(what) + " must be square, got " + std::to_string(m.rows()) +
                      "x" + std::to_string(m.cols()));
  }
}

}  // namespace

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
}

double minor_determinant(const Matrix& m, const IndexSeq& rows, const IndexSeq& cols) {
  const auto k = rows.size();
  auto at = [&](std::size_t i, std::size_t j) { return m(rows[i] - 1, cols[j] - 1); };
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return at(0, 0);
    case 2:
      return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    case 3:
      return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
             at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
             at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
    default:
      break;
  }
  Matrix sub(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) sub(i, j) = at(i, j);
  }
  return Eigen::PartialPivLU<Matrix>(sub).determinant();
}

CompoundMatrix mult_compound(const Matrix& m, int k) {
  require_finite(m, "matrix");
  check_mult_order(m, k);
  CompoundMatrix out{m.rows(), m.cols(), k, CompoundKind::Multiplicative, Matrix()};
  if (k == 0) {
    out.data = Matrix::Ones(1, 1);
    return out;
  }
  check_compound_dim(static_cast<int>(m.rows()), k);
  check_compound_dim(static_cast<int>(m.cols()), k);
  const auto row_seqs = enumerate_sequences(k, static_cast<int>(m.rows()));
  const auto col_seqs = enumerate_sequences(k, static_cast<int>(m.cols()));
  out.data.resize(static_cast<Eigen::Index>(row_seqs.size()),
                  static_cast<Eigen::Index>(col_seqs.size()));
  for (std::size_t r = 0; r < row_seqs.size(); ++r) {
    for (std::size_t c = 0; c < col_seqs.size(); ++c) {
      out.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          minor_determinant(m, row_seqs[r], col_seqs[c]);
    }
  }
  return out;
}

CompoundMatrix add_compound(const Matrix& a, int k) {
  require_finite(a, "matrix");
  check_square(a, "additive compound base");
  check_mult_order(a, k);
  const int n = static_cast<int>(a.rows());
  CompoundMatrix out{a.rows(), a.cols(), k, CompoundKind::Additive, Matrix()};
  if (k == 0) {
    out.data = Matrix::Zero(1, 1);
    return out;
  }
  check_compound_dim(n, k);
  const auto seqs = enumerate_sequences(k, n);
  const auto r = static_cast<Eigen::Index>(seqs.size());
  out.data = Matrix::Zero(r, r);
  std::vector<bool> member(static_cast<std::size_t>(n) + 1);
  for (Eigen::Index row = 0; row < r; ++row) {
    const IndexSeq& alpha = seqs[static_cast<std::size_t>(row)];
    std::fill(member.begin(), member.end(), false);
    double diag = 0.0;
    for (int v : alpha) {
      member[static_cast<std::size_t>(v)] = true;
      diag += a(v - 1, v - 1);
    }
    out.data(row, row) = diag;
    for (int s = 0; s < k; ++s) {
      for (int j = 1; j <= n; ++j) {
        if (member[static_cast<std::size_t>(j)]) continue;
        IndexSeq beta = alpha;
        beta[static_cast<std::size_t>(s)] = j;
        std::sort(beta.begin(), beta.end());
        const auto t = std::find(beta.begin(), beta.end(), j) - beta.begin();
        // 1-based positions s+1 and t+1 give the same parity as s + t.
        const double sign = ((s + t) % 2 == 0) ? 1.0 : -1.0;
        const auto col = static_cast<Eigen::Index>(lex_rank(beta, n) - 1);
        out.data(row, col) += sign * a(alpha[static_cast<std::size_t>(s)] - 1, j - 1);
      }
    }
  }
  return out;
}

Matrix kron_product(const Matrix& a, const Matrix& b) {
  require_finite(a, "left factor");
  require_finite(b, "right factor");
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) = a(i / b.rows(), j / b.cols()) * b(i % b.rows(), j % b.cols());
    }
  }
  return out;
}

Matrix kron_sum(const Matrix& a, const Matrix& b) {
  check_square(a, "Kronecker sum left operand");
  check_square(b, "Kronecker sum right operand");
  return kron_product(a, Matrix::Identity(b.rows(), b.rows())) +
         kron_product(Matrix::Identity(a.rows(), a.rows()), b);
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix permutation_matrix(const Permutation& p) {
  const auto r = static_cast<Eigen::Index>(p.size());
  Matrix out = Matrix::Zero(r, r);
  for (Eigen::Index j = 0; j < r; ++j) out(p.mapping[static_cast<std::size_t>(j)] - 1, j) = 1.0;
  return out;
}

Matrix permute_to_standard(const Permutation& p, const Matrix& d) {
  const auto r = static_cast<Eigen::Index>(p.size());
  if (d.rows() != r || d.cols() != r) throw DomainError("permutation and matrix sizes differ");
  Matrix out(r, r);
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = 0; b < r; ++b) {
      out(p.mapping[static_cast<std::size_t>(a)] - 1, p.mapping[static_cast<std::size_t>(b)] - 1) =
          d(a, b);
    }
  }
  return out;
}

Matrix permute_to_block(const Permutation& p, const Matrix& c) {
  const auto r = static_cast<Eigen::Index>(p.size());
  if (c.rows() != r || c.cols() != r) throw DomainError("permutation and matrix sizes differ");
  Matrix out(r, r);
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = 0; b < r; ++b) {
      out(a, b) =
          c(p.mapping[static_cast<std::size_t>(a)] - 1, p.mapping[static_cast<std::size_t>(b)] - 1);
    }
  }
  return out;
}

Matrix BlockDecomposition::assemble() const {
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.block.rows();
  Matrix out = Matrix::Zero(total, total);
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    out.block(offset, offset, b.block.rows(), b.block.cols()) = b.block;
    offset += b.block.rows();
  }
  return out;
}

Matrix BlockDecomposition::reconstruct() const { return permute_to_standard(permutation, assemble()); }

std::vector<int> BlockDecomposition::block_sizes() const {
  std::vector<int> sizes;
  for (const auto& b : blocks) sizes.push_back(static_cast<int>(b.block.rows()));
  return sizes;
}

namespace {

template <typename Combine>
BlockDecomposition decompose(const Matrix& a, const Matrix& b, int k, CompoundKind kind,
                             Combine combine) {
  check_square(a, "first block");
  check_square(b, "second block");
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.rows());
  BlockDecomposition out;
  out.permutation = build_permutation(k, n, m);
  const auto range = block_range(k, n, m);
  out.i_first = range.first;
  out.i_last = range.last;
  for (int i = range.first; i <= range.last; ++i) {
    const auto ca = kind == CompoundKind::Multiplicative ? mult_compound(a, k - i) : add_compound(a, k - i);
    const auto cb = kind == CompoundKind::Multiplicative ? mult_compound(b, i) : add_compound(b, i);
    out.blocks.push_back({i, combine(ca.data, cb.data)});
  }
  return out;
}

}  // namespace

BlockDecomposition block_diag_mult_decompose(const Matrix& a, const Matrix& b, int k) {
  return decompose(a, b, k, CompoundKind::Multiplicative,
                   [](const Matrix& x, const Matrix& y) { return kron_product(x, y); });
}

BlockDecomposition block_diag_add_decompose(const Matrix& a, const Matrix& b, int k) {
  return decompose(a, b, k, CompoundKind::Additive,
                   [](const Matrix& x, const Matrix& y) { return kron_sum(x, y); });
}

}  // namespace kcontract
