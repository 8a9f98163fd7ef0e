#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kcontract/index_combinatorics.hpp"

namespace kcontract {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class CompoundKind { Multiplicative, Additive };

/// k-th compound of a base matrix. Rows and columns of `data` follow the
/// lexicographic order of Q(k, base_rows) and Q(k, base_cols).
struct CompoundMatrix {
  Eigen::Index base_rows = 0;
  Eigen::Index base_cols = 0;
  int order = 0;
  CompoundKind kind = CompoundKind::Multiplicative;
  Matrix data;
};

/// Throws DomainError if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

/// det(M[rows|cols]) for 1-based index sequences of equal length.
/// Cofactor expansion up to 3x3, LU with partial pivoting above.
double minor_determinant(const Matrix& m, const IndexSeq& rows, const IndexSeq& cols);

/// k-th multiplicative compound: all k x k minors. k = 0 yields [1].
CompoundMatrix mult_compound(const Matrix& m, int k);

/// k-th additive compound of a square matrix. k = 0 yields [0].
///
/// Entry (alpha, beta) is the diagonal sum over alpha when alpha = beta,
/// (-1)^(s+t) a(alpha_s, beta_t) when beta differs from alpha only by
/// replacing alpha_s with beta_t (s, t the 1-based positions), and zero
/// otherwise.
CompoundMatrix add_compound(const Matrix& a, int k);

Matrix kron_product(const Matrix& a, const Matrix& b);

/// A ⊗ I_m + I_n ⊗ B.
Matrix kron_sum(const Matrix& a, const Matrix& b);

/// diag(A, B).
Matrix block_diag(const Matrix& a, const Matrix& b);

/// Block-diagonal form of the compound of diag(A, B) in block-lex order.
struct BlockDecomposition {
  struct Block {
    int tail_order;  // i: order taken from B; A contributes order k - i
    Matrix block;
  };

  Permutation permutation;
  std::vector<Block> blocks;
  int i_first = 0;
  int i_last = 0;

  /// diag of the blocks, i.e. the compound in block-lex order.
  Matrix assemble() const;
  /// P * assemble() * P^{-1}: the compound in standard-lex order.
  Matrix reconstruct() const;
  std::vector<int> block_sizes() const;
};

BlockDecomposition block_diag_mult_decompose(const Matrix& a, const Matrix& b, int k);
BlockDecomposition block_diag_add_decompose(const Matrix& a, const Matrix& b, int k);

/// P * d * P^{-1}: moves a block-lex-ordered matrix to standard-lex order.
Matrix permute_to_standard(const Permutation& p, const Matrix& d);
/// P^{-1} * c * P: moves a standard-lex-ordered matrix to block-lex order.
Matrix permute_to_block(const Permutation& p, const Matrix& c);

/// Permutation matrix with ones at (mapping[j-1], j).
Matrix permutation_matrix(const Permutation& p);

}  // namespace kcontract
