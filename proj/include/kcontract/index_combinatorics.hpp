#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kcontract {

/// Raised when an order or dimension lies outside the admissible range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a compound would exceed kMaxCompoundDim rows or columns.
class DimensionError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Largest binomial(n, k) accepted for a compound dimension.
inline constexpr std::uint64_t kMaxCompoundDim = 100000;

/// Strictly increasing 1-based indices drawn from {1..N}.
using IndexSeq = std::vector<int>;

/// binom(n, k); saturates at UINT64_MAX instead of overflowing. Zero when k < 0 or k > n.
std::uint64_t binomial(int n, int k);

/// Throws DimensionError if binom(n, k) exceeds kMaxCompoundDim.
void check_compound_dim(int n, int k);

/// All binom(N, k) sequences of Q(k, N) in lexicographic order. Requires 1 <= k <= N.
std::vector<IndexSeq> enumerate_sequences(int k, int N);

/// Position (1-based) of seq inside the lexicographic list Q(seq.size(), N).
std::size_t lex_rank(const IndexSeq& seq, int N);

/// Inverse of lex_rank: the rank-th (1-based) sequence of Q(k, N).
IndexSeq lex_unrank(std::size_t rank, int k, int N);

/// Q(k, n+m) ordered first by s_alpha descending, then lexicographically.
std::vector<IndexSeq> block_lex_order(int k, int n, int m);

/// Decomposition of a sequence over {1..n+m} into the part pointing at the
/// first n coordinates (head) and the rest (tail, shifted down by n).
struct BlockSplit {
  int s_alpha = 1;  // minimal 1-based i with seq[i] > n, or k+1
  IndexSeq head;
  IndexSeq tail;
};

BlockSplit split_index(const IndexSeq& seq, int n);

/// Reordering between standard-lex Q(k, n+m) and block-lex Q(k, n, m).
///
/// mapping[j-1] is the standard-lex position of the j-th block-lex sequence
/// (both 1-based). As a matrix, P has a one at (mapping[j-1], j), so that a
/// matrix D written in block-lex order satisfies C = P D P^{-1} in
/// standard-lex order.
struct Permutation {
  std::vector<int> mapping;

  std::size_t size() const { return mapping.size(); }
  Permutation inverse() const;
  /// (this ∘ other): position j goes to mapping[other.mapping[j-1]-1].
  Permutation compose(const Permutation& other) const;
  bool is_identity() const;
  bool is_bijection() const;
};

/// Builds P for Q(k, n, m) from the block index arithmetic: within the block
/// with tail length i, entry number q corresponds to head element
/// ceil(q / binom(m, i)) of Q(k-i, n) and tail element ((q-1) mod binom(m, i)) + 1
/// of Q(i, m).
Permutation build_permutation(int k, int n, int m);

/// First and last admissible tail length: max{0, k-n} and min{m, k}.
struct BlockRange {
  int first = 0;
  int last = 0;
};

BlockRange block_range(int k, int n, int m);

}  // namespace kcontract
