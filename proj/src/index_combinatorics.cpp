#include "kcontract/index_combinatorics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace kcontract {

namespace {

// Q(k, N) in lexicographic order; Q(0, N) is the single empty sequence.
std::vector<IndexSeq> combinations(int k, int N) {
  std::vector<IndexSeq> out;
  out.reserve(static_cast<std::size_t>(binomial(N, k)));
  IndexSeq seq(static_cast<std::size_t>(k));
  std::iota(seq.begin(), seq.end(), 1);
  while (true) {
    out.push_back(seq);
    int p = k - 1;
    while (p >= 0 && seq[p] == N - k + p + 1) --p;
    if (p < 0) break;
    ++seq[p];
    for (int q = p + 1; q < k; ++q) seq[q] = seq[q - 1] + 1;
  }
  return out;
}

void check_order(int k, int N) {
  if (k < 1 || k > N) {
    throw DomainError("order k=" + std::to_string(k) + " outside [1, " + std::to_string(N) + "]");
  }
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is exact at every step; guard the multiplication.
    const std::uint64_t f = static_cast<std::uint64_t>(n - k + i);
    if (r > std::numeric_limits<std::uint64_t>::max() / f) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r = r * f / static_cast<std::uint64_t>(i);
  }
  return r;
}

void check_compound_dim(int n, int k) {
  const auto r = binomial(n, k);
  if (r > kMaxCompoundDim) {
    throw DimensionError("compound dimension binom(" + std::to_string(n) + ", " + std::to_string(k) +
                         ") = " + std::to_string(r) + " exceeds limit " +
                         std::to_string(kMaxCompoundDim));
  }
}

std::vector<IndexSeq> enumerate_sequences(int k, int N) {
  check_order(k, N);
  check_compound_dim(N, k);
  return combinations(k, N);
}

std::size_t lex_rank(const IndexSeq& seq, int N) {
  const int k = static_cast<int>(seq.size());
  std::size_t rank = 1;
  int prev = 0;
  for (int p = 0; p < k; ++p) {
    for (int v = prev + 1; v < seq[p]; ++v) {
      rank += static_cast<std::size_t>(binomial(N - v, k - p - 1));
    }
    prev = seq[p];
  }
  return rank;
}

IndexSeq lex_unrank(std::size_t rank, int k, int N) {
  IndexSeq seq;
  seq.reserve(static_cast<std::size_t>(k));
  std::size_t remaining = rank - 1;
  int v = 1;
  for (int p = 0; p < k; ++p) {
    while (true) {
      const auto count = static_cast<std::size_t>(binomial(N - v, k - p - 1));
      if (remaining < count) break;
      remaining -= count;
      ++v;
    }
    seq.push_back(v);
    ++v;
  }
  return seq;
}

BlockSplit split_index(const IndexSeq& seq, int n) {
  BlockSplit split;
  const int k = static_cast<int>(seq.size());
  split.s_alpha = k + 1;
  for (int i = 0; i < k; ++i) {
    if (seq[i] > n) {
      split.s_alpha = i + 1;
      break;
    }
  }
  split.head.assign(seq.begin(), seq.begin() + (split.s_alpha - 1));
  for (int i = split.s_alpha - 1; i < k; ++i) split.tail.push_back(seq[i] - n);
  return split;
}

std::vector<IndexSeq> block_lex_order(int k, int n, int m) {
  if (n < 1 || m < 1) throw DomainError("block sizes must be positive");
  check_order(k, n + m);
  check_compound_dim(n + m, k);
  auto seqs = combinations(k, n + m);
  // combinations() is already lexicographic, so a stable sort on s_alpha suffices.
  std::stable_sort(seqs.begin(), seqs.end(), [n](const IndexSeq& a, const IndexSeq& b) {
    return split_index(a, n).s_alpha > split_index(b, n).s_alpha;
  });
  return seqs;
}

BlockRange block_range(int k, int n, int m) { return {std::max(0, k - n), std::min(m, k)}; }

Permutation build_permutation(int k, int n, int m) {
  if (n < 1 || m < 1) throw DomainError("block sizes must be positive");
  check_order(k, n + m);
  check_compound_dim(n + m, k);
  Permutation perm;
  perm.mapping.reserve(static_cast<std::size_t>(binomial(n + m, k)));
  const auto range = block_range(k, n, m);
  for (int i = range.first; i <= range.last; ++i) {
    const auto heads = combinations(k - i, n);
    const auto tails = combinations(i, m);
    const std::size_t tail_count = tails.size();
    const std::size_t block = heads.size() * tail_count;
    for (std::size_t q = 1; q <= block; ++q) {
      const std::size_t h = (q + tail_count - 1) / tail_count;  // ceil(q / |tails|)
      const std::size_t t = (q - 1) % tail_count + 1;
      IndexSeq seq = heads[h - 1];
      for (int v : tails[t - 1]) seq.push_back(v + n);
      perm.mapping.push_back(static_cast<int>(lex_rank(seq, n + m)));
    }
  }
  return perm;
}

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.mapping.assign(mapping.size(), 0);
  for (std::size_t j = 0; j < mapping.size(); ++j) {
    inv.mapping[static_cast<std::size_t>(mapping[j] - 1)] = static_cast<int>(j + 1);
  }
  return inv;
}

Permutation Permutation::compose(const Permutation& other) const {
  if (other.size() != size()) throw DomainError("permutation sizes differ");
  Permutation out;
  out.mapping.reserve(size());
  for (int j : other.mapping) out.mapping.push_back(mapping[static_cast<std::size_t>(j - 1)]);
  return out;
}

bool Permutation::is_identity() const {
  for (std::size_t j = 0; j < mapping.size(); ++j) {
    if (mapping[j] != static_cast<int>(j + 1)) return false;
  }
  return true;
}

bool Permutation::is_bijection() const {
  std::vector<bool> seen(mapping.size(), false);
  for (int v : mapping) {
    if (v < 1 || v > static_cast<int>(mapping.size()) || seen[static_cast<std::size_t>(v - 1)]) {
      return false;
    }
    seen[static_cast<std::size_t>(v - 1)] = true;
  }
  return true;
}

}  // namespace kcontract
