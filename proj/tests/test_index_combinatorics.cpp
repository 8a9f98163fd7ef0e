#include <gtest/gtest.h>

#include "kcontract/index_combinatorics.hpp"
#include "oracles.hpp"

using namespace kcontract;

TEST(EnumerateSequences, ThreeOfFour) {
  const std::vector<IndexSeq> expected = {{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}};
  EXPECT_EQ(enumerate_sequences(3, 4), expected);
}

TEST(EnumerateSequences, Singletons) {
  const std::vector<IndexSeq> expected = {{1}, {2}, {3}};
  EXPECT_EQ(enumerate_sequences(1, 3), expected);
}

TEST(EnumerateSequences, MatchesBitmaskOracle) {
  for (int n = 1; n <= 8; ++n) {
    for (int k = 1; k <= n; ++k) {
      const auto seqs = enumerate_sequences(k, n);
      EXPECT_EQ(seqs, oracle::combinations(k, n)) << "k=" << k << " n=" << n;
      EXPECT_EQ(seqs.size(), binomial(n, k));
    }
  }
  const auto two_five = enumerate_sequences(2, 5);
  ASSERT_EQ(two_five.size(), 10U);
  EXPECT_EQ(two_five.front(), (IndexSeq{1, 2}));
  EXPECT_EQ(two_five.back(), (IndexSeq{4, 5}));
}

TEST(EnumerateSequences, RejectsBadOrder) {
  EXPECT_THROW(enumerate_sequences(0, 3), DomainError);
  EXPECT_THROW(enumerate_sequences(4, 3), DomainError);
}

TEST(Binomial, SmallValuesAndSaturation) {
  EXPECT_EQ(binomial(5, 2), 10U);
  EXPECT_EQ(binomial(7, 0), 1U);
  EXPECT_EQ(binomial(3, 4), 0U);
  EXPECT_EQ(binomial(3, -1), 0U);
  EXPECT_EQ(binomial(200, 100), UINT64_MAX);
}

TEST(DimensionGuard, RefusesLargeCompounds) {
  EXPECT_NO_THROW(check_compound_dim(20, 3));
  EXPECT_THROW(check_compound_dim(40, 10), DimensionError);
  EXPECT_THROW(enumerate_sequences(10, 40), DimensionError);
}

TEST(LexRank, RoundTrip) {
  for (int n = 1; n <= 7; ++n) {
    for (int k = 1; k <= n; ++k) {
      const auto seqs = enumerate_sequences(k, n);
      for (std::size_t r = 0; r < seqs.size(); ++r) {
        EXPECT_EQ(lex_rank(seqs[r], n), r + 1);
        EXPECT_EQ(lex_unrank(r + 1, k, n), seqs[r]);
      }
    }
  }
}

TEST(BlockLexOrder, DisplayedExample) {
  const std::vector<IndexSeq> expected = {{1, 2}, {1, 3}, {2, 3}, {1, 4}, {1, 5},
                                          {2, 4}, {2, 5}, {3, 4}, {3, 5}, {4, 5}};
  EXPECT_EQ(block_lex_order(2, 3, 2), expected);
}

TEST(BlockLexOrder, CoincidesWithLexWhenHeadIsSmall) {
  EXPECT_EQ(block_lex_order(2, 2, 3), enumerate_sequences(2, 5));
}

TEST(BlockLexOrder, FullOrderIsSingleSequence) {
  const auto seqs = block_lex_order(5, 3, 2);
  ASSERT_EQ(seqs.size(), 1U);
  EXPECT_EQ(seqs[0], (IndexSeq{1, 2, 3, 4, 5}));
}

TEST(BlockLexOrder, IsPermutationOfLexSortedBySAlpha) {
  for (int n = 1; n <= 4; ++n) {
    for (int m = 1; m <= 4; ++m) {
      for (int k = 1; k <= n + m; ++k) {
        auto block = block_lex_order(k, n, m);
        auto lex = enumerate_sequences(k, n + m);
        for (std::size_t j = 1; j < block.size(); ++j) {
          const int prev = split_index(block[j - 1], n).s_alpha;
          const int cur = split_index(block[j], n).s_alpha;
          EXPECT_TRUE(prev > cur || (prev == cur && block[j - 1] < block[j]));
        }
        std::sort(block.begin(), block.end());
        EXPECT_EQ(block, lex);
      }
    }
  }
}

TEST(SplitIndex, Examples) {
  auto s = split_index({1, 4}, 3);
  EXPECT_EQ(s.s_alpha, 2);
  EXPECT_EQ(s.head, (IndexSeq{1}));
  EXPECT_EQ(s.tail, (IndexSeq{1}));

  s = split_index({4, 5}, 3);
  EXPECT_EQ(s.s_alpha, 1);
  EXPECT_TRUE(s.head.empty());
  EXPECT_EQ(s.tail, (IndexSeq{1, 2}));

  s = split_index({1, 2, 3}, 3);
  EXPECT_EQ(s.s_alpha, 4);
  EXPECT_EQ(s.head, (IndexSeq{1, 2, 3}));
  EXPECT_TRUE(s.tail.empty());
}

TEST(BlockRange, Vandermonde) {
  for (int n = 1; n <= 6; ++n) {
    for (int m = 1; m <= 6; ++m) {
      for (int k = 1; k <= n + m; ++k) {
        const auto r = block_range(k, n, m);
        EXPECT_EQ(r.first, std::max(0, k - n));
        EXPECT_EQ(r.last, std::min(m, k));
        std::uint64_t total = 0;
        for (int i = r.first; i <= r.last; ++i) total += binomial(n, k - i) * binomial(m, i);
        EXPECT_EQ(total, binomial(n + m, k));
      }
    }
  }
}

TEST(BuildPermutation, MapsLexListOntoBlockLexList) {
  for (int n = 1; n <= 4; ++n) {
    for (int m = 1; m <= 4; ++m) {
      for (int k = 1; k <= n + m; ++k) {
        const auto p = build_permutation(k, n, m);
        const auto lex = enumerate_sequences(k, n + m);
        const auto block = block_lex_order(k, n, m);
        ASSERT_EQ(p.size(), lex.size());
        EXPECT_TRUE(p.is_bijection());
        for (std::size_t j = 0; j < p.size(); ++j) {
          EXPECT_EQ(lex[static_cast<std::size_t>(p.mapping[j] - 1)], block[j]);
        }
        EXPECT_TRUE(p.compose(p.inverse()).is_identity());
        EXPECT_TRUE(p.inverse().compose(p).is_identity());
      }
    }
  }
}

TEST(BuildPermutation, IdentityCases) {
  EXPECT_TRUE(build_permutation(1, 3, 2).is_identity());
  EXPECT_TRUE(build_permutation(1, 1, 5).is_identity());
  const auto full = build_permutation(5, 3, 2);
  EXPECT_EQ(full.size(), 1U);
  EXPECT_TRUE(full.is_identity());
}

TEST(BuildPermutation, DisplayedExampleMapping) {
  // Lex Q(2,5): 12 13 14 15 23 24 25 34 35 45.
  const std::vector<int> expected = {1, 2, 5, 3, 4, 6, 7, 8, 9, 10};
  EXPECT_EQ(build_permutation(2, 3, 2).mapping, expected);
}
