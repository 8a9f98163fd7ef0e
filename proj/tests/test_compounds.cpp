#include <gtest/gtest.h>

#include <complex>

#include "kcontract/compounds.hpp"
#include "oracles.hpp"

using namespace kcontract;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  EXPECT_EQ(a.rows(), b.rows());
  EXPECT_EQ(a.cols(), b.cols());
  return (a - b).cwiseAbs().maxCoeff();
}

double rel_scale(const Matrix& a) { return std::max(1.0, a.cwiseAbs().maxCoeff()); }

std::vector<std::complex<double>> eig(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// All k-fold products (sums when additive) of the eigenvalues.
std::vector<std::complex<double>> eigen_combos(const std::vector<std::complex<double>>& ev, int k, bool sum) {
  std::vector<std::complex<double>> out;
  for (const auto& s : oracle::combinations(k, static_cast<int>(ev.size()))) {
    std::complex<double> acc = sum ? 0.0 : 1.0;
    for (int i : s) acc = sum ? acc + ev[i - 1] : acc * ev[i - 1];
    out.push_back(acc);
  }
  return out;
}

void expect_same_spectrum(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  // Greedy matching is robust to ordering ties between conjugate pairs.
  for (const auto& x : a) {
    auto best = std::min_element(b.begin(), b.end(),
                                 [&](auto p, auto q) { return std::abs(p - x) < std::abs(q - x); });
    EXPECT_LT(std::abs(*best - x), tol * std::max(1.0, std::abs(x)));
    b.erase(best);
  }
}

}  // namespace

TEST(MultCompound, IdentityGivesIdentity) {
  EXPECT_EQ(mult_compound(Matrix::Identity(4, 4), 2).data, Matrix::Identity(6, 6));
}

TEST(MultCompound, FirstOrderAndDeterminant) {
  std::mt19937 rng(1);
  const Matrix a = oracle::random_matrix(rng, 5, 5);
  EXPECT_EQ(mult_compound(a, 1).data, a);
  EXPECT_NEAR(mult_compound(a, 5).data(0, 0), a.determinant(), 1e-12);
  EXPECT_EQ(mult_compound(a, 0).data, Matrix::Ones(1, 1));
}

TEST(MultCompound, MatchesLaplaceMinorOracle) {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int r = 1 + trial % 6;
    const int c = 1 + (trial / 6) % 6;
    const Matrix m = oracle::random_matrix(rng, r, c, 2.0);
    for (int k = 1; k <= std::min(r, c); ++k) {
      const Matrix got = mult_compound(m, k).data;
      const Matrix want = oracle::mult_compound(m, k);
      EXPECT_LT(max_abs_diff(got, want), 1e-11 * rel_scale(want));
    }
  }
}

TEST(MultCompound, RejectsBadInput) {
  EXPECT_THROW(mult_compound(Matrix::Identity(3, 3), 4), DomainError);
  EXPECT_THROW(mult_compound(Matrix::Identity(3, 3), -1), DomainError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(mult_compound(bad, 1), DomainError);
}

TEST(MultCompound, UpperTriangularDisplayedForm) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int draw = 0; draw < 100; ++draw) {
    Matrix a = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = i; j < 4; ++j) a(i, j) = u(rng);
    }
    auto e = [&](int i, int j) { return a(i - 1, j - 1); };
    Matrix want = Matrix::Zero(4, 4);
    want(0, 0) = e(1, 1) * e(2, 2) * e(3, 3);
    want(0, 1) = e(1, 1) * e(2, 2) * e(3, 4);
    want(0, 2) = e(1, 1) * (e(2, 3) * e(3, 4) - e(2, 4) * e(3, 3));
    want(0, 3) = e(1, 4) * e(2, 2) * e(3, 3) - e(1, 2) * e(2, 4) * e(3, 3) - e(1, 3) * e(2, 2) * e(3, 4) +
                 e(1, 2) * e(2, 3) * e(3, 4);
    want(1, 1) = e(1, 1) * e(2, 2) * e(4, 4);
    want(1, 2) = e(1, 1) * e(2, 3) * e(4, 4);
    want(1, 3) = e(1, 2) * e(2, 3) * e(4, 4) - e(1, 3) * e(2, 2) * e(4, 4);
    want(2, 2) = e(1, 1) * e(3, 3) * e(4, 4);
    want(2, 3) = e(1, 2) * e(3, 3) * e(4, 4);
    want(3, 3) = e(2, 2) * e(3, 3) * e(4, 4);
    EXPECT_LT(max_abs_diff(mult_compound(a, 3).data, want), 1e-12);
  }
}

TEST(MultCompound, CauchyBinetRectangular) {
  std::mt19937 rng(4);
  const Matrix b = oracle::random_matrix(rng, 3, 4);
  const Matrix c = oracle::random_matrix(rng, 4, 3);
  const Matrix lhs = oracle::mult_compound(b * c, 2);
  const Matrix rhs = mult_compound(b, 2).data * mult_compound(c, 2).data;
  EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12);
}

TEST(AddCompound, BasicCases) {
  std::mt19937 rng(5);
  const Matrix a = oracle::random_matrix(rng, 3, 3);
  EXPECT_EQ(add_compound(a, 1).data, a);
  EXPECT_NEAR(add_compound(a, 3).data(0, 0), a.trace(), 1e-15);
  EXPECT_EQ(add_compound(a, 0).data, Matrix::Zero(1, 1));
  const Matrix d = Vector{{2.0, -1.0, 5.0}}.asDiagonal();
  const Matrix want = Vector{{1.0, 7.0, 4.0}}.asDiagonal();
  EXPECT_EQ(add_compound(d, 2).data, want);
  EXPECT_THROW(add_compound(Matrix::Zero(2, 3), 1), DomainError);
  EXPECT_THROW(add_compound(a, 4), DomainError);
}

TEST(AddCompound, MatchesFiniteDifferenceOracle) {
  std::mt19937 rng(6);
  for (int n = 2; n <= 5; ++n) {
    const Matrix a = oracle::random_matrix(rng, n, n);
    for (int k = 1; k <= n; ++k) {
      const Matrix fd = oracle::additive_compound_fd(a, k);
      EXPECT_LT(max_abs_diff(add_compound(a, k).data, fd), 1e-6) << "n=" << n << " k=" << k;
    }
  }
}

TEST(AddCompound, DiagonalMatchesFiniteDifferenceOracle) {
  const Matrix d = Vector{{0.3, -0.7, 1.1}}.asDiagonal();
  const Matrix fd = oracle::additive_compound_fd(d, 2);
  const Matrix want = Vector{{-0.4, 1.4, 0.4}}.asDiagonal();
  EXPECT_LT(max_abs_diff(fd, want), 1e-6);
  EXPECT_LT(max_abs_diff(add_compound(d, 2).data, want), 1e-15);
}

TEST(AddCompound, Linearity) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = oracle::random_matrix(rng, 5, 5);
    const Matrix b = oracle::random_matrix(rng, 5, 5);
    for (int k = 1; k <= 5; ++k) {
      EXPECT_LT(max_abs_diff(add_compound(a + b, k).data, add_compound(a, k).data + add_compound(b, k).data),
                1e-14);
      EXPECT_LT(max_abs_diff(add_compound(2.5 * a, k).data, 2.5 * add_compound(a, k).data), 1e-14);
    }
  }
}

TEST(CompoundProperties, TransposeInverseSpectralExp) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 5;
    const Matrix a = oracle::random_matrix(rng, n, n);
    for (int k = 1; k <= n; ++k) {
      const Matrix ck = mult_compound(a, k).data;
      // Minor evaluation order differs under transposition, so equality is to rounding.
      EXPECT_LT(max_abs_diff(ck.transpose(), mult_compound(a.transpose(), k).data), 1e-13 * rel_scale(ck));
      if (std::abs(a.determinant()) > 1e-3) {
        const Matrix inv = mult_compound(a.inverse(), k).data;
        EXPECT_LT(max_abs_diff(ck.inverse(), inv), 1e-9 * rel_scale(inv));
      }
      expect_same_spectrum(eig(ck), eigen_combos(eig(a), k, false), 1e-7);
      expect_same_spectrum(eig(add_compound(a, k).data), eigen_combos(eig(a), k, true), 1e-7);
      const Matrix scaled = a / std::max(1.0, a.norm());
      const Matrix lhs = mult_compound(scaled.exp(), k).data;
      const Matrix rhs = add_compound(scaled, k).data.exp();
      EXPECT_LT(max_abs_diff(lhs, rhs), 1e-8);
    }
  }
}

TEST(Kronecker, ProductIndexFormula) {
  std::mt19937 rng(9);
  const Matrix a = oracle::random_matrix(rng, 2, 2);
  const Matrix b = oracle::random_matrix(rng, 3, 3);
  const Matrix k = kron_product(a, b);
  ASSERT_EQ(k.rows(), 6);
  for (int i = 1; i <= 6; ++i) {
    for (int j = 1; j <= 6; ++j) {
      const double want = a((i - 1) / 3, (j - 1) / 3) * b((i - 1) % 3, (j - 1) % 3);
      EXPECT_EQ(k(i - 1, j - 1), want);
    }
  }
  EXPECT_EQ(kron_product(Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 3.0))(0, 0), 6.0);
  EXPECT_EQ(kron_product(Matrix::Identity(2, 2), b), block_diag(b, b));
}

TEST(Kronecker, SumDefinitionAndSpectrum) {
  std::mt19937 rng(10);
  const Matrix a = oracle::random_matrix(rng, 3, 3);
  const Matrix b = oracle::random_matrix(rng, 2, 2);
  EXPECT_EQ(kron_sum(Matrix::Zero(3, 3), b), kron_product(Matrix::Identity(3, 3), b));
  EXPECT_EQ(kron_sum(Matrix::Constant(1, 1, 1.5), Matrix::Constant(1, 1, -4.0))(0, 0), -2.5);
  std::vector<std::complex<double>> sums;
  for (auto x : eig(a)) {
    for (auto y : eig(b)) sums.push_back(x + y);
  }
  expect_same_spectrum(eig(kron_sum(a, b)), sums, 1e-9);
  EXPECT_THROW(kron_sum(Matrix::Zero(2, 3), b), DomainError);
}

TEST(BlockDecomposition, DiagonalExampleProducts) {
  const double l[] = {2.0, 3.0, 5.0, 7.0, 11.0};
  const Matrix a = Vector{{l[0], l[1], l[2]}}.asDiagonal();
  const Matrix b = Vector{{l[3], l[4]}}.asDiagonal();
  const auto dec = block_diag_mult_decompose(a, b, 2);
  const Matrix d = dec.assemble();
  const std::vector<double> block_order = {l[0] * l[1], l[0] * l[2], l[1] * l[2], l[0] * l[3], l[0] * l[4],
                                           l[1] * l[3], l[1] * l[4], l[2] * l[3], l[2] * l[4], l[3] * l[4]};
  ASSERT_EQ(d.rows(), 10);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(d(i, i), block_order[static_cast<std::size_t>(i)]);
  EXPECT_EQ(d, Matrix(d.diagonal().asDiagonal()));
  // Lex order of the full compound.
  const std::vector<double> lex_order = {l[0] * l[1], l[0] * l[2], l[0] * l[3], l[0] * l[4], l[1] * l[2],
                                         l[1] * l[3], l[1] * l[4], l[2] * l[3], l[2] * l[4], l[3] * l[4]};
  const Matrix c = mult_compound(block_diag(a, b), 2).data;
  for (int i = 0; i < 10; ++i) EXPECT_EQ(c(i, i), lex_order[static_cast<std::size_t>(i)]);
  EXPECT_EQ(dec.reconstruct(), c);
  EXPECT_EQ(dec.block_sizes(), (std::vector<int>{3, 6, 1}));
}

TEST(BlockDecomposition, ExtremeOrders) {
  std::mt19937 rng(11);
  const Matrix a = oracle::random_matrix(rng, 3, 3);
  const Matrix b = oracle::random_matrix(rng, 2, 2);
  const auto full = block_diag_mult_decompose(a, b, 5);
  ASSERT_EQ(full.blocks.size(), 1U);
  EXPECT_NEAR(full.blocks[0].block(0, 0), a.determinant() * b.determinant(), 1e-12);
  const auto full_add = block_diag_add_decompose(a, b, 5);
  EXPECT_NEAR(full_add.blocks[0].block(0, 0), a.trace() + b.trace(), 1e-14);
  const auto first = block_diag_add_decompose(a, b, 1);
  EXPECT_TRUE(first.permutation.is_identity());
  EXPECT_EQ(first.assemble(), block_diag(a, b));
}

TEST(BlockDecomposition, RandomReconstruction) {
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> dim(1, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dim(rng);
    const int m = dim(rng);
    const int k = std::uniform_int_distribution<int>(1, n + m)(rng);
    const Matrix a = oracle::random_matrix(rng, n, n);
    const Matrix b = oracle::random_matrix(rng, m, m);
    const Matrix c = block_diag(a, b);
    const auto md = block_diag_mult_decompose(a, b, k);
    const auto ad = block_diag_add_decompose(a, b, k);
    EXPECT_EQ(md.i_first, std::max(0, k - n));
    EXPECT_EQ(md.i_last, std::min(m, k));
    for (const auto& bl : md.blocks) {
      const auto size = binomial(n, k - bl.tail_order) * binomial(m, bl.tail_order);
      EXPECT_EQ(static_cast<std::uint64_t>(bl.block.rows()), size);
    }
    const Matrix mc = oracle::mult_compound(c, k);
    EXPECT_LT(max_abs_diff(md.reconstruct(), mc), 1e-9 * rel_scale(mc));
    const Matrix ac = add_compound(c, k).data;
    EXPECT_LT(max_abs_diff(ad.reconstruct(), ac), 1e-9 * rel_scale(ac));
    EXPECT_LT(max_abs_diff(permute_to_block(md.permutation, mc), md.assemble()), 1e-9 * rel_scale(mc));
    const Matrix p = permutation_matrix(md.permutation);
    EXPECT_EQ(Matrix(p * p.transpose()), Matrix::Identity(p.rows(), p.cols()));
  }
}

TEST(BlockDecomposition, AdditiveAgainstFiniteDifferences) {
  std::mt19937 rng(13);
  const Matrix a = oracle::random_matrix(rng, 3, 3);
  const Matrix b = oracle::random_matrix(rng, 2, 2);
  const auto dec = block_diag_add_decompose(a, b, 3);
  EXPECT_LT(max_abs_diff(dec.reconstruct(), oracle::additive_compound_fd(block_diag(a, b), 3)), 1e-6);
}
