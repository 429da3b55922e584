#include <gtest/gtest.h>

#include <cmath>

#include "sketchlab/linalg.hpp"
#include "test_util.hpp"

using namespace sketchlab;

namespace {

void expect_orthonormal_columns(const DenseMatrix& q, double tol) {
  const DenseMatrix gram = matmul_tn(q, q);
  for (std::size_t i = 0; i < gram.rows(); ++i)
    for (std::size_t j = 0; j < gram.cols(); ++j)
      EXPECT_NEAR(gram(i, j), i == j ? 1.0 : 0.0, tol) << "entry " << i << "," << j;
}

}  // namespace

TEST(Svd, DiagonalMatrix) {
  const DenseMatrix a{{3.0, 0.0}, {0.0, 1.0}};
  const SvdResult f = svd(a);
  ASSERT_EQ(f.rank, 2u);
  EXPECT_DOUBLE_EQ(f.sigma[0], 3.0);
  EXPECT_DOUBLE_EQ(f.sigma[1], 1.0);
  // Sign convention makes the factors exactly the identity.
  EXPECT_EQ(f.u, DenseMatrix::identity(2));
  EXPECT_EQ(f.v, DenseMatrix::identity(2));
}

TEST(Svd, ZeroMatrixHasRankZero) {
  const SvdResult f = svd(DenseMatrix(2, 2));
  EXPECT_EQ(f.rank, 0u);
  EXPECT_TRUE(f.sigma.empty());
  EXPECT_EQ(f.u.cols(), 0u);
  EXPECT_EQ(f.v.cols(), 0u);
  EXPECT_EQ(f.reconstruct(), DenseMatrix(2, 2));
}

TEST(Svd, RandomMatchesEigenvalueOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const DenseMatrix a = testutil::gaussian(6, 4, seed);
    const SvdResult f = svd(a);
    ASSERT_EQ(f.rank, 4u);
    const auto eig = testutil::jacobi_eigenvalues(testutil::naive_mul(testutil::naive_t(a), a));
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(f.sigma[i], std::sqrt(eig[i]), 1e-10);
    EXPECT_LE(relative_frob_error(f.reconstruct(), a), 1e-8);
    expect_orthonormal_columns(f.u, 1e-8);
    expect_orthonormal_columns(f.v, 1e-8);
  }
}

TEST(Svd, WideInputUsesTransposedSweep) {
  const DenseMatrix a = testutil::gaussian(3, 9, 7);
  const SvdResult f = svd(a);
  EXPECT_EQ(f.rank, 3u);
  EXPECT_EQ(f.u.rows(), 3u);
  EXPECT_EQ(f.v.rows(), 9u);
  EXPECT_LE(relative_frob_error(f.reconstruct(), a), 1e-8);
}

TEST(Svd, DropsSingularValuesBelowTolerance) {
  const DenseMatrix a = testutil::with_singular_values(8, 5, {2.0, 1.0, 1e-9}, 3);
  const SvdResult f = svd(a);
  EXPECT_EQ(f.rank, 2u);
  for (std::size_t i = 0; i + 1 < f.sigma.size(); ++i) EXPECT_GT(f.sigma[i], f.sigma[i + 1]);
}

TEST(Svd, SignConventionAndDeterminism) {
  const DenseMatrix a = testutil::gaussian(7, 5, 11);
  const SvdResult f1 = svd(a);
  const SvdResult f2 = svd(a);
  EXPECT_EQ(f1.u, f2.u);
  EXPECT_EQ(f1.v, f2.v);
  for (std::size_t r = 0; r < f1.rank; ++r) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < f1.u.rows(); ++i)
      if (std::abs(f1.u(i, r)) > std::abs(f1.u(best, r))) best = i;
    EXPECT_GT(f1.u(best, r), 0.0);
  }
}

TEST(Svd, NonConvergenceNamesShape) {
  const DenseMatrix a = testutil::gaussian(6, 4, 5);
  JacobiOptions opt;
  opt.max_sweeps = 1;
  try {
    svd(a, kDefaultRankTol, opt);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("6x4"), std::string::npos);
  }
}

TEST(Svd, RejectsNonPositiveTolerance) {
  EXPECT_THROW(svd(DenseMatrix::identity(2), 0.0), ParameterError);
}

TEST(BestRankK, DiagonalTruncation) {
  const DenseMatrix a{{3.0, 0.0}, {0.0, 1.0}};
  const DenseMatrix expected{{3.0, 0.0}, {0.0, 0.0}};
  EXPECT_LE(testutil::diff_norm(best_rank_k(a, 1), expected), 1e-14);
}

TEST(BestRankK, ExactForLowRankInput) {
  const DenseMatrix a = testutil::with_singular_values(9, 6, {1.5, 0.7, 0.2}, 4);
  EXPECT_LE(testutil::diff_norm(best_rank_k(a, 3), a), 1e-10);
  EXPECT_LE(testutil::diff_norm(best_rank_k(a, 5), a), 1e-10);
}

TEST(BestRankK, EckartYoungTail) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const DenseMatrix a = testutil::gaussian(6, 4, seed);
    const SvdResult f = svd(a);
    const double tail = f.sigma[2] * f.sigma[2] + f.sigma[3] * f.sigma[3];
    const DenseMatrix approx = best_rank_k(a, 2);
    EXPECT_NEAR(frob_norm_sq(a - approx), tail, 1e-8);
    EXPECT_NEAR(eckart_young_floor(a, 2), tail, 1e-12);
    EXPECT_LE(svd(approx).rank, 2u);
  }
}

TEST(BestRankK, RejectsZeroRank) { EXPECT_THROW(best_rank_k(DenseMatrix::identity(2), 0), ParameterError); }

TEST(FrobNorm, Examples) {
  EXPECT_EQ(frob_norm_sq(DenseMatrix(3, 2)), 0.0);
  EXPECT_EQ(frob_norm_sq(DenseMatrix::identity(3)), 3.0);
  EXPECT_EQ(frob_norm_sq(DenseMatrix{{1.0, 2.0}, {3.0, 4.0}}), 30.0);
}

TEST(SymEig, MatchesReferenceAndReconstructs) {
  const DenseMatrix g = testutil::gaussian(5, 5, 21);
  const DenseMatrix a = matmul_tn(g, g);
  const SymEigResult e = sym_eig(a);
  const auto ref = testutil::jacobi_eigenvalues(a);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(e.values[i], ref[i], 1e-9);
  DenseMatrix scaled = e.vectors;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) scaled(i, j) *= e.values[j];
  EXPECT_LE(relative_frob_error(matmul_nt(scaled, e.vectors), a), 1e-12);
}
