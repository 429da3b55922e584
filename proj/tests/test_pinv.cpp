#include <gtest/gtest.h>

#include <cmath>

#include "sketchlab/pinv.hpp"
#include "test_util.hpp"

using namespace sketchlab;

namespace {

// Z with m rows, given rank, nonzero singular values in [0.5, 1] (well
// separated from the tolerance).
DenseMatrix random_rank(std::size_t m, std::size_t cols, std::size_t rank, std::uint64_t seed) {
  if (rank == 0) return DenseMatrix(m, cols);
  CounterRng rng(seed, Stream::kTest, 99);
  std::vector<double> sigma(rank);
  for (double& s : sigma) s = 0.5 + 0.5 * rng.uniform();
  std::sort(sigma.rbegin(), sigma.rend());
  return testutil::with_singular_values(m, cols, sigma, seed);
}

}  // namespace

TEST(CharPoly, DiagonalExample) {
  const CharPoly p = char_poly_coeffs(DenseMatrix{{2.0, 0.0}, {0.0, 3.0}});
  ASSERT_EQ(p.coeffs.size(), 2u);
  EXPECT_DOUBLE_EQ(p.coeffs[0], -5.0);
  EXPECT_DOUBLE_EQ(p.coeffs[1], 6.0);
}

TEST(CharPoly, ZeroMatrix) {
  const CharPoly p = char_poly_coeffs(DenseMatrix(3, 3));
  EXPECT_EQ(p.coeffs, (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(CharPoly, MatchesCofactorExpansion) {
  for (std::size_t m = 1; m <= 5; ++m) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const DenseMatrix a = testutil::gaussian(m, m, seed * 10 + m);
      const auto ref = testutil::charpoly_by_cofactors(a);
      const auto got = char_poly_coeffs(a).coeffs;
      ASSERT_EQ(got.size(), m);
      for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(got[i], ref[i], 1e-10 * (1.0 + std::abs(ref[i])));
      // Last coefficient is (−1)^m det(M).
      const double det = testutil::det_by_cofactors(a);
      EXPECT_NEAR(got[m - 1], (m % 2 == 0 ? 1.0 : -1.0) * det, 1e-10 * (1.0 + std::abs(det)));
    }
  }
}

TEST(CharPoly, RejectsNonSquare) { EXPECT_THROW(char_poly_coeffs(DenseMatrix(2, 3)), ParameterError); }

TEST(PinvDecell, Identity) {
  EXPECT_LE(testutil::diff_norm(pinv_decell(DenseMatrix::identity(2)), DenseMatrix::identity(2)), 1e-14);
}

TEST(PinvDecell, ZeroMatrixGoesThroughAllZeroBranch) {
  EXPECT_EQ(pinv_decell(DenseMatrix(2, 2)), DenseMatrix(2, 2));
  EXPECT_EQ(pinv_decell(DenseMatrix(2, 5)), DenseMatrix(5, 2));
}

TEST(PinvDecell, RankDeficientDiagonal) {
  const DenseMatrix expected{{0.5, 0.0}, {0.0, 0.0}};
  EXPECT_LE(testutil::diff_norm(pinv_decell(DenseMatrix{{2.0, 0.0}, {0.0, 0.0}}), expected), 1e-14);
}

TEST(PinvDecell, AgreesWithSvdOracleOnRankTwo) {
  const DenseMatrix z = random_rank(4, 7, 2, 5);
  EXPECT_LE(relative_frob_error(pinv_decell(z), pinv_svd_oracle(z)), 1e-9);
}

TEST(PinvDecell, PenroseIdentitiesAllRanks) {
  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::size_t rank = 0; rank <= m; ++rank) {
      for (std::uint64_t rep = 0; rep < 3; ++rep) {
        const DenseMatrix z = random_rank(m, m + 2, rank, 1000 * m + 10 * rank + rep);
        const DenseMatrix p = pinv_decell(z);
        EXPECT_LE(penrose_residual(z, p), 1e-7) << "m=" << m << " rank=" << rank;
        EXPECT_LE(relative_frob_error(p, pinv_svd_oracle(z)) * (rank > 0), 1e-7);
      }
    }
  }
}

TEST(PinvDecell, ScaleEquivariant) {
  const DenseMatrix z = random_rank(3, 5, 2, 8);
  const DenseMatrix big = 1e4 * z;
  EXPECT_LE(relative_frob_error(1e4 * pinv_decell(big), pinv_decell(z)), 1e-9);
}

TEST(PinvGreedy, FullColumnRankGivesIdentity) {
  EXPECT_LE(testutil::diff_norm(pinv_greedy_projector(DenseMatrix::identity(3)), DenseMatrix::identity(3)), 1e-14);
}

TEST(PinvGreedy, SkipsDependentRow) {
  // Rows (1,0), (2,0), (0,1): row 2 is rejected, rows 1 and 3 span ℝ².
  const DenseMatrix z{{1.0, 0.0}, {2.0, 0.0}, {0.0, 1.0}};
  EXPECT_LE(testutil::diff_norm(pinv_greedy_projector(z), DenseMatrix::identity(2)), 1e-12);
}

TEST(PinvGreedy, ZeroInputGivesZeroProjector) {
  EXPECT_EQ(pinv_greedy_projector(DenseMatrix(3, 4)), DenseMatrix(4, 4));
}

TEST(PinvGreedy, MatchesDecellProjector) {
  for (std::size_t m = 1; m <= 6; ++m) {
    for (std::size_t rank = 0; rank <= m; ++rank) {
      const DenseMatrix z = random_rank(m, m + 1, rank, 77 * m + rank);
      const DenseMatrix via_decell = matmul(pinv_decell(z), z);
      EXPECT_LE(testutil::diff_norm(pinv_greedy_projector(z), via_decell), 1e-7)
          << "m=" << m << " rank=" << rank;
    }
  }
}

TEST(PinvSvdOracle, Examples) {
  EXPECT_LE(testutil::diff_norm(pinv_svd_oracle(DenseMatrix::identity(2)), DenseMatrix::identity(2)), 1e-14);
  const DenseMatrix expected{{0.5, 0.0}, {0.0, 0.0}};
  EXPECT_LE(testutil::diff_norm(pinv_svd_oracle(DenseMatrix{{2.0, 0.0}, {0.0, 0.0}}), expected), 1e-14);
  const DenseMatrix z = testutil::gaussian(5, 3, 4);
  EXPECT_LE(penrose_residual(z, pinv_svd_oracle(z)), 1e-9);
}
