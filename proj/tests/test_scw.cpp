#include <gtest/gtest.h>

#include "sketchlab/linalg.hpp"
#include "sketchlab/scw.hpp"
#include "sketchlab/sketch.hpp"
#include "test_util.hpp"

using namespace sketchlab;

namespace {

SparseSketch sparse_identity(std::size_t n) {
  std::vector<std::vector<SketchEntry>> cols(n);
  for (std::size_t j = 0; j < n; ++j) cols[j].push_back({j, 1.0});
  return SparseSketch(n, n, 1, cols);
}

// S whose rows are all orthogonal to the column space of A: A = e₁ uᵀ and
// S touches only rows 1..n−1.
std::pair<SparseSketch, DenseMatrix> annihilating_pair() {
  DenseMatrix a(4, 3);
  a(0, 0) = 0.6;
  a(0, 2) = 0.8;
  std::vector<std::vector<SketchEntry>> cols(4);
  cols[1].push_back({0, 1.0});
  cols[2].push_back({1, -2.0});
  return {SparseSketch(2, 4, 1, cols), a};
}

}  // namespace

TEST(Scw, ZeroSketchedMatrixGivesZero) {
  const auto [s, a] = annihilating_pair();
  EXPECT_EQ(scw(s, a, 1), DenseMatrix(4, 3));
  EXPECT_EQ(scw_loss(s, a, 1), 1.0);
}

TEST(Scw, IdentitySketchIsBestRankK) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix a = testutil::normalized(testutil::gaussian(8, 6, seed));
    EXPECT_LE(testutil::diff_norm(scw(sparse_identity(8), a, 3), best_rank_k(a, 3)), 1e-10);
    EXPECT_NEAR(scw_loss(sparse_identity(8), a, 3), eckart_young_floor(a, 3), 1e-12);
  }
}

TEST(Scw, GaussianSketchCapturesRankKRowSpace) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix a = testutil::with_singular_values(10, 7, {0.8, 0.6}, seed);
    const DenseMatrix s = testutil::gaussian(3, 10, seed + 50);
    EXPECT_LE(scw_loss(s, a, 2), 1e-10);
  }
}

TEST(Scw, NeverBelowEckartYoungFloor) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const DenseMatrix a = testutil::normalized(testutil::gaussian(10, 8, seed));
    const SparseSketch s = random_sparse_init(4, 10, 2, seed);
    const double loss = scw_loss(s, a, 3);
    EXPECT_GE(loss, eckart_young_floor(a, 3) - 1e-12);
    EXPECT_LE(loss, 1.0 + 1e-12);
  }
}

TEST(Scw, SparseAndDenseSketchAgree) {
  const DenseMatrix a = testutil::normalized(testutil::gaussian(9, 5, 4));
  const SparseSketch s = random_sparse_init(4, 9, 3, 4);
  EXPECT_LE(testutil::diff_norm(scw(s, a, 2), scw(densify(s), a, 2)), 1e-13);
}

TEST(Scw, OutputHasRankAtMostK) {
  const DenseMatrix a = testutil::normalized(testutil::gaussian(9, 7, 8));
  const DenseMatrix approx = scw(testutil::gaussian(5, 9, 9), a, 2);
  EXPECT_EQ(svd(approx).rank, 2u);
}

TEST(Scw, Contracts) {
  const DenseMatrix a = testutil::normalized(testutil::gaussian(6, 4, 1));
  EXPECT_THROW(scw(random_sparse_init(3, 6, 1, 0), a, 0), ParameterError);
  EXPECT_THROW(scw(random_sparse_init(3, 6, 1, 0), a, 4), ParameterError);
  EXPECT_THROW(scw_loss(random_sparse_init(3, 6, 1, 0), 2.0 * a, 1), ContractError);
}
