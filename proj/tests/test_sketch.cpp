#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "sketchlab/linalg.hpp"
#include "sketchlab/sketch.hpp"
#include "test_util.hpp"

using namespace sketchlab;

namespace {

// Smallest ‖X − D‖_F² over X with ≤ s non-zeros per column, by enumerating
// every support subset of every column.
double brute_force_projection_error(const DenseMatrix& dense, std::size_t s) {
  const std::size_t m = dense.rows();
  double total = 0.0;
  for (std::size_t j = 0; j < dense.cols(); ++j) {
    double best = INFINITY;
    for (std::uint32_t mask = 0; mask < (1U << m); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) > s) continue;
      double err = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        if (!((mask >> i) & 1U)) err += dense(i, j) * dense(i, j);
      best = std::min(best, err);
    }
    total += best;
  }
  return total;
}

}  // namespace

TEST(RandomSparseInit, ForcedSupport) {
  const SparseSketch s = random_sparse_init(2, 1, 2, 123);
  ASSERT_EQ(s.column(0).size(), 2u);
  for (const auto& e : s.column(0)) EXPECT_DOUBLE_EQ(std::abs(e.value), 1.0 / std::sqrt(2.0));
}

TEST(RandomSparseInit, DeterministicForSeed) {
  EXPECT_EQ(random_sparse_init(10, 50, 3, 9), random_sparse_init(10, 50, 3, 9));
  std::ostringstream a, b;
  write_sketch(a, random_sparse_init(10, 50, 3, 9));
  write_sketch(b, random_sparse_init(10, 50, 3, 9));
  EXPECT_EQ(a.str(), b.str());
}

TEST(RandomSparseInit, CountAndNorm) {
  const SparseSketch s = random_sparse_init(10, 100, 3, 1);
  EXPECT_EQ(s.nnz(), 300u);
  EXPECT_NEAR(frob_norm(densify(s)), 1.0, 1e-12);
  for (std::size_t j = 0; j < 100; ++j) EXPECT_EQ(s.column(j).size(), 3u);
}

TEST(RandomSparseInit, RejectsBudgetAboveRows) {
  EXPECT_THROW(random_sparse_init(3, 5, 4, 0), ParameterError);
}

TEST(RandomSparseInit, SupportLooksUniform) {
  // With s=1, m=10: each row should receive about a tenth of the columns,
  // and distinct seeds should give different supports.
  std::vector<std::size_t> counts(10, 0);
  std::size_t positive = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SparseSketch s = random_sparse_init(10, 500, 1, seed);
    for (std::size_t j = 0; j < 500; ++j) {
      ++counts[s.column(j)[0].row];
      positive += s.column(j)[0].value > 0.0;
    }
  }
  for (std::size_t c : counts) EXPECT_NEAR(static_cast<double>(c), 1000.0, 150.0);
  EXPECT_NEAR(static_cast<double>(positive), 5000.0, 300.0);
  EXPECT_NE(random_sparse_init(10, 100, 2, 1).support(), random_sparse_init(10, 100, 2, 2).support());
}

TEST(ProjectTopS, KeepsLargestMagnitude) {
  const DenseMatrix col{{3.0}, {-5.0}, {1.0}};
  const DenseMatrix expected{{0.0}, {-5.0}, {0.0}};
  EXPECT_EQ(densify(project_top_s(col, 1)), expected);
}

TEST(ProjectTopS, TieGoesToLowerRow) {
  const DenseMatrix col{{2.0}, {-2.0}};
  const DenseMatrix expected{{2.0}, {0.0}};
  EXPECT_EQ(densify(project_top_s(col, 1)), expected);
}

TEST(ProjectTopS, FullBudgetIsIdentity) {
  const DenseMatrix a = testutil::gaussian(4, 6, 3);
  EXPECT_EQ(densify(project_top_s(a, 4)), a);
}

TEST(ProjectTopS, OptimalAgainstBruteForce) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t m = 2 + seed % 4;
    const std::size_t s = 1 + seed % m;
    const DenseMatrix a = testutil::gaussian(m, 5, seed + 100);
    const SparseSketch p = project_top_s(a, s);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_LE(p.column(j).size(), s);
    EXPECT_NEAR(frob_norm_sq(a - densify(p)), brute_force_projection_error(a, s), 1e-12);
  }
}

TEST(Apply, IdentityAndZero) {
  const DenseMatrix a = testutil::gaussian(4, 3, 1);
  std::vector<std::vector<SketchEntry>> cols(4);
  for (std::size_t j = 0; j < 4; ++j) cols[j].push_back({j, 1.0});
  EXPECT_EQ(apply(SparseSketch(4, 4, 1, cols), a), a);
  EXPECT_EQ(apply(SparseSketch(2, 4, 1), a), DenseMatrix(2, 3));
}

TEST(Apply, MatchesDenseProductAndIsLinear) {
  const SparseSketch s = random_sparse_init(5, 8, 2, 4);
  const DenseMatrix a = testutil::gaussian(8, 6, 5);
  const DenseMatrix b = testutil::gaussian(8, 6, 6);
  EXPECT_LE(testutil::diff_norm(apply(s, a), testutil::naive_mul(densify(s), a)), 1e-12);
  EXPECT_LE(testutil::diff_norm(apply(s, a + b), apply(s, a) + apply(s, b)), 1e-12);
}

TEST(Apply, ShapeMismatch) {
  EXPECT_THROW(apply(random_sparse_init(3, 4, 1, 0), DenseMatrix(5, 2)), ParameterError);
}

TEST(SparsifyMask, RoundTripsAndCrossChecks) {
  const SparseSketch s = random_sparse_init(6, 9, 2, 12);
  EXPECT_EQ(sparsify_mask(densify(s), s.support(), 2), s);

  const Support empty(9);
  EXPECT_EQ(densify(sparsify_mask(densify(s), empty, 2)), DenseMatrix(6, 9));

  const DenseMatrix a = testutil::gaussian(6, 9, 13);
  const SparseSketch top = project_top_s(a, 3);
  EXPECT_EQ(sparsify_mask(a, top.support(), 3), top);
}

TEST(SparsifyMask, RejectsOverBudgetMask) {
  Support mask(2);
  mask[0] = {0, 1, 2};
  EXPECT_THROW(sparsify_mask(DenseMatrix(4, 2), mask, 2), ParameterError);
}

TEST(SketchFormat, RoundTripsExactly) {
  const SparseSketch s = project_top_s(testutil::gaussian(7, 11, 2), 3);
  std::ostringstream out;
  write_sketch(out, s);
  std::istringstream in(out.str());
  EXPECT_EQ(read_sketch(in), s);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "7 11 3");
}

TEST(SketchFormat, RejectsMalformed) {
  std::istringstream bad_header("7 x 3\n");
  EXPECT_THROW(read_sketch(bad_header), ParameterError);
  std::istringstream bad_entry("2 2 1\n0 5 1.0\n");
  EXPECT_THROW(read_sketch(bad_entry), ParameterError);
}
