#include <gtest/gtest.h>

#include "sketchlab/linalg.hpp"
#include "sketchlab/pinv.hpp"
#include "sketchlab/proxy.hpp"
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

}  // namespace

TEST(DefaultQ, Examples) {
  EXPECT_EQ(default_q(1.0, std::exp(1.0)), 1u);
  EXPECT_EQ(default_q(0.25, 8.0), 14u);
  EXPECT_EQ(default_q(1.0, 1.0), 1u);
  EXPECT_THROW(default_q(0.0, 8.0), ParameterError);
  EXPECT_THROW(default_q(1.5, 8.0), ParameterError);
}

TEST(Binomial, SmallAndSaturating) {
  EXPECT_EQ(binomial(8, 2), 28u);
  EXPECT_EQ(binomial(50, 5), 2118760u);
  EXPECT_EQ(binomial(3, 5), 0u);
  EXPECT_EQ(binomial(200, 100), std::numeric_limits<std::uint64_t>::max());
}

TEST(KSubsets, LexicographicOrder) {
  const auto subsets = k_subsets(4, 2);
  const std::vector<std::vector<std::size_t>> expected{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  EXPECT_EQ(subsets, expected);
  EXPECT_EQ(k_subsets(6, 3).size(), binomial(6, 3));
}

TEST(Proxy, ZeroSketchedMatrix) {
  DenseMatrix a(4, 3);
  a(0, 1) = 1.0;
  std::vector<std::vector<SketchEntry>> cols(4);
  cols[2].push_back({0, 1.0});
  const ProxyResult r = proxy_loss(SparseSketch(2, 4, 1, cols), a, 1, {});
  EXPECT_EQ(r.loss, 1.0);
  EXPECT_EQ(r.subset_index, 0u);
}

TEST(Proxy, RankKWithIdentitySketchIsExact) {
  const DenseMatrix a = testutil::with_singular_values(6, 5, {0.8, 0.6}, 3);
  ProxyParams p;
  p.q = default_q(0.25, 5.0);
  EXPECT_LE(proxy_loss(sparse_identity(6), a, 2, p).loss, 1e-8);
}

TEST(Proxy, UpperBoundsScwLoss) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseMatrix a = testutil::normalized(testutil::gaussian(12, 8, seed));
    const SparseSketch s = random_sparse_init(4, 12, 2, seed);
    ProxyParams p;
    p.q = default_q(p.epsilon, 8.0);
    EXPECT_GE(proxy_loss(s, a, 2, p).loss, scw_loss(s, a, 2) - 1e-8);
  }
}

TEST(Proxy, WorkerCountDoesNotChangeResult) {
  const DenseMatrix a = testutil::normalized(testutil::gaussian(12, 8, 5));
  const SparseSketch s = random_sparse_init(4, 12, 2, 5);
  ProxyParams p;
  p.q = 3;
  const ProxyResult one = proxy_loss(s, a, 2, p);
  for (std::size_t w : {2, 3, 7, 64}) {
    p.workers = w;
    const ProxyResult many = proxy_loss(s, a, 2, p);
    EXPECT_EQ(many.loss, one.loss);
    EXPECT_EQ(many.subset, one.subset);
    EXPECT_EQ(many.subset_index, one.subset_index);
  }
}

TEST(Proxy, SelectionIsArgMinOverSubsets) {
  // Re-run the selection by hand with q=1 and check the winner.
  const DenseMatrix a = testutil::normalized(testutil::gaussian(6, 4, 2));
  const SparseSketch s = random_sparse_init(3, 6, 2, 2);
  ProxyParams p;
  p.q = 1;
  const ProxyResult r = proxy_loss(s, a, 2, p);
  const DenseMatrix sa = apply(s, a);
  const DenseMatrix b = testutil::naive_mul(a, testutil::naive_mul(pinv_svd_oracle(sa), sa));
  const DenseMatrix bbt = testutil::naive_mul(b, testutil::naive_t(b));
  double best = INFINITY;
  std::vector<std::size_t> best_subset;
  for (const auto& subset : k_subsets(4, 2)) {
    DenseMatrix z0(6, 2);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t c = 0; c < 2; ++c) z0(i, c) = b(i, subset[c]);
    const DenseMatrix z = testutil::naive_mul(bbt, z0);
    const DenseMatrix proj = testutil::naive_mul(z, testutil::naive_mul(pinv_svd_oracle(z), b));
    const double sel = testutil::norm_sq(b - proj);
    if (sel < best - 1e-12) {
      best = sel;
      best_subset = subset;
    }
  }
  EXPECT_NEAR(r.selection_loss, best, 1e-9);
  EXPECT_EQ(r.subset, best_subset);
}

TEST(Proxy, EnumerationCap) {
  const DenseMatrix a = testutil::normalized(testutil::gaussian(6, 8, 1));
  ProxyParams p;
  p.enum_cap = 10;
  EXPECT_THROW(proxy_loss(random_sparse_init(3, 6, 1, 0), a, 2, p), FeasibilityError);
}
