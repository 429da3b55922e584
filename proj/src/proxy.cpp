#include "sketchlab/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "sketchlab/linalg.hpp"
#include "sketchlab/pinv.hpp"
#include "sketchlab/scw.hpp"

namespace sketchlab {

std::size_t default_q(double epsilon, double d) {
  if (!(epsilon > 0.0 && epsilon <= 1.0) || !(d > 0.0)) {
    throw ParameterError("default_q: need 0 < epsilon <= 1 and d > 0");
  }
  const double raw = std::ceil(std::log(d / epsilon) / epsilon);
  return raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n − k + i) / i stays integral at every step.
    const std::uint64_t factor = n - k + i;
    if (result > std::numeric_limits<std::uint64_t>::max() / factor) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = result * factor / i;
  }
  return result;
}

std::vector<std::vector<std::size_t>> k_subsets(std::size_t d, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > d) return out;
  std::vector<std::size_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == d - k + (i - 1)) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

namespace {

struct Candidate {
  double selection = std::numeric_limits<double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();
  DenseMatrix projected;  // ZZ†B
};

bool better(double value, std::size_t index, const Candidate& best) {
  return value < best.selection || (value == best.selection && index < best.index);
}

// ZZ†B with Z† taken as the transpose of (Zᵀ)†; the Decell formula then
// works on the k×k Gram matrix ZᵀZ instead of the n×n one.
DenseMatrix project_onto(const DenseMatrix& z, const DenseMatrix& b) {
  const DenseMatrix z_pinv = transpose(pinv_decell(transpose(z)));
  return matmul(z, matmul(z_pinv, b));
}

}  // namespace

ProxyResult proxy_loss(const SparseSketch& sketch, const DenseMatrix& a, std::size_t k,
                       const ProxyParams& params) {
  require_unit_norm(a, "proxy_loss");
  const std::size_t d = a.cols();
  if (k < 1 || k > d) throw ParameterError("proxy_loss: need 1 <= k <= d");
  if (params.q < 1) throw ParameterError("proxy_loss: q must be at least 1");
  const std::uint64_t count = binomial(d, k);
  if (count > params.enum_cap) {
    throw FeasibilityError("proxy_loss: C(" + std::to_string(d) + "," + std::to_string(k) +
                           ") = " + std::to_string(count) + " exceeds enum_cap " +
                           std::to_string(params.enum_cap));
  }

  const DenseMatrix sa = apply(sketch, a);
  const DenseMatrix b = matmul(a, matmul(pinv_decell(sa), sa));
  const std::vector<std::vector<std::size_t>> subsets = k_subsets(d, k);

  auto evaluate_range = [&](std::size_t begin, std::size_t end) {
    Candidate best;
    for (std::size_t i = begin; i < end; ++i) {
      DenseMatrix z(b.rows(), k);
      for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < k; ++c) z(r, c) = b(r, subsets[i][c]);
      for (std::size_t step = 0; step < params.q; ++step) z = matmul(b, matmul_tn(b, z));
      DenseMatrix projected = project_onto(z, b);
      const double selection = frob_norm_sq(b - projected);
      if (better(selection, i, best)) best = {selection, i, std::move(projected)};
    }
    return best;
  };

  const std::size_t workers = std::clamp<std::size_t>(params.workers, 1, subsets.size());
  std::vector<Candidate> partial(workers);
  if (workers == 1) {
    partial[0] = evaluate_range(0, subsets.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (subsets.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(subsets.size(), w * chunk);
      const std::size_t end = std::min(subsets.size(), begin + chunk);
      pool.emplace_back([&, w, begin, end] { partial[w] = evaluate_range(begin, end); });
    }
  }

  Candidate best;
  for (auto& c : partial)
    if (c.index != std::numeric_limits<std::size_t>::max() && better(c.selection, c.index, best))
      best = std::move(c);

  ProxyResult out;
  out.loss = frob_norm_sq(a - best.projected);
  out.selection_loss = best.selection;
  out.subset_index = best.index;
  out.subset = subsets[best.index];
  return out;
}

}  // namespace sketchlab
