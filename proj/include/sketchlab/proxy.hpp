#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sketchlab/matrix.hpp"
#include "sketchlab/sketch.hpp"

namespace sketchlab {

struct ProxyParams {
  double epsilon = 0.25;
  std::size_t q = 1;              // power-iteration count
  std::uint64_t enum_cap = 100000;  // largest admissible C(d, k)
  std::size_t workers = 1;
};

struct ProxyResult {
  double loss = 0.0;                 // ‖A − ZZ†B‖_F²
  double selection_loss = 0.0;       // ‖B − ZZ†B‖_F² of the chosen subset
  std::vector<std::size_t> subset;   // chosen basis columns, ascending
  std::size_t subset_index = 0;      // lexicographic rank of `subset`
};

/// ⌈(1/ε) ln(d/ε)⌉, at least 1.
std::size_t default_q(double epsilon, double d);

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// All k-subsets of {0..d−1} in lexicographic order.
std::vector<std::vector<std::size_t>> k_subsets(std::size_t d, std::size_t k);

/// Power-method proxy of the SCW loss:
///   B = A (SA)† (SA);  Z_i = (BBᵀ)^q B P_i over every k-subset P_i of the
///   standard basis;  Z = argmin_i ‖B − Z_i Z_i† B‖_F²;  return ‖A − ZZ†B‖_F².
/// Every pseudo-inverse uses the Decell formula. Subsets may be split across
/// `params.workers` threads; the arg-min (ties to the lexicographically first
/// subset) does not depend on the worker count.
ProxyResult proxy_loss(const SparseSketch& sketch, const DenseMatrix& a, std::size_t k,
                       const ProxyParams& params);

}  // namespace sketchlab
