#pragma once

#include <cstddef>
#include <vector>

#include "sketchlab/linalg.hpp"
#include "sketchlab/matrix.hpp"

namespace sketchlab {

/// Zero-test tolerance for characteristic-polynomial coefficients, applied
/// after the input has been scaled to unit Frobenius norm.
inline constexpr double kDefaultCoeffTol = 1e-10;

/// Coefficients c_1..c_m of det(λI − M) = λ^m + c_1 λ^{m−1} + … + c_m.
struct CharPoly {
  std::vector<double> coeffs;
};

/// Faddeev–LeVerrier recursion. Alongside the coefficients it keeps the
/// polynomial matrices
///   B_0 = I,  B_k = M^k + c_1 M^{k−1} + … + c_k I   (k = 1..m−1),
/// which are exactly the bracketed sums needed by the Cayley–Hamilton and
/// Decell inverse formulas.
template <typename T>
struct FaddeevChain {
  std::vector<T> coeffs;                  // c_1..c_m
  std::vector<BasicMatrix<T>> adjugates;  // B_0..B_{m−1}
};

template <typename T>
FaddeevChain<T> faddeev_leverrier(const BasicMatrix<T>& m) {
  if (m.rows() != m.cols()) {
    throw ParameterError("char_poly_coeffs: matrix must be square, got " + m.shape_string());
  }
  const std::size_t n = m.rows();
  FaddeevChain<T> chain;
  chain.coeffs.reserve(n);
  chain.adjugates.reserve(n);
  if (n == 0) return chain;
  chain.adjugates.push_back(BasicMatrix<T>::identity(n));
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = M · B_{k−1};  c_k = −tr(M_k) / k;  B_k = M_k + c_k I.
    BasicMatrix<T> mk = matmul(m, chain.adjugates.back());
    T ck = (T(0.0) - trace(mk)) / T(static_cast<double>(k));
    chain.coeffs.push_back(ck);
    if (k == n) break;
    for (std::size_t i = 0; i < n; ++i) mk(i, i) = mk(i, i) + ck;
    chain.adjugates.push_back(std::move(mk));
  }
  return chain;
}

/// Decell pseudo-inverse: with M = ZZᵀ and r the largest index whose
/// coefficient passes `is_nonzero`,
///   Z† = −(1/c_r) · Zᵀ · B_{r−1},
/// and Z† = 0 when no coefficient passes. The coefficient scan runs from c_m
/// down to c_1 and is the only branching in the computation.
template <typename T, typename NonZeroTest>
BasicMatrix<T> decell_pinv(const BasicMatrix<T>& z, NonZeroTest&& is_nonzero) {
  const BasicMatrix<T> gram = matmul_nt(z, z);
  FaddeevChain<T> chain = faddeev_leverrier(gram);
  for (std::size_t r = chain.coeffs.size(); r >= 1; --r) {
    if (is_nonzero(chain.coeffs[r - 1])) {
      const T factor = T(-1.0) / chain.coeffs[r - 1];
      return factor * matmul_tn(z, chain.adjugates[r - 1]);
    }
  }
  return BasicMatrix<T>(z.cols(), z.rows());
}

/// Greedy row-selection projector Z†Z = Yᵀ(YYᵀ)⁻¹Y. Rows are offered in index
/// order; a row is kept when det of the enlarged Gram matrix (sign-adjusted
/// last characteristic coefficient) passes `is_nonzero`. The inverse uses the
/// Cayley–Hamilton formula on the final Gram matrix.
template <typename T, typename NonZeroTest>
BasicMatrix<T> greedy_pinv_projector(const BasicMatrix<T>& z, NonZeroTest&& is_nonzero) {
  std::vector<std::size_t> selected;
  FaddeevChain<T> accepted;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    BasicMatrix<T> y(selected.size() + 1, z.cols());
    for (std::size_t r = 0; r < selected.size(); ++r)
      for (std::size_t j = 0; j < z.cols(); ++j) y(r, j) = z(selected[r], j);
    for (std::size_t j = 0; j < z.cols(); ++j) y(selected.size(), j) = z(i, j);
    FaddeevChain<T> chain = faddeev_leverrier(matmul_nt(y, y));
    if (is_nonzero(chain.coeffs.back())) {
      selected.push_back(i);
      accepted = std::move(chain);
    }
  }
  if (selected.empty()) return BasicMatrix<T>(z.cols(), z.cols());

  const std::size_t r = selected.size();
  BasicMatrix<T> y(r, z.cols());
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t j = 0; j < z.cols(); ++j) y(a, j) = z(selected[a], j);
  const T factor = T(-1.0) / accepted.coeffs[r - 1];
  const BasicMatrix<T> gram_inv = factor * accepted.adjugates[r - 1];
  return matmul_tn(y, matmul(gram_inv, y));
}

CharPoly char_poly_coeffs(const DenseMatrix& m);

/// Moore–Penrose inverse of Z via the Decell formula. Z is scaled to unit
/// Frobenius norm before the coefficient scan and the result rescaled, so
/// `coeff_tol` is an absolute tolerance on the normalized coefficients.
DenseMatrix pinv_decell(const DenseMatrix& z, double coeff_tol = kDefaultCoeffTol);

/// Z†Z via greedy row selection (normalized like pinv_decell).
DenseMatrix pinv_greedy_projector(const DenseMatrix& z, double det_tol = kDefaultCoeffTol);

/// Reference V Σ⁻¹ Uᵀ over the singular values retained by svd().
DenseMatrix pinv_svd_oracle(const DenseMatrix& z, double rank_tol = kDefaultRankTol);

/// Largest relative residual among the four Penrose identities for (z, p).
double penrose_residual(const DenseMatrix& z, const DenseMatrix& p);

}  // namespace sketchlab
