#pragma once

#include <cstddef>
#include <vector>

#include "sketchlab/matrix.hpp"

namespace sketchlab {

/// Singular values at or below this are treated as zero.
inline constexpr double kDefaultRankTol = 1e-8;

/// Compact SVD: `input ≈ u · diag(sigma) · vᵀ` with only the `rank` retained
/// singular triplets. Each column of `u` has its largest-magnitude entry
/// positive (first such entry on ties), which fixes the sign ambiguity.
struct SvdResult {
  DenseMatrix u;              // rows × rank
  std::vector<double> sigma;  // descending, each > rank_tol
  DenseMatrix v;              // cols × rank
  std::size_t rank = 0;

  DenseMatrix reconstruct() const;
};

struct JacobiOptions {
  int max_sweeps = 100;
  double rotation_tol = 1e-12;
};

/// One-sided (Hestenes) Jacobi SVD. Throws NumericError if the sweep cap is
/// hit before every column pair is orthogonal to `rotation_tol`.
SvdResult svd(const DenseMatrix& a, double rank_tol = kDefaultRankTol,
              const JacobiOptions& options = {});

/// Optimal rank-k approximation [A]_k. Returns the full reconstruction when
/// k ≥ rank(A).
DenseMatrix best_rank_k(const DenseMatrix& a, std::size_t k, double rank_tol = kDefaultRankTol);

/// Sum of squared singular values beyond the k-th, i.e. ‖A − [A]_k‖_F².
double eckart_young_floor(const DenseMatrix& a, std::size_t k, double rank_tol = kDefaultRankTol);

double frob_norm_sq(const DenseMatrix& a);
double frob_norm(const DenseMatrix& a);

/// ‖a − b‖_F / max(‖b‖_F, tiny). `b` is the reference.
double relative_frob_error(const DenseMatrix& a, const DenseMatrix& b);

/// Eigen-decomposition of a symmetric matrix by cyclic two-sided Jacobi.
struct SymEigResult {
  std::vector<double> values;  // descending
  DenseMatrix vectors;         // columns are eigenvectors
};

SymEigResult sym_eig(const DenseMatrix& a, const JacobiOptions& options = {});

/// Largest absolute asymmetry max |a_ij − a_ji|.
double asymmetry(const DenseMatrix& a);

}  // namespace sketchlab
