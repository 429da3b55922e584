#pragma once

#include <optional>

#include "sketchlab/matrix.hpp"
#include "sketchlab/sketch.hpp"

namespace sketchlab {

/// Tolerance for the symmetry and eigenvalue-floor checks on PSD inputs.
inline constexpr double kPsdTol = 1e-8;

/// Throws ContractError unless `a` is symmetric and positive semidefinite
/// within kPsdTol (scaled by max(1, ‖A‖_F)).
void require_psd(const DenseMatrix& a);

/// Rank-r Nyström approximation AS (SᵀAS)† (AS)ᵀ for a column sketch
/// S ∈ ℝ^{n×r}. The pseudo-inverse uses the Decell formula. When `mask` is
/// given, entries of S outside it are zeroed first.
DenseMatrix nystrom_approx(const DenseMatrix& sketch, const DenseMatrix& a,
                           const std::optional<Support>& mask = std::nullopt);

/// ‖A − AS(SᵀAS)†(AS)ᵀ‖_F² for unit-norm PSD A.
double nystrom_loss(const DenseMatrix& sketch, const DenseMatrix& a,
                    const std::optional<Support>& mask = std::nullopt);

}  // namespace sketchlab
