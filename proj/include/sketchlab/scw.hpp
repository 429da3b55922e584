#pragma once

#include <cstddef>

#include "sketchlab/linalg.hpp"
#include "sketchlab/matrix.hpp"
#include "sketchlab/sketch.hpp"

namespace sketchlab {

/// ‖SA‖_F at or below this counts as the zero matrix.
inline constexpr double kZeroSketchTol = 1e-12;

/// Inputs to scw_loss must satisfy |‖A‖_F − 1| ≤ this.
inline constexpr double kNormalizationTol = 1e-6;

/// Sketch-then-SVD rank-k approximation: V from the compact SVD of SA, then
/// [AV]_k Vᵀ. Returns the n×d zero matrix when SA vanishes.
DenseMatrix scw(const SparseSketch& sketch, const DenseMatrix& a, std::size_t k);
DenseMatrix scw(const DenseMatrix& sketch, const DenseMatrix& a, std::size_t k);

/// Same, given SA already formed.
DenseMatrix scw_from_sketched(const DenseMatrix& a, const DenseMatrix& sa, std::size_t k);

/// ‖A − SCW_k(S, A)‖_F² for unit-norm A.
double scw_loss(const SparseSketch& sketch, const DenseMatrix& a, std::size_t k);
double scw_loss(const DenseMatrix& sketch, const DenseMatrix& a, std::size_t k);

void require_unit_norm(const DenseMatrix& a, const char* who);

}  // namespace sketchlab
