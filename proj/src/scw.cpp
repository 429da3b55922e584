#include "sketchlab/scw.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sketchlab {

namespace {

void check_rank_arg(std::size_t m, const DenseMatrix& a, std::size_t k) {
  if (k < 1 || k > std::min(m, a.cols())) {
    throw ParameterError("scw: need 1 <= k <= min(m, d); got k=" + std::to_string(k) +
                         " m=" + std::to_string(m) + " d=" + std::to_string(a.cols()));
  }
}

}  // namespace

void require_unit_norm(const DenseMatrix& a, const char* who) {
  const double norm = frob_norm(a);
  if (std::abs(norm - 1.0) > kNormalizationTol) {
    throw ContractError(std::string(who) + ": input must have unit Frobenius norm, got " +
                        std::to_string(norm));
  }
}

DenseMatrix scw_from_sketched(const DenseMatrix& a, const DenseMatrix& sa, std::size_t k) {
  if (sa.cols() != a.cols()) {
    throw ParameterError("scw: sketched matrix " + sa.shape_string() + " incompatible with " +
                         a.shape_string());
  }
  check_rank_arg(sa.rows(), a, k);
  if (frob_norm(sa) <= kZeroSketchTol) return DenseMatrix(a.rows(), a.cols());
  const SvdResult f = svd(sa);
  const DenseMatrix av = matmul(a, f.v);
  return matmul_nt(best_rank_k(av, k), f.v);
}

DenseMatrix scw(const SparseSketch& sketch, const DenseMatrix& a, std::size_t k) {
  return scw_from_sketched(a, apply(sketch, a), k);
}

DenseMatrix scw(const DenseMatrix& sketch, const DenseMatrix& a, std::size_t k) {
  return scw_from_sketched(a, matmul(sketch, a), k);
}

double scw_loss(const SparseSketch& sketch, const DenseMatrix& a, std::size_t k) {
  require_unit_norm(a, "scw_loss");
  return frob_norm_sq(a - scw(sketch, a, k));
}

double scw_loss(const DenseMatrix& sketch, const DenseMatrix& a, std::size_t k) {
  require_unit_norm(a, "scw_loss");
  return frob_norm_sq(a - scw(sketch, a, k));
}

}  // namespace sketchlab
