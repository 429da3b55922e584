#include "sketchlab/nystrom.hpp"

#include <algorithm>
#include <string>

#include "sketchlab/linalg.hpp"
#include "sketchlab/pinv.hpp"
#include "sketchlab/scw.hpp"

namespace sketchlab {

namespace {

// `mask` lists, for each of the r sketch columns, the rows allowed non-zero.
DenseMatrix masked(const DenseMatrix& sketch, const Support& mask) {
  if (mask.size() != sketch.cols()) {
    throw ParameterError("nystrom: mask has " + std::to_string(mask.size()) +
                         " columns, sketch is " + sketch.shape_string());
  }
  DenseMatrix out(sketch.rows(), sketch.cols());
  for (std::size_t j = 0; j < mask.size(); ++j)
    for (std::size_t i : mask[j]) {
      if (i >= sketch.rows()) throw ParameterError("nystrom: mask row out of range");
      out(i, j) = sketch(i, j);
    }
  return out;
}

}  // namespace

void require_psd(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw ContractError("nystrom: input must be square, got " + a.shape_string());
  const double tol = kPsdTol * std::max(1.0, frob_norm(a));
  if (asymmetry(a) > tol) throw ContractError("nystrom: input is not symmetric");
  const SymEigResult eig = sym_eig(a);
  if (!eig.values.empty() && eig.values.back() < -tol) {
    throw ContractError("nystrom: input is indefinite (min eigenvalue " +
                        std::to_string(eig.values.back()) + ")");
  }
}

DenseMatrix nystrom_approx(const DenseMatrix& sketch, const DenseMatrix& a,
                           const std::optional<Support>& mask) {
  if (sketch.rows() != a.rows()) {
    throw ParameterError("nystrom: sketch " + sketch.shape_string() + " incompatible with " +
                         a.shape_string());
  }
  require_psd(a);
  const DenseMatrix s = mask ? masked(sketch, *mask) : sketch;
  const DenseMatrix as = matmul(a, s);
  const DenseMatrix core = matmul_tn(s, as);
  return matmul_nt(matmul(as, pinv_decell(core)), as);
}

double nystrom_loss(const DenseMatrix& sketch, const DenseMatrix& a,
                    const std::optional<Support>& mask) {
  require_unit_norm(a, "nystrom_loss");
  return frob_norm_sq(a - nystrom_approx(sketch, a, mask));
}

}  // namespace sketchlab
