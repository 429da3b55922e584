#include "sketchlab/pinv.hpp"

#include <algorithm>
#include <cmath>

namespace sketchlab {

CharPoly char_poly_coeffs(const DenseMatrix& m) {
  return {faddeev_leverrier(m).coeffs};
}

DenseMatrix pinv_decell(const DenseMatrix& z, double coeff_tol) {
  if (!(coeff_tol > 0.0)) throw ParameterError("pinv_decell: coeff_tol must be positive");
  const double scale = frob_norm(z);
  if (scale == 0.0) return DenseMatrix(z.cols(), z.rows());
  const DenseMatrix unit = (1.0 / scale) * z;
  DenseMatrix p = decell_pinv(unit, [coeff_tol](double c) { return std::abs(c) > coeff_tol; });
  return (1.0 / scale) * p;
}

DenseMatrix pinv_greedy_projector(const DenseMatrix& z, double det_tol) {
  if (!(det_tol > 0.0)) throw ParameterError("pinv_greedy_projector: det_tol must be positive");
  const double scale = frob_norm(z);
  if (scale == 0.0) return DenseMatrix(z.cols(), z.cols());
  const DenseMatrix unit = (1.0 / scale) * z;
  return greedy_pinv_projector(unit, [det_tol](double c) { return std::abs(c) > det_tol; });
}

DenseMatrix pinv_svd_oracle(const DenseMatrix& z, double rank_tol) {
  const SvdResult f = svd(z, rank_tol);
  DenseMatrix out(z.cols(), z.rows());
  for (std::size_t r = 0; r < f.rank; ++r) {
    const double inv = 1.0 / f.sigma[r];
    for (std::size_t i = 0; i < z.cols(); ++i) {
      const double vi = f.v(i, r) * inv;
      auto row = out.row(i);
      for (std::size_t j = 0; j < z.rows(); ++j) row[j] += vi * f.u(j, r);
    }
  }
  return out;
}

double penrose_residual(const DenseMatrix& z, const DenseMatrix& p) {
  auto rel = [](const DenseMatrix& got, const DenseMatrix& want) {
    const double ref = frob_norm(want);
    const double err = frob_norm(got - want);
    if (ref == 0.0) return err;
    return err / ref;
  };
  const DenseMatrix zp = matmul(z, p);
  const DenseMatrix pz = matmul(p, z);
  double worst = rel(matmul(zp, z), z);
  worst = std::max(worst, rel(matmul(pz, p), p));
  worst = std::max(worst, rel(transpose(zp), zp));
  worst = std::max(worst, rel(transpose(pz), pz));
  return worst;
}

}  // namespace sketchlab
