#include "sketchlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sketchlab {

namespace {

using Column = std::vector<double>;

double dot(const Column& a, const Column& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Rotate columns (x, y) in place by the Jacobi angle that zeroes their
// inner product.
void rotate(Column& x, Column& y, double c, double s) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

struct ColumnSvd {
  std::vector<Column> left;   // unnormalized left columns (length = tall dim)
  std::vector<Column> right;  // accumulated rotations (length = column count)
};

// Orthogonalizes the columns of a tall matrix given column-wise.
ColumnSvd hestenes(std::vector<Column> cols, std::size_t rows, const JacobiOptions& opt) {
  const std::size_t p = cols.size();
  std::vector<Column> v(p, Column(p, 0.0));
  for (std::size_t i = 0; i < p; ++i) v[i][i] = 1.0;

  std::vector<double> norms(p);
  for (std::size_t i = 0; i < p; ++i) norms[i] = dot(cols[i], cols[i]);

  bool converged = p < 2;
  for (int sweep = 0; sweep < opt.max_sweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t i = 0; i + 1 < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        const double alpha = norms[i];
        const double beta = norms[j];
        if (alpha == 0.0 || beta == 0.0) continue;
        const double gamma = dot(cols[i], cols[j]);
        if (std::abs(gamma) <= opt.rotation_tol * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        rotate(cols[i], cols[j], c, s);
        rotate(v[i], v[j], c, s);
        norms[i] = dot(cols[i], cols[i]);
        norms[j] = dot(cols[j], cols[j]);
      }
    }
  }
  if (!converged) {
    throw NumericError("svd: one-sided Jacobi did not converge within " +
                       std::to_string(opt.max_sweeps) + " sweeps for a " +
                       std::to_string(rows) + "x" + std::to_string(p) + " matrix");
  }
  return {std::move(cols), std::move(v)};
}

}  // namespace

DenseMatrix SvdResult::reconstruct() const {
  DenseMatrix scaled = u;
  for (std::size_t i = 0; i < scaled.rows(); ++i)
    for (std::size_t j = 0; j < rank; ++j) scaled(i, j) *= sigma[j];
  if (rank == 0) return DenseMatrix(u.rows(), v.rows());
  return matmul_nt(scaled, v);
}

SvdResult svd(const DenseMatrix& a, double rank_tol, const JacobiOptions& options) {
  if (!(rank_tol > 0.0)) throw ParameterError("svd: rank_tol must be positive");
  if (!all_finite(a)) throw ParameterError("svd: non-finite entry in " + a.shape_string());

  const bool transposed = a.rows() < a.cols();
  const std::size_t tall = transposed ? a.cols() : a.rows();
  const std::size_t wide = transposed ? a.rows() : a.cols();

  std::vector<Column> cols(wide, Column(tall));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (transposed) cols[i][j] = a(i, j);
      else cols[j][i] = a(i, j);
    }

  ColumnSvd work;
  try {
    work = hestenes(std::move(cols), tall, options);
  } catch (const NumericError&) {
    throw NumericError("svd: one-sided Jacobi did not converge within " +
                       std::to_string(options.max_sweeps) + " sweeps for input " +
                       a.shape_string());
  }

  std::vector<double> sig(wide);
  for (std::size_t j = 0; j < wide; ++j) sig[j] = std::sqrt(dot(work.left[j], work.left[j]));

  std::vector<std::size_t> order(wide);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

  std::size_t rank = 0;
  while (rank < wide && sig[order[rank]] > rank_tol) ++rank;

  // "left" holds the singular vectors of the tall orientation.
  DenseMatrix tall_vecs(tall, rank);
  DenseMatrix wide_vecs(wide, rank);
  SvdResult out;
  out.rank = rank;
  out.sigma.resize(rank);
  for (std::size_t r = 0; r < rank; ++r) {
    const std::size_t j = order[r];
    out.sigma[r] = sig[j];
    for (std::size_t i = 0; i < tall; ++i) tall_vecs(i, r) = work.left[j][i] / sig[j];
    for (std::size_t i = 0; i < wide; ++i) wide_vecs(i, r) = work.right[j][i];
  }
  if (transposed) {
    out.u = std::move(wide_vecs);
    out.v = std::move(tall_vecs);
  } else {
    out.u = std::move(tall_vecs);
    out.v = std::move(wide_vecs);
  }

  for (std::size_t r = 0; r < rank; ++r) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.u.rows(); ++i)
      if (std::abs(out.u(i, r)) > std::abs(out.u(best, r))) best = i;
    if (out.u(best, r) < 0.0) {
      for (std::size_t i = 0; i < out.u.rows(); ++i) out.u(i, r) = -out.u(i, r);
      for (std::size_t i = 0; i < out.v.rows(); ++i) out.v(i, r) = -out.v(i, r);
    }
  }
  return out;
}

DenseMatrix best_rank_k(const DenseMatrix& a, std::size_t k, double rank_tol) {
  if (k < 1) throw ParameterError("best_rank_k: k must be at least 1");
  SvdResult f = svd(a, rank_tol);
  const std::size_t keep = std::min(k, f.rank);
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < keep; ++r) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double ui = f.u(i, r) * f.sigma[r];
      auto row = out.row(i);
      for (std::size_t j = 0; j < a.cols(); ++j) row[j] += ui * f.v(j, r);
    }
  }
  return out;
}

double eckart_young_floor(const DenseMatrix& a, std::size_t k, double rank_tol) {
  SvdResult f = svd(a, rank_tol);
  double tail = 0.0;
  for (std::size_t r = k; r < f.rank; ++r) tail += f.sigma[r] * f.sigma[r];
  return tail;
}

double frob_norm_sq(const DenseMatrix& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v * v;
  return acc;
}

double frob_norm(const DenseMatrix& a) { return std::sqrt(frob_norm_sq(a)); }

double relative_frob_error(const DenseMatrix& a, const DenseMatrix& b) {
  const double ref = frob_norm(b);
  return frob_norm(a - b) / std::max(ref, 1e-300);
}

SymEigResult sym_eig(const DenseMatrix& a, const JacobiOptions& options) {
  if (a.rows() != a.cols()) throw ParameterError("sym_eig: matrix must be square, got " + a.shape_string());
  const std::size_t n = a.rows();
  DenseMatrix w = a;
  DenseMatrix vecs = DenseMatrix::identity(n);
  const double scale = frob_norm(a);

  auto off_diag = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) acc += w(i, j) * w(i, j);
    return std::sqrt(acc);
  };

  int sweep = 0;
  for (; sweep < options.max_sweeps; ++sweep) {
    if (off_diag() <= 1e-15 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (apq == 0.0) continue;
        const double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double wkp = w(k, p);
          const double wkq = w(k, q);
          w(k, p) = c * wkp - s * wkq;
          w(k, q) = s * wkp + c * wkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double wpk = w(p, k);
          const double wqk = w(q, k);
          w(p, k) = c * wpk - s * wqk;
          w(q, k) = s * wpk + c * wqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vecs(k, p);
          const double vkq = vecs(k, q);
          vecs(k, p) = c * vkp - s * vkq;
          vecs(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == options.max_sweeps && off_diag() > 1e-15 * scale) {
    throw NumericError("sym_eig: cyclic Jacobi did not converge for input " + a.shape_string());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return w(x, x) > w(y, y); });
  SymEigResult out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    out.values[r] = w(order[r], order[r]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, r) = vecs(k, order[r]);
  }
  return out;
}

double asymmetry(const DenseMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

}  // namespace sketchlab
