#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sketchlab/matrix.hpp"

namespace sketchlab {

struct SketchEntry {
  std::size_t row;
  double value;

  friend bool operator==(const SketchEntry&, const SketchEntry&) = default;
};

/// Row indices allowed to be non-zero, one list per column.
using Support = std::vector<std::vector<std::size_t>>;

/// m×n sketching matrix stored column-wise with at most `s` entries per
/// column. Entries within a column are sorted by row index and unique.
class SparseSketch {
 public:
  SparseSketch(std::size_t m, std::size_t n, std::size_t s);
  SparseSketch(std::size_t m, std::size_t n, std::size_t s,
               std::vector<std::vector<SketchEntry>> columns);

  std::size_t rows() const noexcept { return m_; }
  std::size_t cols() const noexcept { return n_; }
  std::size_t budget() const noexcept { return s_; }

  const std::vector<SketchEntry>& column(std::size_t j) const { return columns_[j]; }
  std::size_t nnz() const;
  Support support() const;

  friend bool operator==(const SparseSketch&, const SparseSketch&) = default;

 private:
  void validate() const;

  std::size_t m_;
  std::size_t n_;
  std::size_t s_;
  std::vector<std::vector<SketchEntry>> columns_;
};

/// Exactly s entries per column at uniformly chosen distinct rows, signs ±1
/// with equal probability, then the whole matrix scaled to ‖S‖_F = 1.
SparseSketch random_sparse_init(std::size_t m, std::size_t n, std::size_t s, std::uint64_t seed);

/// Π_s: keep the s largest-magnitude entries of each column (ties go to the
/// lower row index). The kept positions are stored even when their value is
/// zero, so every column holds exactly min(s, m) entries.
SparseSketch project_top_s(const DenseMatrix& dense, std::size_t s);

/// S·A in O(nnz · d).
DenseMatrix apply(const SparseSketch& sketch, const DenseMatrix& a);

DenseMatrix densify(const SparseSketch& sketch);

/// Restrict `dense` to `mask`; positions outside the mask are dropped.
SparseSketch sparsify_mask(const DenseMatrix& dense, const Support& mask, std::size_t s);

/// Text format: header "m n s", then one "col row value" line per entry in
/// column-major order, values in shortest round-trip decimal.
void write_sketch(std::ostream& out, const SparseSketch& sketch);
SparseSketch read_sketch(std::istream& in);
std::string format_double(double v);

}  // namespace sketchlab
