#include "sketchlab/sketch.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sketchlab/rng.hpp"

namespace sketchlab {

SparseSketch::SparseSketch(std::size_t m, std::size_t n, std::size_t s)
    : m_(m), n_(n), s_(s), columns_(n) {
  validate();
}

SparseSketch::SparseSketch(std::size_t m, std::size_t n, std::size_t s,
                           std::vector<std::vector<SketchEntry>> columns)
    : m_(m), n_(n), s_(s), columns_(std::move(columns)) {
  for (auto& col : columns_)
    std::sort(col.begin(), col.end(),
              [](const SketchEntry& a, const SketchEntry& b) { return a.row < b.row; });
  validate();
}

void SparseSketch::validate() const {
  if (m_ == 0 || n_ == 0) throw ParameterError("sketch: dimensions must be positive");
  if (s_ == 0 || s_ > m_) {
    throw ParameterError("sketch: sparsity budget s=" + std::to_string(s_) +
                         " must satisfy 1 <= s <= m=" + std::to_string(m_));
  }
  if (columns_.size() != n_) throw ParameterError("sketch: column count mismatch");
  for (std::size_t j = 0; j < n_; ++j) {
    const auto& col = columns_[j];
    if (col.size() > s_) {
      throw ParameterError("sketch: column " + std::to_string(j) + " has " +
                           std::to_string(col.size()) + " entries, budget " + std::to_string(s_));
    }
    for (std::size_t e = 0; e < col.size(); ++e) {
      if (col[e].row >= m_) throw ParameterError("sketch: row index out of range");
      if (e > 0 && col[e].row == col[e - 1].row) throw ParameterError("sketch: duplicate row index");
      if (!std::isfinite(col[e].value)) throw ParameterError("sketch: non-finite value");
    }
  }
}

std::size_t SparseSketch::nnz() const {
  std::size_t total = 0;
  for (const auto& col : columns_) total += col.size();
  return total;
}

Support SparseSketch::support() const {
  Support out(n_);
  for (std::size_t j = 0; j < n_; ++j)
    for (const auto& e : columns_[j]) out[j].push_back(e.row);
  return out;
}

SparseSketch random_sparse_init(std::size_t m, std::size_t n, std::size_t s, std::uint64_t seed) {
  if (s == 0 || s > m) {
    throw ParameterError("random_sparse_init: need 1 <= s <= m, got s=" + std::to_string(s) +
                         " m=" + std::to_string(m));
  }
  CounterRng rng(seed);
  const double value = 1.0 / std::sqrt(static_cast<double>(n) * static_cast<double>(s));
  std::vector<std::size_t> rows(m);
  std::vector<std::vector<SketchEntry>> columns(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    // Partial Fisher–Yates: the first s slots become a uniform s-subset.
    for (std::size_t i = 0; i < s; ++i) {
      const std::size_t pick = i + static_cast<std::size_t>(rng.below(m - i));
      std::swap(rows[i], rows[pick]);
    }
    auto& col = columns[j];
    for (std::size_t i = 0; i < s; ++i) col.push_back({rows[i], rng.coin() ? value : -value});
  }
  return SparseSketch(m, n, s, std::move(columns));
}

SparseSketch project_top_s(const DenseMatrix& dense, std::size_t s) {
  const std::size_t m = dense.rows();
  if (s == 0 || s > m) throw ParameterError("project_top_s: need 1 <= s <= m");
  std::vector<std::size_t> order(m);
  std::vector<std::vector<SketchEntry>> columns(dense.cols());
  for (std::size_t j = 0; j < dense.cols(); ++j) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double va = std::abs(dense(a, j));
                        const double vb = std::abs(dense(b, j));
                        return va > vb || (va == vb && a < b);
                      });
    auto& col = columns[j];
    col.reserve(s);
    for (std::size_t i = 0; i < s; ++i) col.push_back({order[i], dense(order[i], j)});
  }
  return SparseSketch(m, dense.cols(), s, std::move(columns));
}

DenseMatrix apply(const SparseSketch& sketch, const DenseMatrix& a) {
  if (sketch.cols() != a.rows()) {
    throw ParameterError("apply: sketch has " + std::to_string(sketch.cols()) +
                         " columns but input is " + a.shape_string());
  }
  DenseMatrix out(sketch.rows(), a.cols());
  for (std::size_t j = 0; j < sketch.cols(); ++j) {
    auto a_row = a.row(j);
    for (const auto& e : sketch.column(j)) {
      auto out_row = out.row(e.row);
      for (std::size_t c = 0; c < a.cols(); ++c) out_row[c] += e.value * a_row[c];
    }
  }
  return out;
}

DenseMatrix densify(const SparseSketch& sketch) {
  DenseMatrix out(sketch.rows(), sketch.cols());
  for (std::size_t j = 0; j < sketch.cols(); ++j)
    for (const auto& e : sketch.column(j)) out(e.row, j) = e.value;
  return out;
}

SparseSketch sparsify_mask(const DenseMatrix& dense, const Support& mask, std::size_t s) {
  if (mask.size() != dense.cols()) {
    throw ParameterError("sparsify_mask: mask has " + std::to_string(mask.size()) +
                         " columns, matrix is " + dense.shape_string());
  }
  std::vector<std::vector<SketchEntry>> columns(dense.cols());
  for (std::size_t j = 0; j < dense.cols(); ++j) {
    if (mask[j].size() > s) {
      throw ParameterError("sparsify_mask: column " + std::to_string(j) +
                           " mask exceeds budget " + std::to_string(s));
    }
    for (std::size_t row : mask[j]) {
      if (row >= dense.rows()) throw ParameterError("sparsify_mask: row index out of range");
      columns[j].push_back({row, dense(row, j)});
    }
  }
  return SparseSketch(dense.rows(), dense.cols(), s, std::move(columns));
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void write_sketch(std::ostream& out, const SparseSketch& sketch) {
  out << sketch.rows() << ' ' << sketch.cols() << ' ' << sketch.budget() << '\n';
  for (std::size_t j = 0; j < sketch.cols(); ++j)
    for (const auto& e : sketch.column(j)) out << j << ' ' << e.row << ' ' << format_double(e.value) << '\n';
}

SparseSketch read_sketch(std::istream& in) {
  std::size_t m = 0, n = 0, s = 0;
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("read_sketch: missing header");
  {
    std::istringstream header(line);
    if (!(header >> m >> n >> s)) throw ParameterError("read_sketch: malformed header '" + line + "'");
  }
  if (n == 0) throw ParameterError("read_sketch: zero column count");
  std::vector<std::vector<SketchEntry>> columns(n);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::size_t col = 0, row = 0;
    std::string value_text;
    if (!(fields >> col >> row >> value_text) || col >= n) {
      throw ParameterError("read_sketch: malformed entry on line " + std::to_string(line_no));
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc() || ptr != value_text.data() + value_text.size()) {
      throw ParameterError("read_sketch: bad value on line " + std::to_string(line_no));
    }
    columns[col].push_back({row, value});
  }
  return SparseSketch(m, n, s, std::move(columns));
}

}  // namespace sketchlab
