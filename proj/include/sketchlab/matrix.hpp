#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "sketchlab/errors.hpp"

namespace sketchlab {

/// Row-major dense matrix over an arithmetic-like scalar.
///
/// The scalar only needs `+ - * /` and construction from `double`, so the
/// same algorithms run over plain doubles and over traced scalars.
template <typename T>
class BasicMatrix {
 public:
  using value_type = T;

  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T(0.0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  BasicMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ParameterError("matrix data size " + std::to_string(data_.size()) +
                           " does not match " + shape_string());
    }
  }
  BasicMatrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ParameterError("ragged matrix initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = T(1.0);
    return out;
  }

  static BasicMatrix diagonal(std::span<const T> values) {
    BasicMatrix out(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
    return out;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  std::string shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

  friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using DenseMatrix = BasicMatrix<double>;

namespace detail {
inline void require_same_shape(std::size_t ar, std::size_t ac, std::size_t br, std::size_t bc,
                               const char* what) {
  if (ar != br || ac != bc) {
    throw ParameterError(std::string(what) + ": shape mismatch " + std::to_string(ar) + "x" +
                         std::to_string(ac) + " vs " + std::to_string(br) + "x" +
                         std::to_string(bc));
  }
}
}  // namespace detail

template <typename T>
BasicMatrix<T> transpose(const BasicMatrix<T>& a) {
  BasicMatrix<T> out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

/// Plain triple loop in i-k-j order; summation order over k is fixed, which
/// keeps results reproducible.
template <typename T>
BasicMatrix<T> matmul(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  if (a.cols() != b.rows()) {
    throw ParameterError("matmul: inner dimension mismatch " + a.shape_string() + " * " +
                         b.shape_string());
  }
  BasicMatrix<T> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] = out_row[j] + aik * b_row[j];
    }
  }
  return out;
}

/// aᵀ·b without materializing the transpose.
template <typename T>
BasicMatrix<T> matmul_tn(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  if (a.rows() != b.rows()) {
    throw ParameterError("matmul_tn: row mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
  BasicMatrix<T> out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto a_row = a.row(k);
    auto b_row = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const T aki = a_row[i];
      auto out_row = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] = out_row[j] + aki * b_row[j];
    }
  }
  return out;
}

/// a·bᵀ without materializing the transpose.
template <typename T>
BasicMatrix<T> matmul_nt(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  if (a.cols() != b.cols()) {
    throw ParameterError("matmul_nt: column mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
  BasicMatrix<T> out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto a_row = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto b_row = b.row(j);
      T acc(0.0);
      for (std::size_t k = 0; k < a.cols(); ++k) acc = acc + a_row[k] * b_row[k];
      out(i, j) = acc;
    }
  }
  return out;
}

template <typename T>
BasicMatrix<T> operator+(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  detail::require_same_shape(a.rows(), a.cols(), b.rows(), b.cols(), "add");
  BasicMatrix<T> out = a;
  auto o = out.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = o[i] + bv[i];
  return out;
}

template <typename T>
BasicMatrix<T> operator-(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  detail::require_same_shape(a.rows(), a.cols(), b.rows(), b.cols(), "sub");
  BasicMatrix<T> out = a;
  auto o = out.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = o[i] - bv[i];
  return out;
}

template <typename T>
BasicMatrix<T> operator*(const T& c, const BasicMatrix<T>& a) {
  BasicMatrix<T> out = a;
  for (auto& v : out.values()) v = c * v;
  return out;
}

/// Sum of diagonal entries, accumulated in index order.
template <typename T>
T trace(const BasicMatrix<T>& a) {
  T acc(0.0);
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) acc = acc + a(i, i);
  return acc;
}

// Helpers below are double-only.

inline DenseMatrix operator*(double c, const DenseMatrix& a) {
  DenseMatrix out = a;
  for (auto& v : out.values()) v *= c;
  return out;
}

inline bool all_finite(const DenseMatrix& a) {
  return std::all_of(a.values().begin(), a.values().end(),
                     [](double v) { return std::isfinite(v); });
}

inline double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

/// First `count` columns of `a`.
inline DenseMatrix leading_columns(const DenseMatrix& a, std::size_t count) {
  count = std::min(count, a.cols());
  DenseMatrix out(a.rows(), count);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = a(i, j);
  return out;
}

}  // namespace sketchlab
