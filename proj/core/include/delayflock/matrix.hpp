#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "delayflock/errors.hpp"

namespace delayflock {

// Dense row-major matrix. Used both for N x d agent arrays (one row per agent)
// and for N x N weight / Laplacian matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw ContractError("Matrix::from_rows: ragged rows");
      std::size_t j = 0;
      for (double value : row) m(i, j++) = value;
      ++i;
    }
    return m;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool all_finite() const noexcept {
    for (double value : data_)
      if (!std::isfinite(value)) return false;
    return true;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double value : data_) m = std::fmax(m, std::fabs(value));
    return m;
  }

  double frobenius_norm() const noexcept {
    double s = 0.0;
    for (double value : data_) s += value * value;
    return std::sqrt(s);
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  // this += alpha * other
  Matrix& add_scaled(const Matrix& other, double alpha) {
    if (!same_shape(other)) throw ContractError("Matrix::add_scaled: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += alpha * other.data_[k];
    return *this;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ContractError("Matrix product: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

// Euclidean distance between row i of a and row j of b.
inline double row_distance(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
  double s = 0.0;
  const auto ra = a.row(i);
  const auto rb = b.row(j);
  for (std::size_t k = 0; k < ra.size(); ++k) {
    const double diff = ra[k] - rb[k];
    s += diff * diff;
  }
  return std::sqrt(s);
}

inline double row_norm(const Matrix& a, std::size_t i) {
  double s = 0.0;
  for (double value : a.row(i)) s += value * value;
  return std::sqrt(s);
}

}  // namespace delayflock
