#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace gsisio {

/// Dense real vector.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  static Vector constant(std::size_t n, double value) { return Vector(n, value); }

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  std::span<const double> span() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  /// Entries [offset, offset + count).
  Vector segment(std::size_t offset, std::size_t count) const;

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s);

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator-(Vector a);
Vector operator*(double s, Vector a);
Vector operator*(Vector a, double s);

double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
Vector concat(const Vector& a, const Vector& b);
Vector elementwise_max(const Vector& a, const Vector& b);
Vector elementwise_min(const Vector& a, const Vector& b);
bool all_finite(const Vector& a);

/// Dense real matrix in row-major storage.
///
/// Shapes are runtime values; every binary operation checks them and throws
/// DimensionError on mismatch. Zero-sized matrices (0 x k, k x 0) are allowed
/// and behave as the empty linear maps.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Row-wise literal, e.g. Matrix{{1, 2}, {3, 4}}. Rows must have equal length.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix diagonal(const Vector& d);
  /// Builds from row-major data; throws NumericError on non-finite entries.
  static Matrix from_row_major(std::size_t rows, std::size_t cols, std::vector<double> data);
  static Matrix column(const Vector& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }

  Matrix transpose() const;
  Matrix block(std::size_t row, std::size_t col, std::size_t nrows, std::size_t ncols) const;
  /// Columns [col, col + count).
  Matrix columns(std::size_t col, std::size_t count) const { return block(0, col, rows_, count); }
  /// Rows [row, row + count).
  Matrix row_range(std::size_t row, std::size_t count) const { return block(row, 0, count, cols_); }
  Vector row(std::size_t i) const;
  Vector col(std::size_t j) const;
  void set_block(std::size_t row, std::size_t col, const Matrix& m);

  double max_abs() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator-(Matrix a);
Matrix operator*(double s, Matrix a);
Matrix operator*(Matrix a, double s);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);

/// [a; b] (vertical stack).
Matrix vstack(const Matrix& a, const Matrix& b);
/// [a b] (horizontal stack).
Matrix hstack(const Matrix& a, const Matrix& b);
/// [[a, b], [c, d]].
Matrix block2x2(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d);

double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Vector& a, const Vector& b);

std::string to_string(const Matrix& m, int precision = 6);
std::string to_string(const Vector& v, int precision = 6);

}  // namespace gsisio
