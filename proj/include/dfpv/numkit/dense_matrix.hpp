#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace dfpv::numkit {

using Vector = std::vector<double>;

// Row-major dense matrix of doubles. Element (i, j) lives at data[i * cols + j].
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  // n x 1 column from a vector.
  static DenseMatrix column(std::span<const double> values);
  // 1 x n row from a vector.
  static DenseMatrix row_vector(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  DenseMatrix transpose() const;
  bool all_finite() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Products. `_tn` transposes the left operand, `_nt` the right one.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// a^T a, exactly symmetric.
DenseMatrix gram(const DenseMatrix& a);
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
Vector matvec(const DenseMatrix& a, std::span<const double> x);

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

// Elementwise (Hadamard) product.
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);
// Adds `value` to every diagonal entry of a square matrix.
DenseMatrix add_diagonal(const DenseMatrix& a, double value);

double frobenius_norm(const DenseMatrix& a);
double squared_norm(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double trace(const DenseMatrix& a);

// Rows selected by index, in the given order.
DenseMatrix take_rows(const DenseMatrix& a, std::span<const std::size_t> indices);
// Column mean, one entry per column.
Vector column_mean(const DenseMatrix& a);

}  // namespace dfpv::numkit
