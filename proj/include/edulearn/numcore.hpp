#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace edulearn {

/// Dense column of doubles.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  explicit DenseVector(std::vector<double> values);
  DenseVector(std::initializer_list<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> span() noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  bool operator==(const DenseVector&) const = default;

 private:
  std::vector<double> values_;
};

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  /// Nested-list construction, mostly for tests: {{1, 2}, {3, 4}}.
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  const std::vector<double>& values() const noexcept { return values_; }
  std::span<double> span() noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }

  DenseVector column(std::size_t c) const;
  DenseMatrix transpose() const;
  /// Rows selected by index, in the given order.
  DenseMatrix select_rows(std::span<const std::size_t> indices) const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
inline double dot(const DenseVector& a, const DenseVector& b) { return dot(a.span(), b.span()); }

DenseVector matvec(const DenseMatrix& a, const DenseVector& x);
/// Aᵀx without forming the transpose.
DenseVector matvec_transposed(const DenseMatrix& a, const DenseVector& x);
/// AᵀA.
DenseMatrix gram(const DenseMatrix& a);

/// Solves Ax = b for symmetric positive definite A via Cholesky with one
/// step of iterative refinement. Throws SingularityError naming the first
/// pivot that is not safely positive.
DenseVector solve_spd(const DenseMatrix& a, const DenseVector& b);

double norm_inf(std::span<const double> v);
double norm2(std::span<const double> v);
bool all_finite(std::span<const double> v);

}  // namespace edulearn
