#include "edulearn/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "edulearn/errors.hpp"

namespace edulearn {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  if (!all_finite(v)) {
    throw ParameterError(std::string(what) + " contains a non-finite entry");
  }
}

}  // namespace

DenseVector::DenseVector(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_, "vector");
}

DenseVector::DenseVector(std::initializer_list<double> values) : values_(values) {
  require_finite(values_, "vector");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw DimensionError("matrix storage has " + std::to_string(values_.size()) +
                         " entries, expected " + std::to_string(rows_ * cols_));
  }
  require_finite(values_, "matrix");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  values_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix literal");
    values_.insert(values_.end(), r.begin(), r.end());
  }
  require_finite(values_, "matrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseVector DenseMatrix::column(std::size_t c) const {
  DenseVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> indices) const {
  DenseMatrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) throw DimensionError("row index out of range");
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(indices[i] * cols_), cols_,
                out.values_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

DenseVector matvec(const DenseMatrix& a, const DenseVector& x) {
  if (a.cols() != x.size()) {
    throw DimensionError("matvec: matrix has " + std::to_string(a.cols()) +
                         " columns, vector has " + std::to_string(x.size()) + " entries");
  }
  DenseVector y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) y[r] = dot(a.row(r), x.span());
  return y;
}

DenseVector matvec_transposed(const DenseMatrix& a, const DenseVector& x) {
  if (a.rows() != x.size()) {
    throw DimensionError("matvec_transposed: matrix has " + std::to_string(a.rows()) +
                         " rows, vector has " + std::to_string(x.size()) + " entries");
  }
  DenseVector y(a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    const double xr = x[r];
    for (std::size_t c = 0; c < a.cols(); ++c) y[c] += row[c] * xr;
  }
  return y;
}

DenseMatrix gram(const DenseMatrix& a) {
  const std::size_t p = a.cols();
  DenseMatrix g(p, p);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      const double ri = row[i];
      if (ri == 0.0) continue;
      for (std::size_t j = i; j < p; ++j) g(i, j) += ri * row[j];
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

DenseVector solve_spd(const DenseMatrix& a, const DenseVector& b) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("solve_spd: matrix is not square");
  if (b.size() != n) throw DimensionError("solve_spd: right-hand side length mismatch");

  // Lower Cholesky factor, stored densely. A pivot counts as non-positive
  // when it has lost all but rounding-level mass relative to the diagonal.
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    const double floor = static_cast<double>(n) * kEps * std::abs(a(j, j));
    if (!(pivot > floor)) {
      throw SingularityError(j, "matrix is not positive definite: pivot " + std::to_string(j) +
                                    " is non-positive (" + std::to_string(pivot) + ")");
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }

  auto substitute = [&](std::span<const double> rhs) {
    std::vector<double> z(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < i; ++k) z[i] -= l(i, k) * z[k];
      z[i] /= l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t k = i + 1; k < n; ++k) z[i] -= l(k, i) * z[k];
      z[i] /= l(i, i);
    }
    return z;
  };

  std::vector<double> x = substitute(b.span());
  // One refinement step on the residual.
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) {
    long double s = b[i];
    for (std::size_t k = 0; k < n; ++k) s -= static_cast<long double>(a(i, k)) * x[k];
    residual[i] = static_cast<double>(s);
  }
  const std::vector<double> correction = substitute(residual);
  for (std::size_t i = 0; i < n; ++i) x[i] += correction[i];
  return DenseVector(std::move(x));
}

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace edulearn
