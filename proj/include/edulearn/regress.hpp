#pragma once

#include <cstddef>
#include <vector>

#include "edulearn/numcore.hpp"

namespace edulearn {

/// y ≈ intercept + Σ coefficients[j]·x_j.
struct LinearModel {
  double intercept = 0.0;
  DenseVector coefficients;
  /// Only iterative fits (lasso) can report false.
  bool converged = true;
  std::size_t iterations = 0;
};

struct FitStat {
  double lsr = 0.0;  ///< sum of squared residuals
  double r_squared = 0.0;
};

DenseVector predict(const LinearModel& m, const DenseMatrix& x);

/// Single-predictor least squares from centered sums:
/// slope = Σ(y-ȳ)(x-x̄) / Σ(x-x̄)², intercept = ȳ - slope·x̄.
LinearModel fit_simple(const DenseVector& x, const DenseVector& y);

/// Ordinary least squares with intercept, via the normal equations of the
/// design [X | 1]. Exact collinearity raises SingularityError.
LinearModel fit_multiple(const DenseMatrix& x, const DenseVector& y);

/// Columns x, x², ..., x^degree.
DenseMatrix polynomial_features(const DenseVector& x, std::size_t degree);

double lsr_objective(const LinearModel& m, const DenseMatrix& x, const DenseVector& y);

/// 1 - SSE/SST. Constant y raises DegenerateTargetError.
double r_squared(const LinearModel& m, const DenseMatrix& x, const DenseVector& y);

FitStat fit_stat(const LinearModel& m, const DenseMatrix& x, const DenseVector& y);

/// Squared cross-covariance over the product of auto-covariances,
/// S_xy² / (S_xx·S_yy). Equals r_squared of the simple fit.
double squared_correlation(const DenseVector& x, const DenseVector& y);

/// Solves (XcᵀXc + λI)β = Xcᵀyc on centered data; the intercept is not
/// penalized. Expects standardized X.
LinearModel fit_ridge(const DenseMatrix& x, const DenseVector& y, double lambda);

/// Value of (1/(2n))‖y - β₀ - Xβ‖² + λ‖β‖₁.
double lasso_objective(const LinearModel& m, const DenseMatrix& x, const DenseVector& y,
                       double lambda);

/// Cyclic coordinate descent on the lasso objective with an unpenalized
/// intercept. Stops when the largest coefficient change in a sweep is below
/// `tol`; hitting `max_sweeps` first returns the iterate with converged=false.
/// When `objective_trace` is given, the objective after every sweep is appended.
LinearModel fit_lasso(const DenseMatrix& x, const DenseVector& y, double lambda,
                      double tol = 1e-8, std::size_t max_sweeps = 10000,
                      std::vector<double>* objective_trace = nullptr);

}  // namespace edulearn
