#include "edulearn/regress.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edulearn/errors.hpp"

namespace edulearn {

namespace {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void check_rows(const DenseMatrix& x, const DenseVector& y, const char* op) {
  if (x.rows() != y.size()) {
    throw DimensionError(std::string(op) + ": " + std::to_string(x.rows()) + " rows but " +
                         std::to_string(y.size()) + " targets");
  }
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

// Column-major copy of X with column means removed.
struct Centered {
  std::vector<std::vector<double>> columns;
  std::vector<double> means;
  std::vector<double> y;
  double y_mean = 0.0;
};

Centered center(const DenseMatrix& x, const DenseVector& y) {
  Centered c;
  const std::size_t n = x.rows();
  c.columns.assign(x.cols(), std::vector<double>(n));
  c.means.assign(x.cols(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) c.columns[j][i] = x(i, j);
    c.means[j] = mean(c.columns[j]);
    for (auto& v : c.columns[j]) v -= c.means[j];
  }
  c.y_mean = mean(y.span());
  c.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.y[i] = y[i] - c.y_mean;
  return c;
}

double intercept_from_centered(const Centered& c, const DenseVector& beta) {
  double b0 = c.y_mean;
  for (std::size_t j = 0; j < c.means.size(); ++j) b0 -= c.means[j] * beta[j];
  return b0;
}

}  // namespace

DenseVector predict(const LinearModel& m, const DenseMatrix& x) {
  DenseVector yhat = matvec(x, m.coefficients);
  for (auto& v : yhat) v += m.intercept;
  return yhat;
}

LinearModel fit_simple(const DenseVector& x, const DenseVector& y) {
  if (x.size() != y.size()) throw DimensionError("fit_simple: x and y lengths differ");
  if (x.size() < 2) throw DimensionError("fit_simple: need at least 2 points");
  const double xbar = mean(x.span());
  const double ybar = mean(y.span());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (y[i] - ybar) * (x[i] - xbar);
    sxx += (x[i] - xbar) * (x[i] - xbar);
  }
  if (sxx < 1e-12) throw DegeneratePredictorError("fit_simple: predictor is constant");
  LinearModel m;
  const double slope = sxy / sxx;
  m.coefficients = DenseVector{slope};
  m.intercept = ybar - slope * xbar;
  return m;
}

LinearModel fit_multiple(const DenseMatrix& x, const DenseVector& y) {
  check_rows(x, y, "fit_multiple");
  const std::size_t p = x.cols();
  if (x.rows() < p + 1) {
    throw DimensionError("fit_multiple: " + std::to_string(x.rows()) + " rows cannot determine " +
                         std::to_string(p + 1) + " coefficients");
  }
  DenseMatrix augmented(x.rows(), p + 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::copy(x.row(i).begin(), x.row(i).end(), augmented.row(i).begin());
    augmented(i, p) = 1.0;
  }
  DenseVector beta;
  try {
    beta = solve_spd(gram(augmented), matvec_transposed(augmented, y));
  } catch (const SingularityError& e) {
    throw SingularityError(e.pivot(), std::string("fit_multiple: normal equations are singular "
                                                  "(collinear predictors); consider fit_ridge. ") +
                                          e.what());
  }
  LinearModel m;
  m.coefficients = DenseVector(std::vector<double>(beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(p)));
  m.intercept = beta[p];
  return m;
}

DenseMatrix polynomial_features(const DenseVector& x, std::size_t degree) {
  if (degree == 0) throw ParameterError("polynomial_features: degree must be at least 1");
  DenseMatrix out(x.size(), degree);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double power = 1.0;
    for (std::size_t k = 0; k < degree; ++k) {
      power *= x[i];
      out(i, k) = power;
    }
  }
  return out;
}

double lsr_objective(const LinearModel& m, const DenseMatrix& x, const DenseVector& y) {
  check_rows(x, y, "lsr_objective");
  const DenseVector yhat = predict(m, x);
  double sse = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sse += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return sse;
}

double r_squared(const LinearModel& m, const DenseMatrix& x, const DenseVector& y) {
  check_rows(x, y, "r_squared");
  const double ybar = mean(y.span());
  double sst = 0.0;
  for (double v : y) sst += (v - ybar) * (v - ybar);
  if (sst < 1e-12) throw DegenerateTargetError("r_squared: target is constant");
  return 1.0 - lsr_objective(m, x, y) / sst;
}

FitStat fit_stat(const LinearModel& m, const DenseMatrix& x, const DenseVector& y) {
  return {lsr_objective(m, x, y), r_squared(m, x, y)};
}

double squared_correlation(const DenseVector& x, const DenseVector& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DimensionError("squared_correlation: need two equal-length series of length >= 2");
  }
  const double xbar = mean(x.span());
  const double ybar = mean(y.span());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - xbar) * (y[i] - ybar);
    sxx += (x[i] - xbar) * (x[i] - xbar);
    syy += (y[i] - ybar) * (y[i] - ybar);
  }
  if (sxx < 1e-12) throw DegeneratePredictorError("squared_correlation: x is constant");
  if (syy < 1e-12) throw DegenerateTargetError("squared_correlation: y is constant");
  return (sxy * sxy) / (sxx * syy);
}

LinearModel fit_ridge(const DenseMatrix& x, const DenseVector& y, double lambda) {
  check_rows(x, y, "fit_ridge");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("fit_ridge: lambda must be >= 0");
  if (x.rows() == 0) throw DimensionError("fit_ridge: no rows");
  const Centered c = center(x, y);
  const std::size_t p = x.cols();
  DenseMatrix a(p, p);
  DenseVector rhs(p);
  for (std::size_t j = 0; j < p; ++j) {
    rhs[j] = dot(c.columns[j], c.y);
    for (std::size_t k = j; k < p; ++k) {
      const double v = dot(c.columns[j], c.columns[k]);
      a(j, k) = v;
      a(k, j) = v;
    }
    a(j, j) += lambda;
  }
  LinearModel m;
  m.coefficients = solve_spd(a, rhs);
  m.intercept = intercept_from_centered(c, m.coefficients);
  return m;
}

double lasso_objective(const LinearModel& m, const DenseMatrix& x, const DenseVector& y,
                       double lambda) {
  const double n = static_cast<double>(y.size());
  double l1 = 0.0;
  for (double b : m.coefficients) l1 += std::abs(b);
  return lsr_objective(m, x, y) / (2.0 * n) + lambda * l1;
}

LinearModel fit_lasso(const DenseMatrix& x, const DenseVector& y, double lambda, double tol,
                      std::size_t max_sweeps, std::vector<double>* objective_trace) {
  check_rows(x, y, "fit_lasso");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("fit_lasso: lambda must be >= 0");
  if (!(tol > 0.0)) throw ParameterError("fit_lasso: tol must be > 0");
  if (x.rows() == 0) throw DimensionError("fit_lasso: no rows");

  const Centered c = center(x, y);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> col_sq(p);
  for (std::size_t j = 0; j < p; ++j) col_sq[j] = dot(c.columns[j], c.columns[j]) * inv_n;

  std::vector<double> beta(p, 0.0);
  std::vector<double> residual = c.y;

  // The trace starts from the objective at beta = 0 and then adds each
  // coordinate's decrease, written as a sum of non-positive terms so rounding
  // cannot make it rise.
  double tracked = 0.0;
  if (objective_trace) {
    for (double r : residual) tracked += r * r;
    tracked *= 0.5 * inv_n;
  }

  LinearModel m;
  m.converged = false;
  std::size_t sweep = 0;
  while (sweep < max_sweeps) {
    ++sweep;
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (col_sq[j] <= 0.0) continue;
      const auto& col = c.columns[j];
      const double rho = dot(col, residual) * inv_n + col_sq[j] * beta[j];
      const double updated = soft_threshold(rho, lambda) / col_sq[j];
      const double delta = updated - beta[j];
      if (objective_trace && delta != 0.0) {
        const double old = beta[j];
        if (updated != 0.0) {
          const double sign = updated > 0.0 ? 1.0 : -1.0;
          tracked += -0.5 * col_sq[j] * delta * delta + lambda * (sign * old - std::abs(old));
        } else {
          tracked += -0.5 * col_sq[j] * old * old + (rho * old - lambda * std::abs(old));
        }
      }
      if (delta != 0.0) {
        for (std::size_t i = 0; i < n; ++i) residual[i] -= col[i] * delta;
        beta[j] = updated;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    if (objective_trace) objective_trace->push_back(tracked);
    if (max_change < tol) {
      m.converged = true;
      break;
    }
  }
  m.iterations = sweep;
  m.coefficients = DenseVector(std::move(beta));
  m.intercept = intercept_from_centered(c, m.coefficients);
  return m;
}

}  // namespace edulearn
