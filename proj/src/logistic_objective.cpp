#include "logistic_objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edulearn/classify.hpp"
#include "edulearn/errors.hpp"

namespace edulearn::detail {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double log_sum_exp(std::span<const double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

LogisticObjective::LogisticObjective(const DenseMatrix& x, std::span<const int> y,
                                     std::size_t n_classes, double l2, bool full_softmax)
    : x_(x),
      y_(y),
      n_classes_(n_classes),
      rows_(n_classes == 2 && !full_softmax ? 1 : n_classes),
      d_(x.cols()),
      l2_(l2) {
  if (n_classes < 2) throw ParameterError("need at least two classes");
  if (x.rows() != y.size()) {
    throw DimensionError("design matrix has " + std::to_string(x.rows()) + " rows but " +
                         std::to_string(y.size()) + " labels");
  }
  if (x.rows() == 0) throw DimensionError("no training rows");
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes) {
      throw LabelError("class index " + std::to_string(label) + " outside [0, " +
                       std::to_string(n_classes) + ")");
    }
  }
}

double LogisticObjective::evaluate(std::span<const double> theta, std::span<double> grad) {
  const std::size_t n = x_.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t wsize = rows_ * d_;
  theta_.assign(theta.begin(), theta.end());
  scores_.resize(n * rows_);
  probs_.resize(n * rows_);
  std::fill(grad.begin(), grad.end(), 0.0);

  double loss = 0.0;
  std::vector<double> residual(rows_);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x_.row(i);
    double* z = scores_.data() + i * rows_;
    double* p = probs_.data() + i * rows_;
    for (std::size_t k = 0; k < rows_; ++k) {
      z[k] = dot(theta.subspan(k * d_, d_), xi) + theta[wsize + k];
    }
    const int yi = y_[i];
    if (rows_ == 1) {
      p[0] = sigmoid(z[0]);
      loss += softplus(z[0]) - (yi == 1 ? z[0] : 0.0);
      residual[0] = p[0] - (yi == 1 ? 1.0 : 0.0);
    } else {
      const double lse = log_sum_exp({z, rows_});
      for (std::size_t k = 0; k < rows_; ++k) {
        p[k] = std::exp(z[k] - lse);
        residual[k] = p[k] - (static_cast<int>(k) == yi ? 1.0 : 0.0);
      }
      loss += lse - z[yi];
    }
    for (std::size_t k = 0; k < rows_; ++k) {
      const double r = residual[k];
      double* gk = grad.data() + k * d_;
      for (std::size_t j = 0; j < d_; ++j) gk[j] += r * xi[j];
      grad[wsize + k] += r;
    }
  }
  loss *= inv_n;
  for (auto& g : grad) g *= inv_n;

  double sq = 0.0;
  for (std::size_t j = 0; j < wsize; ++j) {
    sq += theta[j] * theta[j];
    grad[j] += l2_ * theta[j];
  }
  return loss + 0.5 * l2_ * sq;
}

double LogisticObjective::decrease(std::span<const double> step) const {
  const std::size_t n = x_.rows();
  const std::size_t wsize = rows_ * d_;
  double total = 0.0;
  std::vector<double> dz(rows_);
  std::vector<double> shifted(rows_);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x_.row(i);
    const double* z = scores_.data() + i * rows_;
    const double* p = probs_.data() + i * rows_;
    double max_abs = 0.0;
    for (std::size_t k = 0; k < rows_; ++k) {
      dz[k] = dot(step.subspan(k * d_, d_), xi) + step[wsize + k];
      max_abs = std::max(max_abs, std::abs(dz[k]));
    }
    const int yi = y_[i];
    if (rows_ == 1) {
      // softplus(z + dz) - softplus(z) = log1p(σ(z)·expm1(dz))
      const double dsoft = max_abs <= 1.0 ? std::log1p(p[0] * std::expm1(dz[0]))
                                          : softplus(z[0] + dz[0]) - softplus(z[0]);
      total += dsoft - (yi == 1 ? dz[0] : 0.0);
    } else {
      double dlse;
      if (max_abs <= 1.0) {
        double s = 0.0;
        for (std::size_t k = 0; k < rows_; ++k) s += p[k] * std::expm1(dz[k]);
        dlse = std::log1p(s);
      } else {
        for (std::size_t k = 0; k < rows_; ++k) shifted[k] = z[k] + dz[k];
        dlse = log_sum_exp(shifted) - log_sum_exp({z, rows_});
      }
      total += dlse - dz[static_cast<std::size_t>(yi)];
    }
  }
  total /= static_cast<double>(n);
  double reg = 0.0;
  for (std::size_t j = 0; j < wsize; ++j) reg += step[j] * (2.0 * theta_[j] + step[j]);
  return total + 0.5 * l2_ * reg;
}

}  // namespace edulearn::detail
