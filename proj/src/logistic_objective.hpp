#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "edulearn/numcore.hpp"

namespace edulearn::detail {

// Regularized mean cross-entropy over a flat parameter vector.
//   binary (K = 2):  theta = [w_0 .. w_{d-1}, b]
//   multinomial:     theta = [W row-major (K x d), b_0 .. b_{K-1}]
class LogisticObjective {
 public:
  // full_softmax keeps K score rows even for K = 2.
  LogisticObjective(const DenseMatrix& x, std::span<const int> y, std::size_t n_classes,
                    double l2, bool full_softmax = false);

  std::size_t dim() const noexcept { return rows_ * (d_ + 1); }
  std::size_t n_features() const noexcept { return d_; }
  std::size_t score_rows() const noexcept { return rows_; }

  // Loss at theta, gradient written to `grad`. Remembers theta and the
  // per-sample scores for decrease().
  double evaluate(std::span<const double> theta, std::span<double> grad);

  // f(theta + step) - f(theta) for the last evaluated theta, accumulated from
  // per-sample differences so that it stays accurate when the change is far
  // below the rounding level of f itself.
  double decrease(std::span<const double> step) const;

 private:
  const DenseMatrix& x_;
  std::span<const int> y_;
  std::size_t n_classes_;
  std::size_t rows_;  // 1 for binary, K otherwise
  std::size_t d_;
  double l2_;

  std::vector<double> theta_;
  std::vector<double> scores_;  // n x rows_ logits at theta_
  std::vector<double> probs_;   // n x rows_ (binary: sigmoid; multinomial: softmax)
};

double softplus(double z);
double log_sum_exp(std::span<const double> z);

}  // namespace edulearn::detail
