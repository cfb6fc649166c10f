#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edulearn/numcore.hpp"

namespace edulearn {

enum class Solver { gd, sgd, lbfgs };

std::string_view to_string(Solver solver);
Solver solver_from_string(std::string_view text);

struct OptimizerConfig {
  Solver solver = Solver::lbfgs;
  std::size_t max_iter = 1000;  ///< gd / lbfgs iteration cap
  std::size_t epochs = 100;     ///< sgd passes over the data
  double learning_rate = 0.01;  ///< sgd step size (gd uses a line search)
  double tol = 1e-6;            ///< stop when ‖grad‖∞ < tol
  double l2 = 0.0;
  double l1 = 0.0;  ///< sgd only
  std::size_t lbfgs_memory = 10;
  std::uint64_t seed = 0;

  /// Throws ParameterError on out-of-range values or l1 with a smooth solver.
  void validate() const;
};

/// Binary models keep one weight row scoring class 1; multinomial models keep
/// one row per class.
struct LogisticModel {
  std::size_t n_classes = 2;
  DenseMatrix weights;
  DenseVector intercepts;
  std::vector<std::string> class_names;
  bool converged = false;
  std::size_t iterations_used = 0;

  bool binary() const noexcept { return n_classes == 2; }
  std::size_t n_features() const noexcept { return weights.cols(); }

  static LogisticModel zeros(std::size_t n_features, std::vector<std::string> class_names);
};

/// e^z / (1 + e^z) without overflow for any finite z.
double sigmoid(double z);

struct LossGrad {
  double loss = 0.0;
  DenseVector grad;
};

/// Mean binary cross-entropy plus (l2/2)‖w‖². Gradient layout: the d weight
/// partials followed by the intercept partial.
LossGrad binary_loss_grad(std::span<const double> w, double intercept, const DenseMatrix& x,
                          std::span<const int> y, double l2);

/// Mean categorical cross-entropy plus (l2/2)‖W‖². Gradient layout: W
/// partials row-major (K×d), then the K intercept partials.
LossGrad softmax_loss_grad(const DenseMatrix& w, const DenseVector& b, const DenseMatrix& x,
                           std::span<const int> y, double l2);

/// Per-iteration record of a training run. `losses[0]` is the starting loss.
struct TrainingTrace {
  std::vector<double> losses;
};

LogisticModel fit_gd(const DenseMatrix& x, std::span<const int> y,
                     std::vector<std::string> class_names, const OptimizerConfig& cfg,
                     TrainingTrace* trace = nullptr);
LogisticModel fit_sgd(const DenseMatrix& x, std::span<const int> y,
                      std::vector<std::string> class_names, const OptimizerConfig& cfg,
                      TrainingTrace* trace = nullptr);
LogisticModel fit_lbfgs(const DenseMatrix& x, std::span<const int> y,
                        std::vector<std::string> class_names, const OptimizerConfig& cfg,
                        TrainingTrace* trace = nullptr);
/// Dispatches on cfg.solver.
LogisticModel fit(const DenseMatrix& x, std::span<const int> y,
                  std::vector<std::string> class_names, const OptimizerConfig& cfg,
                  TrainingTrace* trace = nullptr);

/// Binary: n×1 column of P(class 1). Multinomial: n×K row-stochastic matrix.
DenseMatrix predict_proba(const LogisticModel& m, const DenseMatrix& x);
/// Binary: 1 iff P(class 1) >= 0.5. Multinomial: argmax, lowest index wins ties.
std::vector<int> predict(const LogisticModel& m, const DenseMatrix& x);
/// Index of the first maximal entry.
std::size_t argmax(std::span<const double> v);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::vector<ClassScores> per_class;
  ClassScores macro;
  /// confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;
};

/// Zero denominators give 0 precision / recall / F1.
MetricsReport compute_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                              std::size_t n_classes);

}  // namespace edulearn
