#include "edulearn/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <deque>
#include <string>

#include "edulearn/errors.hpp"
#include "edulearn/random.hpp"
#include "logistic_objective.hpp"

namespace edulearn {

using detail::LogisticObjective;

std::string_view to_string(Solver solver) {
  switch (solver) {
    case Solver::gd: return "gd";
    case Solver::sgd: return "sgd";
    case Solver::lbfgs: return "lbfgs";
  }
  return "lbfgs";
}

Solver solver_from_string(std::string_view text) {
  if (text == "gd") return Solver::gd;
  if (text == "sgd") return Solver::sgd;
  if (text == "lbfgs") return Solver::lbfgs;
  throw ParameterError("unknown solver '" + std::string(text) + "' (expected gd, sgd or lbfgs)");
}

void OptimizerConfig::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw ParameterError("tol must be > 0");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ParameterError("l2 must be >= 0");
  if (!(l1 >= 0.0) || !std::isfinite(l1)) throw ParameterError("l1 must be >= 0");
  if (l1 > 0.0 && solver != Solver::sgd) {
    throw ParameterError("l1 regularization is only supported by the sgd solver");
  }
  if (solver == Solver::sgd && (!(learning_rate > 0.0) || !std::isfinite(learning_rate))) {
    throw ParameterError("learning_rate must be > 0");
  }
  if (solver == Solver::lbfgs && lbfgs_memory == 0) {
    throw ParameterError("lbfgs_memory must be >= 1");
  }
}

LogisticModel LogisticModel::zeros(std::size_t n_features, std::vector<std::string> class_names) {
  if (class_names.size() < 2) throw ParameterError("a classifier needs at least two classes");
  LogisticModel m;
  m.n_classes = class_names.size();
  const std::size_t rows = m.binary() ? 1 : m.n_classes;
  m.weights = DenseMatrix(rows, n_features);
  m.intercepts = DenseVector(rows);
  m.class_names = std::move(class_names);
  return m;
}

// Clamped to the open interval: past |z| ~ 37 the exact value rounds to 1,
// and past -745 exp underflows to 0.
double sigmoid(double z) {
  constexpr double kBelowOne = 1.0 - 0x1.0p-53;
  constexpr double kAboveZero = std::numeric_limits<double>::denorm_min();
  if (z >= 0.0) return std::min(1.0 / (1.0 + std::exp(-z)), kBelowOne);
  const double e = std::exp(z);
  return std::max(e / (1.0 + e), kAboveZero);
}

LossGrad binary_loss_grad(std::span<const double> w, double intercept, const DenseMatrix& x,
                          std::span<const int> y, double l2) {
  if (w.size() != x.cols()) throw DimensionError("binary_loss_grad: weight length mismatch");
  LogisticObjective objective(x, y, 2, l2);
  std::vector<double> theta(w.begin(), w.end());
  theta.push_back(intercept);
  LossGrad out;
  out.grad = DenseVector(objective.dim());
  out.loss = objective.evaluate(theta, out.grad.span());
  return out;
}

LossGrad softmax_loss_grad(const DenseMatrix& w, const DenseVector& b, const DenseMatrix& x,
                           std::span<const int> y, double l2) {
  if (w.cols() != x.cols() || b.size() != w.rows() || w.rows() < 2) {
    throw DimensionError("softmax_loss_grad: parameter shapes do not match the data");
  }
  // Always the K-row parameterization, including K = 2.
  const std::size_t k = w.rows();
  std::vector<double> theta(w.values());
  theta.insert(theta.end(), b.begin(), b.end());

  LogisticObjective objective(x, y, k, l2, /*full_softmax=*/true);
  LossGrad out;
  out.grad = DenseVector(objective.dim());
  out.loss = objective.evaluate(theta, out.grad.span());
  return out;
}

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 50;

LogisticModel unpack(const std::vector<double>& theta, std::size_t d,
                     std::vector<std::string> class_names) {
  LogisticModel m = LogisticModel::zeros(d, std::move(class_names));
  const std::size_t rows = m.weights.rows();
  std::copy_n(theta.begin(), rows * d, m.weights.span().begin());
  for (std::size_t k = 0; k < rows; ++k) m.intercepts[k] = theta[rows * d + k];
  return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Backtracking search along `direction`: tries t, t/2, ... (kMaxHalvings
// halvings) until the accurate decrease satisfies Armijo. Returns the accepted
// step and its decrease, or t = 0 on failure.
struct LineSearchResult {
  double t = 0.0;
  double decrease = 0.0;
};

LineSearchResult backtrack(const LogisticObjective& objective, std::span<const double> direction,
                           double slope, double t0) {
  std::vector<double> step(direction.size());
  double t = t0;
  for (int h = 0; h <= kMaxHalvings; ++h) {
    for (std::size_t i = 0; i < step.size(); ++i) step[i] = t * direction[i];
    const double delta = objective.decrease(step);
    if (std::isfinite(delta) && delta <= kArmijo * t * slope) return {t, delta};
    t *= 0.5;
  }
  return {};
}

void check_labels(std::span<const int> y, const std::vector<std::string>& class_names) {
  if (class_names.size() < 2) throw ParameterError("a classifier needs at least two classes");
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= class_names.size()) {
      throw LabelError("class index " + std::to_string(label) + " outside [0, " +
                       std::to_string(class_names.size()) + ")");
    }
  }
}

}  // namespace

LogisticModel fit_gd(const DenseMatrix& x, std::span<const int> y,
                     std::vector<std::string> class_names, const OptimizerConfig& cfg,
                     TrainingTrace* trace) {
  cfg.validate();
  check_labels(y, class_names);
  LogisticObjective objective(x, y, class_names.size(), cfg.l2);
  const std::size_t dim = objective.dim();
  std::vector<double> theta(dim, 0.0);
  std::vector<double> grad(dim);
  std::vector<double> direction(dim);

  double loss = objective.evaluate(theta, grad);
  if (trace) trace->losses.assign(1, loss);

  bool converged = false;
  std::size_t iterations = 0;
  double t0 = 1.0;
  while (true) {
    if (norm_inf(grad) < cfg.tol) {
      converged = true;
      break;
    }
    if (iterations >= cfg.max_iter) break;
    for (std::size_t i = 0; i < dim; ++i) direction[i] = -grad[i];
    const double slope = -dot(grad, grad);
    const auto ls = backtrack(objective, direction, slope, t0);
    if (ls.t == 0.0) {
      throw StalledDescentError(theta, iterations,
                                "gradient descent line search found no decrease after " +
                                    std::to_string(kMaxHalvings) + " halvings");
    }
    axpy(ls.t, direction, theta);
    // The tracked loss moves by the accurately computed decrease, which is
    // never positive for an accepted step.
    loss += ls.decrease;
    objective.evaluate(theta, grad);
    if (trace) trace->losses.push_back(loss);
    ++iterations;
    t0 = 2.0 * ls.t;
  }

  LogisticModel m = unpack(theta, x.cols(), std::move(class_names));
  m.converged = converged;
  m.iterations_used = iterations;
  return m;
}

LogisticModel fit_lbfgs(const DenseMatrix& x, std::span<const int> y,
                        std::vector<std::string> class_names, const OptimizerConfig& cfg,
                        TrainingTrace* trace) {
  cfg.validate();
  if (cfg.l1 > 0.0) throw ParameterError("fit_lbfgs does not support l1");
  check_labels(y, class_names);
  LogisticObjective objective(x, y, class_names.size(), cfg.l2);
  const std::size_t dim = objective.dim();
  std::vector<double> theta(dim, 0.0);
  std::vector<double> grad(dim);
  std::vector<double> next_grad(dim);
  std::vector<double> direction(dim);

  struct Pair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;
  };
  std::deque<Pair> memory;
  std::vector<double> alpha(cfg.lbfgs_memory);

  double loss = objective.evaluate(theta, grad);
  if (trace) trace->losses.assign(1, loss);

  bool converged = false;
  std::size_t iterations = 0;
  while (true) {
    if (norm_inf(grad) < cfg.tol) {
      converged = true;
      break;
    }
    if (iterations >= cfg.max_iter) break;

    // Two-loop recursion: direction = -H·grad.
    for (std::size_t i = 0; i < dim; ++i) direction[i] = -grad[i];
    for (std::size_t m = memory.size(); m-- > 0;) {
      alpha[m] = memory[m].rho * dot(memory[m].s, direction);
      axpy(-alpha[m], memory[m].y, direction);
    }
    if (!memory.empty()) {
      const Pair& last = memory.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (auto& v : direction) v *= gamma;
    }
    for (std::size_t m = 0; m < memory.size(); ++m) {
      const double beta = memory[m].rho * dot(memory[m].y, direction);
      axpy(alpha[m] - beta, memory[m].s, direction);
    }

    double slope = dot(grad, direction);
    if (!(slope < 0.0)) {
      memory.clear();
      for (std::size_t i = 0; i < dim; ++i) direction[i] = -grad[i];
      slope = -dot(grad, grad);
    }
    auto ls = backtrack(objective, direction, slope, 1.0);
    if (ls.t == 0.0 && !memory.empty()) {
      // Retry once along the steepest-descent direction with fresh memory.
      memory.clear();
      for (std::size_t i = 0; i < dim; ++i) direction[i] = -grad[i];
      slope = -dot(grad, grad);
      ls = backtrack(objective, direction, slope, 1.0);
    }
    if (ls.t == 0.0) {
      throw StalledDescentError(theta, iterations,
                                "L-BFGS line search found no decrease after " +
                                    std::to_string(kMaxHalvings) + " halvings");
    }

    Pair pair;
    pair.s.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) pair.s[i] = ls.t * direction[i];
    axpy(1.0, pair.s, theta);
    loss += ls.decrease;
    objective.evaluate(theta, next_grad);
    if (trace) trace->losses.push_back(loss);
    ++iterations;

    pair.y.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) pair.y[i] = next_grad[i] - grad[i];
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-12) {
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (memory.size() > cfg.lbfgs_memory) memory.pop_front();
    }
    grad.swap(next_grad);
  }

  LogisticModel m = unpack(theta, x.cols(), std::move(class_names));
  m.converged = converged;
  m.iterations_used = iterations;
  return m;
}

LogisticModel fit_sgd(const DenseMatrix& x, std::span<const int> y,
                      std::vector<std::string> class_names, const OptimizerConfig& cfg,
                      TrainingTrace* trace) {
  cfg.validate();
  check_labels(y, class_names);
  if (x.rows() != y.size()) throw DimensionError("fit_sgd: label count mismatch");
  if (x.rows() == 0) throw DimensionError("fit_sgd: no training rows");

  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const std::size_t k_rows = class_names.size() == 2 ? 1 : class_names.size();
  const std::size_t wsize = k_rows * d;
  std::vector<double> theta(wsize + k_rows, 0.0);
  std::vector<double> z(k_rows);
  std::vector<double> residual(k_rows);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(cfg.seed);
  const double lr = cfg.learning_rate;
  const double shrink = lr * cfg.l1;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t i : order) {
      const auto xi = x.row(i);
      for (std::size_t k = 0; k < k_rows; ++k) {
        z[k] = dot(std::span<const double>(theta).subspan(k * d, d), xi) + theta[wsize + k];
      }
      double loss_i;
      if (k_rows == 1) {
        const double target = y[i] == 1 ? 1.0 : 0.0;
        loss_i = detail::softplus(z[0]) - target * z[0];
        residual[0] = sigmoid(z[0]) - target;
      } else {
        const double lse = detail::log_sum_exp(z);
        loss_i = lse - z[static_cast<std::size_t>(y[i])];
        for (std::size_t k = 0; k < k_rows; ++k) {
          residual[k] = std::exp(z[k] - lse) - (static_cast<int>(k) == y[i] ? 1.0 : 0.0);
        }
      }
      if (!std::isfinite(loss_i)) {
        throw DivergenceError(epoch, lr, "sgd diverged in epoch " + std::to_string(epoch) +
                                             " with learning rate " + std::to_string(lr));
      }
      epoch_loss += loss_i;
      for (std::size_t k = 0; k < k_rows; ++k) {
        double* wk = theta.data() + k * d;
        const double r = residual[k];
        for (std::size_t j = 0; j < d; ++j) wk[j] -= lr * (r * xi[j] + cfg.l2 * wk[j]);
        theta[wsize + k] -= lr * r;
      }
      if (shrink > 0.0) {
        for (std::size_t j = 0; j < wsize; ++j) {
          const double w = theta[j];
          theta[j] = w > shrink ? w - shrink : (w < -shrink ? w + shrink : 0.0);
        }
      }
    }
    if (!std::isfinite(epoch_loss) || !all_finite(theta)) {
      throw DivergenceError(epoch, lr, "sgd diverged in epoch " + std::to_string(epoch) +
                                           " with learning rate " + std::to_string(lr));
    }
    if (trace) trace->losses.push_back(epoch_loss / static_cast<double>(n));
  }

  bool converged = false;
  if (cfg.epochs > 0) {
    LogisticObjective objective(x, y, class_names.size(), cfg.l2);
    std::vector<double> grad(objective.dim());
    objective.evaluate(theta, grad);
    converged = norm_inf(grad) < cfg.tol;
  }
  LogisticModel m = unpack(theta, d, std::move(class_names));
  m.converged = converged;
  m.iterations_used = cfg.epochs;
  return m;
}

LogisticModel fit(const DenseMatrix& x, std::span<const int> y,
                  std::vector<std::string> class_names, const OptimizerConfig& cfg,
                  TrainingTrace* trace) {
  switch (cfg.solver) {
    case Solver::gd: return fit_gd(x, y, std::move(class_names), cfg, trace);
    case Solver::sgd: return fit_sgd(x, y, std::move(class_names), cfg, trace);
    case Solver::lbfgs: return fit_lbfgs(x, y, std::move(class_names), cfg, trace);
  }
  throw ParameterError("unknown solver");
}

DenseMatrix predict_proba(const LogisticModel& m, const DenseMatrix& x) {
  if (x.cols() != m.n_features()) {
    throw DimensionError("predict_proba: model expects " + std::to_string(m.n_features()) +
                         " features, input has " + std::to_string(x.cols()));
  }
  const std::size_t rows = m.weights.rows();
  DenseMatrix out(x.rows(), rows);
  std::vector<double> z(rows);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto xi = x.row(i);
    for (std::size_t k = 0; k < rows; ++k) z[k] = dot(m.weights.row(k), xi) + m.intercepts[k];
    if (m.binary()) {
      out(i, 0) = sigmoid(z[0]);
      continue;
    }
    const double lse = detail::log_sum_exp(z);
    for (std::size_t k = 0; k < rows; ++k) out(i, k) = std::exp(z[k] - lse);
  }
  return out;
}

std::size_t argmax(std::span<const double> v) {
  if (v.empty()) throw DimensionError("argmax of an empty row");
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[best]) best = k;
  return best;
}

std::vector<int> predict(const LogisticModel& m, const DenseMatrix& x) {
  const DenseMatrix proba = predict_proba(m, x);
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out[i] = m.binary() ? (proba(i, 0) >= 0.5 ? 1 : 0) : static_cast<int>(argmax(proba.row(i)));
  }
  return out;
}

MetricsReport compute_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                              std::size_t n_classes) {
  if (y_true.size() != y_pred.size()) {
    throw DimensionError("compute_metrics: " + std::to_string(y_true.size()) + " labels but " +
                         std::to_string(y_pred.size()) + " predictions");
  }
  if (y_true.empty()) throw DimensionError("compute_metrics: no rows");
  if (n_classes < 1) throw ParameterError("compute_metrics: n_classes must be >= 1");

  MetricsReport r;
  r.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const auto t = static_cast<std::size_t>(y_true[i]);
    const auto p = static_cast<std::size_t>(y_pred[i]);
    if (y_true[i] < 0 || y_pred[i] < 0 || t >= n_classes || p >= n_classes) {
      throw LabelError("compute_metrics: class index outside [0, " + std::to_string(n_classes) + ")");
    }
    ++r.confusion[t][p];
  }

  std::size_t correct = 0;
  r.per_class.resize(n_classes);
  for (std::size_t k = 0; k < n_classes; ++k) {
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t j = 0; j < n_classes; ++j) {
      predicted += r.confusion[j][k];
      actual += r.confusion[k][j];
    }
    const double tp = static_cast<double>(r.confusion[k][k]);
    correct += r.confusion[k][k];
    auto& s = r.per_class[k];
    s.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
    s.recall = actual ? tp / static_cast<double>(actual) : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                                        : 0.0;
    r.macro.precision += s.precision;
    r.macro.recall += s.recall;
    r.macro.f1 += s.f1;
  }
  const double k = static_cast<double>(n_classes);
  r.macro.precision /= k;
  r.macro.recall /= k;
  r.macro.f1 /= k;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());
  return r;
}

}  // namespace edulearn
