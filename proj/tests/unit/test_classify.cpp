#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "edulearn/classify.hpp"
#include "edulearn/errors.hpp"
#include "test_util.hpp"

namespace edulearn {
namespace {

const std::vector<std::string> kBinary = {"neg", "pos"};
const std::vector<std::string> kThree = {"a", "b", "c"};

std::vector<double> flatten(const LogisticModel& m) {
  std::vector<double> out = m.weights.values();
  out.insert(out.end(), m.intercepts.begin(), m.intercepts.end());
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  return diff / std::max(scale, 1e-8);
}

TEST(Sigmoid, Examples) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(std::log(3.0)), 0.75, 1e-15);
  EXPECT_NEAR(sigmoid(100.0), 1.0, 1e-9);
  EXPECT_LT(sigmoid(100.0), 1.0);
  EXPECT_NEAR(sigmoid(-100.0), 0.0, 1e-9);
  EXPECT_GT(sigmoid(-100.0), 0.0);
  EXPECT_TRUE(std::isfinite(sigmoid(-800.0)));
  EXPECT_TRUE(std::isfinite(sigmoid(800.0)));
}

TEST(Sigmoid, ComplementSymmetry) {
  for (double z : {0.1, 1.0, 10.0, 50.0}) {
    EXPECT_NEAR(sigmoid(z) + sigmoid(-z), 1.0, 1e-15) << z;
  }
}

TEST(BinaryLoss, ZeroWeightsGiveLn2) {
  Rng rng(1);
  const auto x = testing::random_matrix(9, 3, rng);
  const auto y = testing::random_labels(9, 2, rng);
  const std::vector<double> w(3, 0.0);
  EXPECT_NEAR(binary_loss_grad(w, 0.0, x, y, 0.5).loss, std::log(2.0), 1e-15);
}

TEST(BinaryLoss, HandGradient) {
  const std::vector<double> w = {0.0};
  const std::vector<int> y = {1};
  const auto lg = binary_loss_grad(w, 0.0, DenseMatrix{{1}}, y, 0.0);
  ASSERT_EQ(lg.grad.size(), 2u);
  EXPECT_EQ(lg.grad[0], -0.5);
  EXPECT_EQ(lg.grad[1], -0.5);
}

TEST(BinaryLoss, GradientMatchesFiniteDifferences) {
  Rng rng(101);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(16), d = 1 + rng.below(6);
    const auto x = testing::random_matrix(n, d, rng);
    const auto y = testing::random_labels(n, 2, rng);
    const double l2 = rng.uniform(0.0, 1.0);
    auto theta = testing::random_vector(d + 1, rng).values();
    auto eval = [&](const std::vector<double>& t) {
      return binary_loss_grad(std::span<const double>(t).first(d), t[d], x, y, l2);
    };
    const auto analytic = eval(theta).grad.values();
    std::vector<double> numeric(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
      auto plus = theta, minus = theta;
      plus[i] += h;
      minus[i] -= h;
      numeric[i] = (eval(plus).loss - eval(minus).loss) / (2 * h);
    }
    EXPECT_LE(relative_error(analytic, numeric), 1e-5) << "trial " << trial;
  }
}

TEST(SoftmaxLoss, ZeroWeightsGiveLnK) {
  Rng rng(2);
  for (std::size_t k : {2u, 3u, 5u}) {
    const auto x = testing::random_matrix(7, 4, rng);
    const auto y = testing::random_labels(7, static_cast<int>(k), rng);
    const auto lg = softmax_loss_grad(DenseMatrix(k, 4), DenseVector(k), x, y, 0.3);
    EXPECT_NEAR(lg.loss, std::log(static_cast<double>(k)), 1e-15);
  }
}

TEST(SoftmaxLoss, GradientMatchesFiniteDifferences) {
  Rng rng(202);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(8), d = 1 + rng.below(4), k = 3;
    const auto x = testing::random_matrix(n, d, rng);
    const auto y = testing::random_labels(n, static_cast<int>(k), rng);
    const double l2 = rng.uniform(0.0, 1.0);
    auto theta = testing::random_vector(k * d + k, rng).values();
    auto eval = [&](const std::vector<double>& t) {
      DenseMatrix w(k, d, std::vector<double>(t.begin(), t.begin() + static_cast<long>(k * d)));
      DenseVector b(std::vector<double>(t.begin() + static_cast<long>(k * d), t.end()));
      return softmax_loss_grad(w, b, x, y, l2);
    };
    const auto analytic = eval(theta).grad.values();
    std::vector<double> numeric(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto plus = theta, minus = theta;
      plus[i] += h;
      minus[i] -= h;
      numeric[i] = (eval(plus).loss - eval(minus).loss) / (2 * h);
    }
    EXPECT_LE(relative_error(analytic, numeric), 1e-5) << "trial " << trial;
  }
}

TEST(SoftmaxLoss, InterceptIsNotPenalized) {
  const std::vector<int> y = {0, 1};
  const DenseMatrix x{{1}, {-1}};
  const auto a = softmax_loss_grad(DenseMatrix(3, 1), DenseVector{1, 2, 3}, x, y, 0.0);
  const auto b = softmax_loss_grad(DenseMatrix(3, 1), DenseVector{1, 2, 3}, x, y, 10.0);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.grad, b.grad);
}

OptimizerConfig config(Solver solver, double l2, double tol = 1e-8) {
  OptimizerConfig cfg;
  cfg.solver = solver;
  cfg.l2 = l2;
  cfg.tol = tol;
  cfg.max_iter = 100000;
  return cfg;
}

TEST(OptimizerConfig, Validation) {
  OptimizerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.l1 = 0.1;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg.solver = Solver::sgd;
  EXPECT_NO_THROW(cfg.validate());
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = OptimizerConfig{};
  cfg.tol = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = OptimizerConfig{};
  cfg.l2 = -1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  EXPECT_THROW(solver_from_string("newton"), ParameterError);
  EXPECT_EQ(solver_from_string("lbfgs"), Solver::lbfgs);
}

TEST(FitGd, SeparableOneDimensional) {
  const DenseMatrix x{{-1}, {1}};
  const std::vector<int> y = {0, 1};
  const auto m = fit_gd(x, y, kBinary, config(Solver::gd, 0.1));
  EXPECT_TRUE(m.converged);
  EXPECT_GT(m.weights(0, 0), 0.0);
  EXPECT_TRUE(std::isfinite(m.weights(0, 0)));
  const auto l = fit_lbfgs(x, y, kBinary, config(Solver::lbfgs, 0.1));
  EXPECT_NEAR(m.weights(0, 0), l.weights(0, 0), 1e-6);
}

TEST(FitGd, HugeToleranceStopsImmediately) {
  Rng rng(3);
  const auto x = testing::random_matrix(20, 3, rng);
  const auto y = testing::random_labels(20, 2, rng);
  TrainingTrace trace;
  const auto m = fit_gd(x, y, kBinary, config(Solver::gd, 0.0, 1e6), &trace);
  EXPECT_EQ(m.iterations_used, 0u);
  EXPECT_TRUE(m.converged);
  EXPECT_EQ(flatten(m), std::vector<double>(4, 0.0));
  ASSERT_EQ(trace.losses.size(), 1u);
  EXPECT_NEAR(trace.losses[0], std::log(2.0), 1e-15);
}

TEST(Trainers, LossTracesNeverIncrease) {
  Rng rng(4);
  for (Solver s : {Solver::gd, Solver::lbfgs}) {
    for (int trial = 0; trial < 5; ++trial) {
      const std::size_t k = trial % 2 == 0 ? 2 : 3;
      const auto x = testing::random_matrix(60, 4, rng, 2.0);
      const auto y = testing::random_labels(60, static_cast<int>(k), rng);
      TrainingTrace trace;
      const auto names = k == 2 ? kBinary : kThree;
      fit(x, y, names, config(s, 0.01, 1e-10), &trace);
      ASSERT_GE(trace.losses.size(), 2u);
      for (std::size_t i = 1; i < trace.losses.size(); ++i) {
        EXPECT_LE(trace.losses[i], trace.losses[i - 1]) << to_string(s) << " step " << i;
      }
    }
  }
}

TEST(Trainers, GdAndLbfgsAgree) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 10 + rng.below(40), d = 1 + rng.below(5);
    const std::size_t k = trial % 2 == 0 ? 2 : 3;
    const auto x = testing::random_matrix(n, d, rng);
    const auto y = testing::random_labels(n, static_cast<int>(k), rng);
    const double l2 = 0.01 + rng.uniform();
    const auto names = k == 2 ? kBinary : kThree;
    const auto g = fit_gd(x, y, names, config(Solver::gd, l2));
    const auto l = fit_lbfgs(x, y, names, config(Solver::lbfgs, l2));
    EXPECT_TRUE(g.converged);
    EXPECT_TRUE(l.converged);
    EXPECT_LE(max_abs_diff(flatten(g), flatten(l)), 1e-4) << "trial " << trial;
  }
}

TEST(FitLbfgs, HeavyRidgeConvergesQuickly) {
  Rng rng(6);
  const auto x = testing::random_matrix(100, 5, rng);
  const auto y = testing::random_labels(100, 2, rng);
  OptimizerConfig cfg = config(Solver::lbfgs, 10.0, 1e-6);
  const auto m = fit_lbfgs(x, y, kBinary, cfg);
  EXPECT_TRUE(m.converged);
  EXPECT_LE(m.iterations_used, 50u);
}

TEST(FitLbfgs, RejectsL1) {
  OptimizerConfig cfg;
  cfg.l1 = 0.1;
  const std::vector<int> y = {0, 1};
  EXPECT_THROW(fit_lbfgs(DenseMatrix{{0}, {1}}, y, kBinary, cfg), ParameterError);
}

TEST(FitLbfgs, IterationCapReportsNotConverged) {
  Rng rng(7);
  const auto x = testing::random_matrix(50, 3, rng);
  const auto y = testing::random_labels(50, 3, rng);
  OptimizerConfig cfg = config(Solver::lbfgs, 0.0, 1e-14);
  cfg.max_iter = 2;
  const auto m = fit_lbfgs(x, y, kThree, cfg);
  EXPECT_FALSE(m.converged);
  EXPECT_EQ(m.iterations_used, 2u);
}

TEST(FitLbfgs, FlippedLabelsFlipPredictions) {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = testing::random_matrix(40, 3, rng);
    const auto y = testing::random_labels(40, 2, rng);
    std::vector<int> flipped(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) flipped[i] = 1 - y[i];
    const auto a = fit_lbfgs(x, y, kBinary, config(Solver::lbfgs, 0.1));
    const auto b = fit_lbfgs(x, flipped, kBinary, config(Solver::lbfgs, 0.1));
    ASSERT_TRUE(a.converged && b.converged);
    const auto pa = predict(a, x);
    const auto pb = predict(b, x);
    for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pb[i], 1 - pa[i]);
  }
}

TEST(FitSgd, Deterministic) {
  Rng rng(9);
  const auto x = testing::random_matrix(80, 4, rng);
  const auto y = testing::random_labels(80, 3, rng);
  OptimizerConfig cfg = config(Solver::sgd, 0.01, 1e-6);
  cfg.epochs = 20;
  cfg.seed = 1234;
  const auto a = fit_sgd(x, y, kThree, cfg);
  const auto b = fit_sgd(x, y, kThree, cfg);
  EXPECT_EQ(flatten(a), flatten(b));
  cfg.seed = 1235;
  EXPECT_NE(flatten(fit_sgd(x, y, kThree, cfg)), flatten(a));
}

TEST(FitSgd, ZeroEpochsReturnsZeroModel) {
  OptimizerConfig cfg = config(Solver::sgd, 0.0);
  cfg.epochs = 0;
  const std::vector<int> y = {0, 1};
  const auto m = fit_sgd(DenseMatrix{{1}, {2}}, y, kBinary, cfg);
  EXPECT_FALSE(m.converged);
  EXPECT_EQ(flatten(m), std::vector<double>(2, 0.0));
}

TEST(FitSgd, RunsEveryEpoch) {
  Rng rng(10);
  const auto x = testing::random_matrix(30, 2, rng);
  const auto y = testing::random_labels(30, 2, rng);
  OptimizerConfig cfg = config(Solver::sgd, 0.0);
  cfg.epochs = 17;
  TrainingTrace trace;
  const auto m = fit_sgd(x, y, kBinary, cfg, &trace);
  EXPECT_EQ(trace.losses.size(), 17u);
  EXPECT_EQ(m.iterations_used, 17u);
}

TEST(FitSgd, ApproachesTheBatchOptimum) {
  Rng rng(11);
  const auto x = testing::random_matrix(200, 3, rng);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    y[i] = rng.bernoulli(sigmoid(1.5 * x(i, 0) - x(i, 1))) ? 1 : 0;
  }
  OptimizerConfig cfg = config(Solver::sgd, 0.1);
  cfg.epochs = 300;
  cfg.learning_rate = 0.005;
  const auto s = fit_sgd(x, y, kBinary, cfg);
  const auto l = fit_lbfgs(x, y, kBinary, config(Solver::lbfgs, 0.1));
  EXPECT_LE(max_abs_diff(flatten(s), flatten(l)), 0.02);
}

TEST(FitSgd, L1ShrinksIrrelevantFeatures) {
  Rng rng(12);
  const auto x = testing::random_matrix(200, 4, rng);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < 200; ++i) y[i] = x(i, 0) > 0 ? 1 : 0;
  OptimizerConfig cfg = config(Solver::sgd, 0.0);
  cfg.epochs = 50;
  const auto plain = fit_sgd(x, y, kBinary, cfg);
  cfg.l1 = 0.05;
  const auto sparse = fit_sgd(x, y, kBinary, cfg);
  EXPECT_GT(sparse.weights(0, 0), 0.5);
  double plain_noise = 0.0, sparse_noise = 0.0;
  for (std::size_t j = 1; j < 4; ++j) {
    plain_noise += std::abs(plain.weights(0, j));
    sparse_noise += std::abs(sparse.weights(0, j));
  }
  EXPECT_LT(sparse_noise, 0.5 * plain_noise);
}

TEST(FitSgd, DominantL1GivesExactZeros) {
  Rng rng(12);
  const auto x = testing::random_matrix(100, 3, rng);
  const auto y = testing::random_labels(100, 2, rng);
  OptimizerConfig cfg = config(Solver::sgd, 0.0);
  // Shrink per step (lr * l1 = 1) exceeds any single gradient step.
  cfg.l1 = 100.0;
  cfg.epochs = 3;
  const auto m = fit_sgd(x, y, kBinary, cfg);
  for (double w : m.weights.values()) EXPECT_EQ(w, 0.0);
}

TEST(FitSgd, DivergenceNamesEpochAndRate) {
  const DenseMatrix x{{1e200}, {-1e200}};
  const std::vector<int> y = {0, 1};
  OptimizerConfig cfg = config(Solver::sgd, 0.0);
  cfg.learning_rate = 1e200;
  cfg.epochs = 5;
  try {
    fit_sgd(x, y, kBinary, cfg);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.epoch(), 1u);
    EXPECT_EQ(e.learning_rate(), 1e200);
  }
}

TEST(Trainers, RejectBadLabels) {
  const std::vector<int> y = {0, 2};
  EXPECT_THROW(fit_gd(DenseMatrix{{0}, {1}}, y, kBinary, config(Solver::gd, 0.0)), LabelError);
}

TEST(PredictProba, ZeroModels) {
  Rng rng(13);
  const auto x = testing::random_matrix(6, 2, rng);
  const auto pb = predict_proba(LogisticModel::zeros(2, kBinary), x);
  ASSERT_EQ(pb.cols(), 1u);
  for (double p : pb.values()) EXPECT_EQ(p, 0.5);
  const auto pm = predict_proba(LogisticModel::zeros(2, kThree), x);
  ASSERT_EQ(pm.cols(), 3u);
  for (double p : pm.values()) EXPECT_NEAR(p, 1.0 / 3.0, 1e-16);
}

TEST(PredictProba, DimensionMismatch) {
  EXPECT_THROW(predict_proba(LogisticModel::zeros(3, kBinary), DenseMatrix(2, 2)), DimensionError);
}

TEST(PredictProba, RowsSumToOne) {
  Rng rng(14);
  auto m = LogisticModel::zeros(4, kThree);
  for (auto& w : m.weights.span()) w = 5.0 * rng.normal();
  for (auto& b : m.intercepts) b = 5.0 * rng.normal();
  const auto p = predict_proba(m, testing::random_matrix(500, 4, rng, 3.0));
  for (std::size_t i = 0; i < p.rows(); ++i) {
    const auto row = p.row(i);
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(Predict, BoundaryGoesToClassOne) {
  const auto labels = predict(LogisticModel::zeros(2, kBinary), DenseMatrix(3, 2));
  EXPECT_EQ(labels, (std::vector<int>{1, 1, 1}));
}

TEST(Predict, TieGoesToLowestIndex) {
  auto m = LogisticModel::zeros(1, kThree);
  m.intercepts = DenseVector{std::log(0.4), std::log(0.4), std::log(0.2)};
  EXPECT_EQ(predict(m, DenseMatrix{{7.0}}), (std::vector<int>{0}));
}

TEST(Predict, DominantLogitWins) {
  auto m = LogisticModel::zeros(1, kThree);
  m.intercepts = DenseVector{0.0, 1.0, 5.0};
  EXPECT_EQ(predict(m, DenseMatrix{{0.0}}), (std::vector<int>{2}));
}

TEST(Predict, LogitShiftLeavesArgmaxUnchanged) {
  Rng rng(15);
  auto m = LogisticModel::zeros(3, kThree);
  for (auto& w : m.weights.span()) w = rng.normal();
  const auto x = testing::random_matrix(1000, 3, rng);
  const auto base = predict(m, x);
  for (double shift : {-300.0, -7.5, 0.25, 42.0, 600.0}) {
    auto shifted = m;
    for (auto& b : shifted.intercepts) b += shift;
    EXPECT_EQ(predict(shifted, x), base) << shift;
  }
}

TEST(Metrics, HandCountedBinary) {
  const std::vector<int> t = {0, 0, 1, 1}, p = {0, 1, 1, 1};
  const auto m = compute_metrics(t, p, 2);
  EXPECT_EQ(m.confusion, (std::vector<std::vector<std::size_t>>{{1, 1}, {0, 2}}));
  EXPECT_EQ(m.accuracy, 0.75);
  EXPECT_EQ(m.per_class[1].precision, 2.0 / 3.0);
  EXPECT_EQ(m.per_class[1].recall, 1.0);
  EXPECT_NEAR(m.per_class[1].f1, 0.8, 1e-15);
}

TEST(Metrics, PerfectPrediction) {
  const std::vector<int> t = {0, 1, 2, 2};
  const auto m = compute_metrics(t, t, 3);
  EXPECT_EQ(m.accuracy, 1.0);
  for (const auto& c : m.per_class) EXPECT_EQ(c.f1, 1.0);
}

TEST(Metrics, NeverPredictedClassHasZeroPrecision) {
  const std::vector<int> t = {0, 1, 2}, p = {0, 0, 0};
  const auto m = compute_metrics(t, p, 3);
  EXPECT_EQ(m.per_class[1].precision, 0.0);
  EXPECT_EQ(m.per_class[2].f1, 0.0);
  EXPECT_TRUE(std::isfinite(m.macro.precision));
}

TEST(Metrics, ConfusionRowsAreTrueCounts) {
  Rng rng(16);
  const auto t = testing::random_labels(300, 4, rng);
  const auto p = testing::random_labels(300, 4, rng);
  const auto m = compute_metrics(t, p, 4);
  std::size_t total = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto row = std::accumulate(m.confusion[k].begin(), m.confusion[k].end(), std::size_t{0});
    EXPECT_EQ(row, static_cast<std::size_t>(std::count(t.begin(), t.end(), static_cast<int>(k))));
    total += row;
  }
  EXPECT_EQ(total, 300u);
  for (const auto& c : m.per_class) {
    for (double v : {c.precision, c.recall, c.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Metrics, Errors) {
  const std::vector<int> a = {0, 1}, b = {0};
  EXPECT_THROW(compute_metrics(a, b, 2), DimensionError);
  const std::vector<int> bad = {0, 5};
  EXPECT_THROW(compute_metrics(a, bad, 2), LabelError);
}

}  // namespace
}  // namespace edulearn
