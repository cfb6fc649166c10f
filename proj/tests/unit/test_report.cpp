#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "edulearn/errors.hpp"
#include "edulearn/report.hpp"
#include "test_util.hpp"

namespace edulearn {
namespace {

CaseStudyReport small_report() {
  CaseStudyReport r;
  r.task = "academic";
  r.class_names = {"Graduate", "Dropout", "Enrolled"};
  r.class_distribution = {5, 3, 2};
  r.train_rows = 10;
  r.test_rows = 4;
  r.n_features = 2;
  const std::vector<int> t_train = {0, 0, 0, 0, 0, 1, 1, 1, 2, 2};
  const std::vector<int> p_train = {0, 0, 0, 0, 1, 1, 1, 0, 2, 0};
  r.train_metrics = compute_metrics(t_train, p_train, 3);
  const std::vector<int> t_test = {0, 1, 2, 0}, p_test = {0, 1, 1, 0};
  r.test_metrics = compute_metrics(t_test, p_test, 3);
  return r;
}

TEST(TextBlock, MirrorsTheFigureLayout) {
  // Train confusion [[4,1,0],[1,2,0],[1,0,1]]: accuracy 7/10, macro precision
  // (2/3 + 2/3 + 1)/3, recall (4/5 + 2/3 + 1/2)/3, F1 (8/11 + 2/3 + 2/3)/3.
  // Test confusion [[2,0,0],[0,1,0],[0,1,0]]: precision (1 + 1/2 + 0)/3,
  // recall (1 + 1 + 0)/3, F1 (1 + 2/3 + 0)/3.
  const std::string want =
      "Class distribution in the training data:\n"
      "Target\n"
      "Graduate    5\n"
      "Dropout     3\n"
      "Enrolled    2\n"
      "Name: count\n"
      "Training Accuracy: 70.00%\n"
      "Training Precision: 77.78%\n"
      "Training Recall: 65.56%\n"
      "Training F1 Score: 68.69%\n"
      "Test Accuracy: 75.00%\n"
      "Test Precision: 50.00%\n"
      "Test Recall: 66.67%\n"
      "Test F1 Score: 55.56%\n"
      "(precision, recall and F1 are macro averages over classes)\n";
  EXPECT_EQ(format_text_block(small_report()), want);
}

TEST(ReportJson, CarriesVersionAndMetrics) {
  const auto j = report_to_json(small_report());
  EXPECT_EQ(j.at("report_version"), 1);
  EXPECT_EQ(j.at("task"), "academic");
  EXPECT_EQ(j.at("class_distribution").size(), 3u);
  EXPECT_EQ(j.at("class_distribution")[1].at("class"), "Dropout");
  EXPECT_EQ(j.at("test_metrics").at("confusion")[2][1], 1);
  EXPECT_EQ(j.at("test_metrics").at("per_class")[0].at("support"), 2);
  EXPECT_FALSE(j.contains("planted_test_accuracy"));
  EXPECT_TRUE(j.at("text_block").is_string());
}

TEST(ReportJson, DoublesRoundTripExactly) {
  auto r = small_report();
  r.planted_test_accuracy = 0.1 + 0.2;
  const auto text = report_to_json(r).dump();
  const auto back = nlohmann::json::parse(text);
  EXPECT_EQ(back.at("planted_test_accuracy").get<double>(), 0.1 + 0.2);
  EXPECT_EQ(back.at("train_metrics").at("macro").at("f1").get<double>(),
            r.train_metrics.macro.f1);
}

TEST(OptimizerJson, RoundTrip) {
  OptimizerConfig cfg;
  cfg.solver = Solver::sgd;
  cfg.learning_rate = 0.0123;
  cfg.epochs = 7;
  cfg.l1 = 0.5;
  cfg.seed = 18446744073709551615ULL;
  const auto back = optimizer_config_from_json(to_json(cfg));
  EXPECT_EQ(back.solver, cfg.solver);
  EXPECT_EQ(back.learning_rate, cfg.learning_rate);
  EXPECT_EQ(back.epochs, cfg.epochs);
  EXPECT_EQ(back.l1, cfg.l1);
  EXPECT_EQ(back.seed, cfg.seed);
}

TEST(LinearModelJson, Fields) {
  LinearModel m{1.5, DenseVector{2.0, -1.0}};
  const auto j = to_json(m, {"a", "b"}, FitStat{0.25, 0.9});
  EXPECT_EQ(j.at("intercept"), 1.5);
  EXPECT_EQ(j.at("coefficients")[1], -1.0);
  EXPECT_EQ(j.at("feature_names")[0], "a");
  EXPECT_EQ(j.at("fit").at("lsr"), 0.25);
  EXPECT_EQ(j.at("fit").at("r_squared"), 0.9);
}

ModelBundle trained_style_bundle() {
  StyleGenConfig gen;
  gen.n_students = 40;
  return run_style_experiment(gen, default_style_optimizer(), {}).bundle;
}

TEST(BundleJson, RoundTripPreservesPredictions) {
  const auto bundle = trained_style_bundle();
  const auto back = bundle_from_json(nlohmann::json::parse(bundle_to_json(bundle).dump()));
  EXPECT_EQ(back.model.weights, bundle.model.weights);
  EXPECT_EQ(back.model.intercepts, bundle.model.intercepts);
  EXPECT_EQ(back.scaler.means, bundle.scaler.means);
  EXPECT_EQ(back.feature_names, bundle.feature_names);
  EXPECT_EQ(back.input_schema, bundle.input_schema);
  EXPECT_EQ(bundle_to_json(back).dump(), bundle_to_json(bundle).dump());
}

TEST(BundleJson, MultinomialRoundTrip) {
  const auto result = run_academic_case_study(SyntheticAcademic{300, 1}, {},
                                              default_academic_optimizer(Solver::lbfgs));
  const auto j = bundle_to_json(result.bundle);
  EXPECT_EQ(j.at("model_type"), "multinomial_logistic");
  const auto back = bundle_from_json(j);
  EXPECT_EQ(back.model.weights, result.bundle.model.weights);
  EXPECT_EQ(back.model.n_classes, 3u);
}

TEST(BundleJson, RejectsMalformedModels) {
  auto j = bundle_to_json(trained_style_bundle());
  auto bad = j;
  bad["model_version"] = 2;
  EXPECT_THROW(bundle_from_json(bad), SchemaError);
  bad = j;
  bad["weights"] = nlohmann::json::array({1.0});
  EXPECT_THROW(bundle_from_json(bad), SchemaError);
  bad = j;
  bad.erase("scaler");
  EXPECT_THROW(bundle_from_json(bad), SchemaError);
  bad = j;
  bad["model_type"] = "multinomial_logistic";
  EXPECT_THROW(bundle_from_json(bad), SchemaError);
}

TEST(BundleFeatures, NamesMissingColumn) {
  const auto result = run_academic_case_study(SyntheticAcademic{200, 2}, {},
                                              default_academic_optimizer(Solver::lbfgs));
  auto table = generate_academic_table(20, 3).table;
  const auto x = bundle_features(result.bundle, table);
  EXPECT_EQ(x.cols(), result.bundle.model.n_features());
  table.header.erase(table.header.begin());
  for (auto& r : table.rows) r.erase(r.begin());
  try {
    bundle_features(result.bundle, table);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.column(), "Marital status");
  }
}

TEST(WriteFileAtomic, WritesAndReplaces) {
  const auto dir = testing::scratch_dir("atomic");
  const auto path = dir / "out.txt";
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "second");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
}

TEST(WriteFileAtomic, MissingDirectoryLeavesNothing) {
  const auto dir = testing::scratch_dir("atomic_missing");
  EXPECT_THROW(write_file_atomic(dir / "nope" / "out.txt", "x"), IoError);
  EXPECT_TRUE(std::filesystem::is_empty(dir));
}

TEST(LoadBundle, MissingAndInvalidFiles) {
  const auto dir = testing::scratch_dir("load_bundle");
  EXPECT_THROW(load_bundle(dir / "absent.json"), IoError);
  write_file_atomic(dir / "bad.json", "{not json");
  EXPECT_THROW(load_bundle(dir / "bad.json"), SchemaError);
}

}  // namespace
}  // namespace edulearn
