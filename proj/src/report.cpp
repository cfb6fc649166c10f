#include "edulearn/report.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

#include "edulearn/errors.hpp"

namespace edulearn {

using nlohmann::json;

json to_json(const OptimizerConfig& cfg) {
  return {{"solver", std::string(to_string(cfg.solver))},
          {"max_iter", cfg.max_iter},
          {"epochs", cfg.epochs},
          {"learning_rate", cfg.learning_rate},
          {"tol", cfg.tol},
          {"l2", cfg.l2},
          {"l1", cfg.l1},
          {"lbfgs_memory", cfg.lbfgs_memory},
          {"seed", cfg.seed}};
}

OptimizerConfig optimizer_config_from_json(const json& j) {
  OptimizerConfig cfg;
  cfg.solver = solver_from_string(j.at("solver").get<std::string>());
  cfg.max_iter = j.at("max_iter").get<std::size_t>();
  cfg.epochs = j.at("epochs").get<std::size_t>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.tol = j.at("tol").get<double>();
  cfg.l2 = j.at("l2").get<double>();
  cfg.l1 = j.at("l1").get<double>();
  cfg.lbfgs_memory = j.at("lbfgs_memory").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

json to_json(const MetricsReport& m, const std::vector<std::string>& class_names) {
  json per_class = json::array();
  for (std::size_t k = 0; k < m.per_class.size(); ++k) {
    std::size_t support = 0;
    for (auto v : m.confusion[k]) support += v;
    per_class.push_back({{"class", k < class_names.size() ? class_names[k] : std::to_string(k)},
                         {"precision", m.per_class[k].precision},
                         {"recall", m.per_class[k].recall},
                         {"f1", m.per_class[k].f1},
                         {"support", support}});
  }
  return {{"accuracy", m.accuracy},
          {"macro", {{"precision", m.macro.precision}, {"recall", m.macro.recall}, {"f1", m.macro.f1}}},
          {"per_class", std::move(per_class)},
          {"confusion", m.confusion}};
}

json to_json(const LogisticModel& m) {
  return {{"model_type", m.binary() ? "binary_logistic" : "multinomial_logistic"},
          {"class_names", m.class_names},
          {"n_features", m.n_features()},
          {"weights", m.weights.values()},
          {"intercepts", m.intercepts.values()},
          {"converged", m.converged},
          {"iterations_used", m.iterations_used}};
}

LogisticModel logistic_model_from_json(const json& j) {
  try {
    auto names = j.at("class_names").get<std::vector<std::string>>();
    const auto d = j.at("n_features").get<std::size_t>();
    LogisticModel m = LogisticModel::zeros(d, std::move(names));
    const std::string type = j.at("model_type").get<std::string>();
    if ((type == "binary_logistic") != m.binary()) {
      throw SchemaError("model_type", "model_type '" + type + "' does not match the class count");
    }
    m.weights = DenseMatrix(m.weights.rows(), d, j.at("weights").get<std::vector<double>>());
    const auto b = j.at("intercepts").get<std::vector<double>>();
    if (b.size() != m.weights.rows()) throw SchemaError("intercepts", "intercept count mismatch");
    m.intercepts = DenseVector(b);
    m.converged = j.at("converged").get<bool>();
    m.iterations_used = j.at("iterations_used").get<std::size_t>();
    return m;
  } catch (const json::exception& e) {
    throw SchemaError("", std::string("malformed model: ") + e.what());
  } catch (const DimensionError& e) {
    throw SchemaError("weights", std::string("malformed model: ") + e.what());
  }
}

json to_json(const LinearModel& m, const std::vector<std::string>& feature_names,
             const FitStat& fit) {
  return {{"intercept", m.intercept},
          {"coefficients", m.coefficients.values()},
          {"feature_names", feature_names},
          {"converged", m.converged},
          {"fit", {{"lsr", fit.lsr}, {"r_squared", fit.r_squared}}}};
}

namespace {

std::string percent(double ratio) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << ratio * 100.0 << '%';
  return os.str();
}

void append_metrics(std::ostringstream& os, const char* side, const MetricsReport& m) {
  os << side << " Accuracy: " << percent(m.accuracy) << '\n'
     << side << " Precision: " << percent(m.macro.precision) << '\n'
     << side << " Recall: " << percent(m.macro.recall) << '\n'
     << side << " F1 Score: " << percent(m.macro.f1) << '\n';
}

}  // namespace

std::string format_text_block(const CaseStudyReport& r) {
  std::ostringstream os;
  std::size_t width = 6;
  for (const auto& name : r.class_names) width = std::max(width, name.size());
  os << "Class distribution in the training data:\n";
  os << (r.task == "style" ? "style" : "Target") << '\n';
  for (std::size_t k = 0; k < r.class_names.size(); ++k) {
    os << std::left << std::setw(static_cast<int>(width + 4)) << r.class_names[k]
       << r.class_distribution[k] << '\n';
  }
  os << "Name: count\n";
  append_metrics(os, "Training", r.train_metrics);
  append_metrics(os, "Test", r.test_metrics);
  os << "(precision, recall and F1 are macro averages over classes)\n";
  return os.str();
}

json report_to_json(const CaseStudyReport& r) {
  json distribution = json::array();
  for (std::size_t k = 0; k < r.class_names.size(); ++k) {
    distribution.push_back({{"class", r.class_names[k]}, {"count", r.class_distribution[k]}});
  }
  json j = {{"report_version", kReportVersion},
            {"task", r.task},
            {"solver", std::string(to_string(r.solver))},
            {"data_source", std::string(to_string(r.data_source))},
            {"split", {{"train_fraction", r.split.train_fraction}, {"seed", r.split.seed}}},
            {"train_rows", r.train_rows},
            {"test_rows", r.test_rows},
            {"n_features", r.n_features},
            {"class_names", r.class_names},
            {"class_distribution", std::move(distribution)},
            {"config", to_json(r.config_echo)},
            {"train_metrics", to_json(r.train_metrics, r.class_names)},
            {"test_metrics", to_json(r.test_metrics, r.class_names)},
            {"text_block", format_text_block(r)}};
  if (r.planted_test_accuracy) j["planted_test_accuracy"] = *r.planted_test_accuracy;
  if (r.students) {
    j["students"] = {{"count", r.students->students},
                     {"tally_rule_accuracy", r.students->tally_rule_accuracy},
                     {"model_vote_accuracy", r.students->model_vote_accuracy}};
  }
  return j;
}

json bundle_to_json(const ModelBundle& b) {
  json j = to_json(b.model);
  j["model_version"] = kModelVersion;
  j["task"] = b.task;
  j["feature_names"] = b.feature_names;
  j["config"] = to_json(b.config);
  j["scaler"] = {{"means", b.scaler.means.values()}, {"stds", b.scaler.stds.values()}};
  j["input_schema"] = json::parse(format_schema(b.input_schema));
  return j;
}

ModelBundle bundle_from_json(const json& j) {
  try {
    if (j.at("model_version") != kModelVersion) {
      throw SchemaError("model_version", "unsupported model_version " + j.at("model_version").dump());
    }
    ModelBundle b;
    b.task = j.at("task").get<std::string>();
    if (b.task != "style" && b.task != "academic") {
      throw SchemaError("task", "unknown task '" + b.task + "'");
    }
    b.model = logistic_model_from_json(j);
    b.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    b.config = optimizer_config_from_json(j.at("config"));
    b.scaler.means = DenseVector(j.at("scaler").at("means").get<std::vector<double>>());
    b.scaler.stds = DenseVector(j.at("scaler").at("stds").get<std::vector<double>>());
    b.input_schema = parse_schema(j.at("input_schema").dump());
    if (b.feature_names.size() != b.model.n_features() ||
        b.scaler.means.size() != b.model.n_features() ||
        b.scaler.stds.size() != b.model.n_features()) {
      throw SchemaError("feature_names", "feature, scaler and weight sizes disagree");
    }
    return b;
  } catch (const json::exception& e) {
    throw SchemaError("", std::string("malformed model file: ") + e.what());
  }
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("model file is not valid JSON: ") + e.what());
  }
  return bundle_from_json(j);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("failed writing " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace edulearn
