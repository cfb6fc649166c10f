// edulearn command-line entry point.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage or configuration
// error (including output paths that cannot be written).

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edulearn/classify.hpp"
#include "edulearn/data.hpp"
#include "edulearn/errors.hpp"
#include "edulearn/pipelines.hpp"
#include "edulearn/report.hpp"

namespace fs = std::filesystem;
using namespace edulearn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string task;
  std::string input;
  std::string schema;
  std::string out = "./";
  std::optional<std::uint64_t> seed;
};

struct TrainOptions {
  std::string solver = "lbfgs";
  std::optional<std::size_t> max_iter;
  std::optional<std::size_t> epochs;
  std::optional<double> learning_rate;
  std::optional<double> l1;
  std::optional<double> l2;
  std::optional<double> tol;
  double train_fraction = 0.7;
  bool json_only = false;
};

struct GenOptions {
  std::optional<std::size_t> n;
  std::size_t sessions = 5;
  double noise_std = 10.0;
  double visual_fraction = 0.5;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("EDULEARN_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw UsageError("EDULEARN_SEED is not an unsigned integer: '" + std::string(s) + "'");
    }
    return v;
  }
  return 0;
}

// "--out runs/a_" -> runs/a_report.json; an existing directory or a trailing
// separator puts the default names inside it.
fs::path output_path(const std::string& prefix, const std::string& name) {
  if (prefix.empty()) return fs::path(name);
  const char last = prefix.back();
  if (last == '/' || last == '\\' || fs::is_directory(prefix)) return fs::path(prefix) / name;
  return fs::path(prefix + name);
}

void check_writable(const fs::path& path) {
  fs::path parent = path.parent_path();
  if (parent.empty()) parent = ".";
  std::error_code ec;
  if (!fs::is_directory(parent, ec)) {
    throw OutputError("output directory " + parent.string() + " does not exist");
  }
}

void write_output(const fs::path& path, const std::string& contents) {
  try {
    write_file_atomic(path, contents);
  } catch (const IoError& e) {
    throw OutputError(e.what());
  }
}

std::string format_probability(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

StyleGenConfig style_gen(const GenOptions& g, std::uint64_t seed) {
  StyleGenConfig cfg;
  if (g.n) cfg.n_students = *g.n;
  cfg.sessions_per_student = g.sessions;
  cfg.noise_std = g.noise_std;
  cfg.visual_fraction = g.visual_fraction;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

int cmd_generate(const CommonOptions& c, const GenOptions& g) {
  const std::uint64_t seed = resolve_seed(c.seed);
  const fs::path data_path = output_path(c.out, "data.csv");
  const fs::path schema_path = output_path(c.out, "schema.json");
  check_writable(data_path);

  RawTable table;
  Schema schema;
  if (c.task == "style") {
    StyleGenConfig cfg;
    try {
      cfg = style_gen(g, seed);
    } catch (const ParameterError& e) {
      throw UsageError(e.what());
    }
    table = style_sessions_table(generate_style_sessions(cfg));
    schema = style_schema();
  } else {
    const std::size_t n = g.n.value_or(5000);
    if (n < 10) throw UsageError("--n must be at least 10 for the academic generator");
    auto data = generate_academic_table(n, seed);
    table = std::move(data.table);
    schema = std::move(data.schema);
  }
  write_output(data_path, format_csv(table));
  write_output(schema_path, format_schema(schema));
  return kExitOk;
}

OptimizerConfig build_optimizer(const std::string& task, const TrainOptions& t, std::uint64_t seed) {
  Solver solver;
  try {
    solver = solver_from_string(t.solver);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  OptimizerConfig cfg = task == "style" ? default_style_optimizer() : default_academic_optimizer(solver);
  cfg.solver = solver;
  cfg.seed = seed;
  if (t.max_iter) cfg.max_iter = *t.max_iter;
  if (t.epochs) cfg.epochs = *t.epochs;
  if (t.learning_rate) cfg.learning_rate = *t.learning_rate;
  if (t.l1) cfg.l1 = *t.l1;
  if (t.l2) cfg.l2 = *t.l2;
  if (t.tol) cfg.tol = *t.tol;
  try {
    cfg.validate();
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

int cmd_train(const CommonOptions& c, const TrainOptions& t, const GenOptions& g) {
  const std::uint64_t seed = resolve_seed(c.seed);
  const OptimizerConfig opt = build_optimizer(c.task, t, seed);
  if (!(t.train_fraction > 0.0 && t.train_fraction < 1.0)) {
    throw UsageError("--train-fraction must lie strictly between 0 and 1");
  }
  const SplitSpec split{t.train_fraction, seed};
  const fs::path report_path = output_path(c.out, "report.json");
  const fs::path model_path = output_path(c.out, "model.json");
  check_writable(report_path);

  CaseStudyResult result;
  if (c.task == "style") {
    if (!c.input.empty()) {
      if (!c.schema.empty()) load_schema(c.schema);
      const auto sessions = style_sessions_from_table(read_csv(c.input));
      result = run_style_sessions(sessions, opt, split, DataSource::external);
    } else {
      StyleGenConfig gen;
      try {
        gen = style_gen(g, seed);
      } catch (const ParameterError& e) {
        throw UsageError(e.what());
      }
      result = run_style_experiment(gen, opt, split);
    }
  } else {
    AcademicSource source;
    if (!c.input.empty()) {
      if (c.schema.empty()) throw UsageError("--schema is required with --input for the academic task");
      source = ExternalCsv{c.input, c.schema};
    } else {
      source = SyntheticAcademic{g.n.value_or(5000), seed};
    }
    result = run_academic_case_study(source, split, opt);
  }

  const nlohmann::json report = report_to_json(result.report);
  write_output(report_path, report.dump(2) + "\n");
  write_output(model_path, bundle_to_json(result.bundle).dump(2) + "\n");
  if (t.json_only) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << format_text_block(result.report);
  }
  return kExitOk;
}

int cmd_predict(const CommonOptions& c, const std::string& model_file) {
  const fs::path out_path = output_path(c.out, "predictions.csv");
  check_writable(out_path);
  if (c.input.empty()) throw UsageError("--input is required");
  const ModelBundle bundle = load_bundle(model_file);
  const RawTable table = read_csv(c.input);
  const DenseMatrix x = transform(bundle.scaler, bundle_features(bundle, table));
  const DenseMatrix proba = predict_proba(bundle.model, x);
  const auto labels = predict(bundle.model, x);

  RawTable out;
  out.header = {"row", "predicted"};
  for (const auto& name : bundle.model.class_names) out.header.push_back("p_" + name);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::vector<std::string> row = {std::to_string(i + 1),
                                    bundle.model.class_names[static_cast<std::size_t>(labels[i])]};
    if (bundle.model.binary()) {
      row.push_back(format_probability(1.0 - proba(i, 0)));
      row.push_back(format_probability(proba(i, 0)));
    } else {
      for (std::size_t k = 0; k < proba.cols(); ++k) row.push_back(format_probability(proba(i, k)));
    }
    out.rows.push_back(std::move(row));
  }
  write_output(out_path, format_csv(out));
  return kExitOk;
}

// Input columns: student_id, initial_score, advanced_score (blank when the
// initial gate was failed).
int cmd_stage(const CommonOptions& c, double pass_threshold) {
  const fs::path out_path = output_path(c.out, "stages.json");
  check_writable(out_path);
  if (c.input.empty()) throw UsageError("--input is required");
  if (!(pass_threshold >= 0.0 && pass_threshold <= 100.0)) {
    throw UsageError("--pass-threshold must lie in [0, 100]");
  }
  const RawTable table = read_csv(c.input);
  const auto id_col = table.column_index("student_id");
  const auto init_col = table.column_index("initial_score");
  const auto adv_col = table.column_index("advanced_score");
  if (!id_col) throw SchemaError("student_id", "missing column 'student_id'");
  if (!init_col) throw SchemaError("initial_score", "missing column 'initial_score'");
  if (!adv_col) throw SchemaError("advanced_score", "missing column 'advanced_score'");

  auto parse = [](const std::string& cell, std::size_t row, const char* column) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw ParseError(row, column, "cannot parse '" + cell + "' in row " + std::to_string(row) +
                                        ", column '" + column + "'");
    }
    return v;
  };

  nlohmann::json students = nlohmann::json::array();
  std::vector<StageLabel> stages;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const double initial = parse(row[*init_col], r + 1, "initial_score");
    std::optional<double> advanced;
    if (!row[*adv_col].empty()) advanced = parse(row[*adv_col], r + 1, "advanced_score");
    const StageLabel stage = route_learner_stage(initial, advanced, pass_threshold);
    stages.push_back(stage);
    students.push_back({{"student_id", row[*id_col]}, {"stage", std::string(to_string(stage))}});
  }
  const ClassLevelSummary summary = class_level_summary(stages);
  const nlohmann::json doc = {
      {"report_version", kReportVersion},
      {"pass_threshold", pass_threshold},
      {"students", std::move(students)},
      {"summary",
       {{"beginner_fraction", summary.beginner_fraction},
        {"advanced_fraction", summary.advanced_fraction},
        {"recommendation", std::string(to_string(summary.recommendation))}}}};
  write_output(out_path, doc.dump(2) + "\n");
  std::cout << "beginner " << summary.beginner_fraction << ", advanced " << summary.advanced_fraction
            << " -> " << to_string(summary.recommendation) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edulearn: learning-style and academic-outcome classifiers"};
  app.require_subcommand(1);

  CommonOptions common;
  TrainOptions train_opts;
  GenOptions gen_opts;
  std::string model_file;
  double pass_threshold = 70.0;
  const std::vector<std::string> tasks = {"style", "academic"};

  auto add_common = [&](CLI::App* sub, bool with_task) {
    if (with_task) sub->add_option("--task", common.task, "style or academic")->required()->check(CLI::IsMember(tasks));
    sub->add_option("--out", common.out, "output directory or file-name prefix");
    sub->add_option("--seed", common.seed, "seed (falls back to EDULEARN_SEED, then 0)");
  };
  auto add_generator = [&](CLI::App* sub) {
    sub->add_option("--n", gen_opts.n, "students (style) or rows (academic)");
    sub->add_option("--sessions", gen_opts.sessions, "sessions per student (style)");
    sub->add_option("--noise-std", gen_opts.noise_std, "score noise (style)");
    sub->add_option("--visual-fraction", gen_opts.visual_fraction, "share of visual learners (style)");
  };

  auto* generate = app.add_subcommand("generate", "write a synthetic CSV and its schema");
  add_common(generate, true);
  add_generator(generate);

  auto* train = app.add_subcommand("train", "train and evaluate a classifier");
  add_common(train, true);
  add_generator(train);
  train->add_option("--input", common.input, "CSV input (synthetic data when omitted)");
  train->add_option("--schema", common.schema, "schema JSON for --input");
  train->add_option("--solver", train_opts.solver, "lbfgs, sgd or gd");
  train->add_option("--max-iter", train_opts.max_iter);
  train->add_option("--epochs", train_opts.epochs);
  train->add_option("--learning-rate", train_opts.learning_rate);
  train->add_option("--l1", train_opts.l1);
  train->add_option("--l2", train_opts.l2);
  train->add_option("--tol", train_opts.tol);
  train->add_option("--train-fraction", train_opts.train_fraction);
  train->add_flag("--json", train_opts.json_only, "print the report JSON instead of the text block");

  auto* predict_cmd = app.add_subcommand("predict", "score a CSV with a trained model");
  predict_cmd->add_option("--model", model_file, "model.json from train")->required();
  predict_cmd->add_option("--input", common.input, "CSV to score")->required();
  predict_cmd->add_option("--out", common.out, "output directory or file-name prefix");

  auto* stage = app.add_subcommand("stage", "route students to beginner/advanced resources");
  stage->add_option("--input", common.input, "CSV with student_id, initial_score, advanced_score")->required();
  stage->add_option("--out", common.out, "output directory or file-name prefix");
  stage->add_option("--pass-threshold", pass_threshold, "gate score in percent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(common, gen_opts);
    if (train->parsed()) return cmd_train(common, train_opts, gen_opts);
    if (predict_cmd->parsed()) return cmd_predict(common, model_file);
    if (stage->parsed()) return cmd_stage(common, pass_threshold);
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const OutputError& e) {
    std::cerr << "error: io_error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
