// Academic-outcome case study and its planted synthetic stand-in.
//
// The synthetic table mirrors the columns of the public student-outcome data:
// 16 categorical and 19 numeric predictors plus a three-class Target. A latent
// ability a ~ N(0, 1) drives admission grade, approved curricular units and
// unit grades. Class scores relative to "Enrolled" are linear in the encoded
// columns:
//   Graduate:  0.5·approved₂ + 0.25·grade₂ + 0.2·approved₁ + 1.0·[fees up to date]
//              + 0.8·[scholarship] - 0.04·age - 0.6·[debtor] + b_G
//   Dropout:  -0.4·approved₂ - 0.05·grade₂ - 0.2·approved₁ - 1.8·[fees up to date]
//              - 0.5·[scholarship] + 0.06·age + 0.7·[debtor] + b_D
// b_G and b_D are calibrated on a fixed 50,000-row sample so that the mean
// class probabilities equal kAcademicPrior.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "edulearn/errors.hpp"
#include "edulearn/pipelines.hpp"
#include "edulearn/random.hpp"
#include "case_study.hpp"

namespace edulearn {

namespace {

struct CategoricalSpec {
  const char* name;
  std::vector<std::string> levels;
  std::vector<double> probs;
};

const std::vector<CategoricalSpec>& categorical_specs() {
  static const std::vector<CategoricalSpec> specs = {
      {"Marital status", {"single", "married", "divorced"}, {0.85, 0.10, 0.05}},
      {"Application mode", {"general_1st_phase", "general_2nd_phase", "over_23", "transfer"},
       {0.50, 0.20, 0.15, 0.15}},
      {"Course",
       {"nursing", "management", "social_service", "informatics", "design", "agronomy"},
       {0.20, 0.20, 0.15, 0.15, 0.15, 0.15}},
      {"Daytime/evening attendance", {"daytime", "evening"}, {0.88, 0.12}},
      {"Previous qualification", {"secondary", "higher_education", "other"}, {0.80, 0.10, 0.10}},
      {"Nacionality", {"portuguese", "other"}, {0.95, 0.05}},
      {"Mother's qualification", {"basic", "secondary", "higher"}, {0.40, 0.40, 0.20}},
      {"Father's qualification", {"basic", "secondary", "higher"}, {0.40, 0.40, 0.20}},
      {"Mother's occupation", {"unskilled", "skilled", "professional", "other"},
       {0.30, 0.30, 0.20, 0.20}},
      {"Father's occupation", {"unskilled", "skilled", "professional", "other"},
       {0.30, 0.30, 0.20, 0.20}},
      {"Displaced", {"no", "yes"}, {0.45, 0.55}},
      {"Educational special needs", {"no", "yes"}, {0.99, 0.01}},
      {"Debtor", {"no", "yes"}, {0.90, 0.10}},
      {"Tuition fees up to date", {"yes", "no"}, {0.88, 0.12}},
      {"Gender", {"female", "male"}, {0.65, 0.35}},
      {"Scholarship holder", {"no", "yes"}, {0.75, 0.25}},
  };
  return specs;
}

const std::vector<std::string>& numeric_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n = {"Application order", "Previous qualification (grade)",
                                  "Admission grade", "Age at enrollment"};
    for (const char* sem : {"1st", "2nd"}) {
      for (const char* what : {"credited", "enrolled", "evaluations", "approved", "grade",
                               "without evaluations"}) {
        n.push_back(std::string("Curricular units ") + sem + " sem (" + what + ")");
      }
    }
    n.insert(n.end(), {"Unemployment rate", "Inflation rate", "GDP"});
    return n;
  }();
  return names;
}

// Column layout: the 16 categoricals followed by the 19 numerics, then Target.
// (Names follow the public data set, order is grouped by kind.)

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

struct DrawnRow {
  std::vector<std::string> cells;  // 35 predictor cells
  std::array<double, 2> scores;    // Graduate, Dropout (before intercepts)
};

DrawnRow draw_row(Rng& rng) {
  DrawnRow row;
  row.cells.reserve(kAcademicPredictors + 1);
  const double ability = rng.normal();

  std::array<std::size_t, 16> cat{};
  const auto& specs = categorical_specs();
  for (std::size_t c = 0; c < specs.size(); ++c) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t level = specs[c].probs.size() - 1;
    for (std::size_t k = 0; k < specs[c].probs.size(); ++k) {
      acc += specs[c].probs[k];
      if (u < acc) {
        level = k;
        break;
      }
    }
    cat[c] = level;
    row.cells.push_back(specs[c].levels[level]);
  }

  const double application_order = 1.0 + static_cast<double>(rng.below(6));
  const double previous_grade = round_to(std::clamp(rng.normal(132.0, 13.0), 95.0, 190.0), 10);
  const double admission = round_to(std::clamp(rng.normal(127.0, 14.0) + 4.0 * ability, 95.0, 190.0), 10);
  const double age = 17.0 + std::round(std::abs(rng.normal(0.0, 5.0)));
  for (double v : {application_order, previous_grade, admission, age}) row.cells.push_back(fmt(v));

  std::array<double, 2> approved{};
  std::array<double, 2> grade{};
  for (int sem = 0; sem < 2; ++sem) {
    const double credited = rng.bernoulli(0.1) ? 1.0 + static_cast<double>(rng.below(4)) : 0.0;
    const double enrolled = 6.0 + static_cast<double>(rng.below(3));
    const double evaluations = enrolled + static_cast<double>(rng.below(5));
    const double shift = sem == 0 ? 0.8 : 0.6;
    const double rate = std::clamp(sigmoid(1.5 * ability + shift) + rng.normal(0.0, 0.1), 0.0, 1.0);
    approved[sem] = std::round(enrolled * rate);
    const double g = round_to(std::clamp(12.0 + 1.5 * ability + rng.normal(), 0.0, 20.0), 100);
    grade[sem] = approved[sem] > 0.0 ? g : 0.0;
    const double without = static_cast<double>(rng.below(2));
    for (double v : {credited, enrolled, evaluations, approved[sem], grade[sem], without}) {
      row.cells.push_back(fmt(v));
    }
  }
  row.cells.push_back(fmt(round_to(rng.uniform(7.6, 16.2), 10)));
  row.cells.push_back(fmt(round_to(rng.uniform(-0.8, 3.7), 10)));
  row.cells.push_back(fmt(round_to(rng.uniform(-4.06, 3.51), 100)));

  const double fees = cat[13] == 0 ? 1.0 : 0.0;
  const double debtor = cat[12] == 1 ? 1.0 : 0.0;
  const double scholarship = cat[15] == 1 ? 1.0 : 0.0;
  row.scores[0] = 0.5 * approved[1] + 0.25 * grade[1] + 0.2 * approved[0] + 1.0 * fees +
                  0.8 * scholarship - 0.04 * age - 0.6 * debtor;
  row.scores[1] = -0.4 * approved[1] - 0.05 * grade[1] - 0.2 * approved[0] - 1.8 * fees -
                  0.5 * scholarship + 0.06 * age + 0.7 * debtor;
  return row;
}

std::array<double, 3> class_probabilities(const std::array<double, 2>& scores,
                                          const std::array<double, 2>& intercepts) {
  const std::array<double, 3> z = {scores[0] + intercepts[0], scores[1] + intercepts[1], 0.0};
  const double m = *std::max_element(z.begin(), z.end());
  std::array<double, 3> p{};
  double s = 0.0;
  for (std::size_t k = 0; k < 3; ++k) s += (p[k] = std::exp(z[k] - m));
  for (auto& v : p) v /= s;
  return p;
}

const std::array<double, 2>& planted_intercepts() {
  static const std::array<double, 2> intercepts = [] {
    constexpr std::size_t kCalibrationRows = 50000;
    constexpr std::uint64_t kCalibrationSeed = 0xCA11B4A7EULL;
    Rng rng(kCalibrationSeed);
    std::vector<std::array<double, 2>> scores(kCalibrationRows);
    for (auto& s : scores) s = draw_row(rng).scores;
    std::array<double, 2> b{0.0, 0.0};
    for (int iter = 0; iter < 200; ++iter) {
      std::array<double, 3> mean{};
      for (const auto& s : scores) {
        const auto p = class_probabilities(s, b);
        for (std::size_t k = 0; k < 3; ++k) mean[k] += p[k];
      }
      for (auto& m : mean) m /= static_cast<double>(kCalibrationRows);
      // Fixed point of b_k += log(π_k / p̄_k) with the Enrolled score pinned at 0.
      const double base = std::log(kAcademicPrior[2] / mean[2]);
      for (std::size_t k = 0; k < 2; ++k) b[k] += std::log(kAcademicPrior[k] / mean[k]) - base;
    }
    return b;
  }();
  return intercepts;
}

}  // namespace

std::vector<std::string> academic_class_names() { return {"Graduate", "Dropout", "Enrolled"}; }

Schema academic_synthetic_schema() {
  Schema s;
  for (const auto& c : categorical_specs()) {
    s.columns.push_back({c.name, ColumnKind::categorical, c.levels});
  }
  for (const auto& name : numeric_names()) s.columns.push_back({name, ColumnKind::numeric, std::nullopt});
  s.columns.push_back({"Target", ColumnKind::target, academic_class_names()});
  return s;
}

AcademicSynthetic generate_academic_table(std::size_t n_rows, std::uint64_t seed) {
  if (n_rows < 10) throw ParameterError("generate_academic_synthetic: need at least 10 rows");
  const auto& b = planted_intercepts();
  const auto classes = academic_class_names();

  AcademicSynthetic out;
  out.schema = academic_synthetic_schema();
  for (const auto& c : out.schema.columns) out.table.header.push_back(c.name);
  out.true_probabilities = DenseMatrix(n_rows, 3);

  Rng rng(seed);
  out.table.rows.reserve(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    DrawnRow row = draw_row(rng);
    const auto p = class_probabilities(row.scores, b);
    const double u = rng.uniform();
    const std::size_t label = u < p[0] ? 0 : (u < p[0] + p[1] ? 1 : 2);
    for (std::size_t k = 0; k < 3; ++k) out.true_probabilities(r, k) = p[k];
    row.cells.push_back(classes[label]);
    out.table.rows.push_back(std::move(row.cells));
  }
  out.dataset = encode_dataset(out.table, out.schema);
  return out;
}

Dataset generate_academic_synthetic(std::size_t n_rows, std::uint64_t seed) {
  return generate_academic_table(n_rows, seed).dataset;
}

OptimizerConfig default_academic_optimizer(Solver solver) {
  OptimizerConfig cfg;
  cfg.solver = solver;
  cfg.max_iter = 1000;
  cfg.epochs = 100;
  cfg.learning_rate = 0.01;
  cfg.l2 = 1e-4;
  return cfg;
}

CaseStudyResult run_academic_case_study(const AcademicSource& source, const SplitSpec& split_spec,
                                        const OptimizerConfig& opt) {
  if (const auto* ext = std::get_if<ExternalCsv>(&source)) {
    const RawTable table = read_csv(ext->csv);
    const Schema resolved = resolve_schema(table, load_schema(ext->schema));
    const Dataset ds = encode_dataset(table, resolved);
    CaseStudyResult result =
        detail::train_and_evaluate("academic", ds, split_spec, opt, DataSource::external);
    result.bundle.input_schema = resolved;
    return result;
  }

  const auto& syn = std::get<SyntheticAcademic>(source);
  const AcademicSynthetic data = generate_academic_table(syn.n_rows, syn.seed);
  TrainTestSplit parts;
  CaseStudyResult result = detail::train_and_evaluate("academic", data.dataset, split_spec, opt,
                                                      DataSource::synthetic, &parts);
  result.bundle.input_schema = data.schema;

  std::size_t hits = 0;
  for (std::size_t i = 0; i < parts.test_indices.size(); ++i) {
    const std::size_t row = parts.test_indices[i];
    if (static_cast<int>(argmax(data.true_probabilities.row(row))) == parts.test.targets[i]) ++hits;
  }
  result.report.planted_test_accuracy =
      static_cast<double>(hits) / static_cast<double>(parts.test_indices.size());
  return result;
}

}  // namespace edulearn
