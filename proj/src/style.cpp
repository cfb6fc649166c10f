#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>

#include "edulearn/errors.hpp"
#include "edulearn/pipelines.hpp"
#include "edulearn/random.hpp"
#include "case_study.hpp"

namespace edulearn {

std::string_view to_string(StyleLabel label) {
  return label == StyleLabel::visual ? "visual" : "auditory";
}

std::string_view to_string(StageLabel label) {
  return label == StageLabel::advanced ? "advanced" : "beginner";
}

std::string_view to_string(TrackRecommendation rec) {
  return rec == TrackRecommendation::advanced_track ? "advanced-track" : "beginner-track";
}

void StyleSession::validate() const {
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  if (!in(visual_score, 0, 100) || !in(auditory_score, 0, 100)) {
    throw ParameterError("assessment scores must lie in [0, 100]");
  }
  if (!(comprehension_time > 0)) throw ParameterError("comprehension_time must be > 0");
  if (prior_preferred_style != 0 && prior_preferred_style != 1) {
    throw ParameterError("prior_preferred_style must be 0 or 1");
  }
  if (!(time_of_day >= 0 && time_of_day < 24)) throw ParameterError("time_of_day must lie in [0, 24)");
  if (!in(instructor_score, 0, 10)) throw ParameterError("instructor_score must lie in [0, 10]");
  if (!(lesson_duration > 0)) throw ParameterError("lesson_duration must be > 0");
}

void StyleGenConfig::validate() const {
  if (n_students < 1 || sessions_per_student < 1) {
    throw ParameterError("n_students and sessions_per_student must be >= 1");
  }
  if (!(visual_fraction >= 0.0 && visual_fraction <= 1.0)) {
    throw ParameterError("visual_fraction must lie in [0, 1]");
  }
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ParameterError("noise_std must be >= 0");
}

std::vector<LabeledSession> generate_style_sessions(const StyleGenConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  auto score = [&](double mean) {
    return std::clamp(mean + cfg.noise_std * rng.normal(), 0.0, 100.0);
  };

  std::vector<LabeledSession> out;
  out.reserve(cfg.n_students * cfg.sessions_per_student);
  for (std::size_t s = 0; s < cfg.n_students; ++s) {
    const bool visual = rng.bernoulli(cfg.visual_fraction);
    const StyleLabel label = visual ? StyleLabel::visual : StyleLabel::auditory;
    for (std::size_t k = 0; k < cfg.sessions_per_student; ++k) {
      LabeledSession ls;
      ls.label = label;
      auto& x = ls.session;
      x.student_id = "S" + std::to_string(s + 1);
      x.instructor_id = "T" + std::to_string(k % 3 + 1);
      x.day = k + 1;
      x.visual_score = score(visual ? kPlantedMatchingMean : kPlantedOtherMean);
      x.auditory_score = score(visual ? kPlantedOtherMean : kPlantedMatchingMean);
      x.comprehension_time = rng.uniform(10.0, 60.0);
      const bool agrees = rng.bernoulli(0.6);
      x.prior_preferred_style = (agrees == visual) ? 1 : 0;
      x.time_of_day = rng.uniform(8.0, 18.0);
      x.instructor_score = rng.uniform(5.0, 10.0);
      x.lesson_duration = rng.uniform(30.0, 90.0);
      out.push_back(std::move(ls));
    }
  }
  return out;
}

StyleLabel style_ratio_label(std::size_t visual_high_tally, std::size_t total_assessments) {
  if (total_assessments == 0) throw ParameterError("style_ratio_label: total must be > 0");
  if (visual_high_tally > total_assessments) {
    throw ParameterError("style_ratio_label: tally exceeds total");
  }
  // tally/total > 0.65  <=>  20·tally > 13·total, exact in integers.
  return 20 * visual_high_tally > 13 * total_assessments ? StyleLabel::visual
                                                          : StyleLabel::auditory;
}

StyleLabel aggregate_sessions(std::span<const StyleLabel> labels) {
  if (labels.empty()) throw ParameterError("aggregate_sessions: no sessions");
  const auto visual = static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), StyleLabel::visual));
  return 2 * visual > labels.size() ? StyleLabel::visual : StyleLabel::auditory;
}

StyleLabel aggregate_sessions(std::span<const LabeledSession> sessions) {
  std::vector<StyleLabel> labels;
  labels.reserve(sessions.size());
  for (const auto& s : sessions) labels.push_back(s.label);
  return aggregate_sessions(labels);
}

StageLabel route_learner_stage(double initial_score, std::optional<double> advanced_score,
                               double pass_threshold) {
  auto valid = [](double v) { return v >= 0.0 && v <= 100.0; };
  if (!valid(initial_score) || !valid(pass_threshold) ||
      (advanced_score && !valid(*advanced_score))) {
    throw ParameterError("route_learner_stage: scores must lie in [0, 100]");
  }
  if (initial_score < pass_threshold) {
    if (advanced_score) {
      throw ParameterError("route_learner_stage: advanced score given for a failed initial gate");
    }
    return StageLabel::beginner;
  }
  if (!advanced_score) {
    throw ParameterError("route_learner_stage: advanced score required after passing the gate");
  }
  return *advanced_score >= pass_threshold ? StageLabel::advanced : StageLabel::beginner;
}

ClassLevelSummary class_level_summary(std::span<const StageLabel> stages) {
  if (stages.empty()) throw ParameterError("class_level_summary: no students");
  const auto advanced = static_cast<std::size_t>(
      std::count(stages.begin(), stages.end(), StageLabel::advanced));
  const auto n = static_cast<double>(stages.size());
  ClassLevelSummary out;
  out.advanced_fraction = static_cast<double>(advanced) / n;
  out.beginner_fraction = static_cast<double>(stages.size() - advanced) / n;
  out.recommendation = 2 * advanced > stages.size() ? TrackRecommendation::advanced_track
                                                    : TrackRecommendation::beginner_track;
  return out;
}

namespace {

void fill_style_row(std::span<double> row, const StyleSession& s) {
  row[0] = s.visual_score - s.auditory_score;
  row[1] = s.comprehension_time;
  row[2] = static_cast<double>(s.prior_preferred_style);
  row[3] = s.time_of_day;
  row[4] = s.instructor_score;
  row[5] = s.lesson_duration;
}

// Numeric input columns of the style CSV, in schema order.
constexpr std::array<std::string_view, 7> kStyleInputs = {
    "visual_score",  "auditory_score",   "comprehension_time", "prior_preferred_style",
    "time_of_day",   "instructor_score", "lesson_duration"};

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

DenseMatrix style_design_matrix(std::span<const LabeledSession> sessions) {
  DenseMatrix x(sessions.size(), kStyleFeatureNames.size());
  for (std::size_t i = 0; i < sessions.size(); ++i) fill_style_row(x.row(i), sessions[i].session);
  return x;
}

Schema style_schema() {
  Schema s;
  s.columns.push_back({"student_id", ColumnKind::ignored, std::nullopt});
  s.columns.push_back({"instructor_id", ColumnKind::ignored, std::nullopt});
  s.columns.push_back({"day", ColumnKind::ignored, std::nullopt});
  for (auto name : kStyleInputs) s.columns.push_back({std::string(name), ColumnKind::numeric, std::nullopt});
  s.columns.push_back({"style", ColumnKind::target, std::vector<std::string>{"auditory", "visual"}});
  return s;
}

RawTable style_sessions_table(std::span<const LabeledSession> sessions) {
  RawTable t;
  for (const auto& c : style_schema().columns) t.header.push_back(c.name);
  for (const auto& ls : sessions) {
    const auto& s = ls.session;
    t.rows.push_back({s.student_id, s.instructor_id, std::to_string(s.day),
                      format_number(s.visual_score), format_number(s.auditory_score),
                      format_number(s.comprehension_time), std::to_string(s.prior_preferred_style),
                      format_number(s.time_of_day), format_number(s.instructor_score),
                      format_number(s.lesson_duration), std::string(to_string(ls.label))});
  }
  return t;
}

std::vector<LabeledSession> style_sessions_from_table(const RawTable& table) {
  const Dataset ds = encode_dataset(table, style_schema());
  const auto sid = table.column_index("student_id");
  const auto iid = table.column_index("instructor_id");
  const auto day = table.column_index("day");
  std::vector<LabeledSession> out(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    auto& s = out[r].session;
    s.student_id = table.rows[r][*sid];
    s.instructor_id = table.rows[r][*iid];
    const auto& day_cell = table.rows[r][*day];
    const auto [ptr, ec] = std::from_chars(day_cell.data(), day_cell.data() + day_cell.size(), s.day);
    if (ec != std::errc() || ptr != day_cell.data() + day_cell.size()) {
      throw ParseError(r + 1, "day", "cannot parse day '" + day_cell + "' in row " + std::to_string(r + 1));
    }
    const auto f = ds.features.row(r);
    s.visual_score = f[0];
    s.auditory_score = f[1];
    s.comprehension_time = f[2];
    s.prior_preferred_style = static_cast<int>(f[3]);
    s.time_of_day = f[4];
    s.instructor_score = f[5];
    s.lesson_duration = f[6];
    if (f[3] != 0.0 && f[3] != 1.0) throw ParameterError("prior_preferred_style must be 0 or 1");
    s.validate();
    out[r].label = ds.targets[r] == 1 ? StyleLabel::visual : StyleLabel::auditory;
  }
  return out;
}

DenseMatrix style_design_from_table(const RawTable& table) {
  const auto encoded = encode_features(table, style_schema());
  DenseMatrix x(encoded.features.rows(), kStyleFeatureNames.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto f = encoded.features.row(r);
    auto row = x.row(r);
    row[0] = f[0] - f[1];
    for (std::size_t j = 1; j < row.size(); ++j) row[j] = f[j + 1];
  }
  return x;
}

OptimizerConfig default_style_optimizer() {
  OptimizerConfig cfg;
  cfg.solver = Solver::lbfgs;
  cfg.l2 = 0.1;
  return cfg;
}

CaseStudyResult run_style_sessions(std::span<const LabeledSession> sessions,
                                   const OptimizerConfig& opt, const SplitSpec& split_spec,
                                   DataSource source) {
  Dataset ds;
  ds.features = style_design_matrix(sessions);
  ds.feature_names.assign(kStyleFeatureNames.begin(), kStyleFeatureNames.end());
  ds.class_names = {"auditory", "visual"};
  ds.n_raw_columns = style_schema().columns.size();
  ds.targets.reserve(sessions.size());
  for (const auto& s : sessions) ds.targets.push_back(static_cast<int>(s.label));

  CaseStudyResult result = detail::train_and_evaluate("style", ds, split_spec, opt, source);
  result.bundle.input_schema = style_schema();

  // Per-student checks over every session, grouped in first-seen order.
  std::map<std::string, std::vector<std::size_t>> by_student;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    auto [it, inserted] = by_student.try_emplace(sessions[i].session.student_id);
    if (inserted) order.push_back(it->first);
    it->second.push_back(i);
  }
  const auto predictions =
      predict(result.bundle.model, transform(result.bundle.scaler, ds.features));
  StudentLevelSummary summary;
  summary.students = order.size();
  std::size_t tally_hits = 0;
  std::size_t vote_hits = 0;
  for (const auto& id : order) {
    const auto& idx = by_student[id];
    std::size_t tally = 0;
    std::vector<StyleLabel> votes;
    std::vector<StyleLabel> truths;
    for (std::size_t i : idx) {
      if (sessions[i].session.visual_score > sessions[i].session.auditory_score) ++tally;
      votes.push_back(predictions[i] == 1 ? StyleLabel::visual : StyleLabel::auditory);
      truths.push_back(sessions[i].label);
    }
    const StyleLabel truth = aggregate_sessions(truths);
    if (style_ratio_label(tally, idx.size()) == truth) ++tally_hits;
    if (aggregate_sessions(votes) == truth) ++vote_hits;
  }
  const auto n_students = static_cast<double>(order.size());
  summary.tally_rule_accuracy = static_cast<double>(tally_hits) / n_students;
  summary.model_vote_accuracy = static_cast<double>(vote_hits) / n_students;
  result.report.students = summary;
  return result;
}

CaseStudyResult run_style_experiment(const StyleGenConfig& gen, const OptimizerConfig& opt,
                                     const SplitSpec& split) {
  const auto sessions = generate_style_sessions(gen);
  return run_style_sessions(sessions, opt, split, DataSource::synthetic);
}

}  // namespace edulearn
