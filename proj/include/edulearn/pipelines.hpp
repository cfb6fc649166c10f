#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "edulearn/classify.hpp"
#include "edulearn/data.hpp"
#include "edulearn/numcore.hpp"

namespace edulearn {

// ---------------------------------------------------------------------------
// Learning-style identification

enum class StyleLabel : int { auditory = 0, visual = 1 };
enum class StageLabel { beginner, advanced };
enum class TrackRecommendation { beginner_track, advanced_track };

std::string_view to_string(StyleLabel label);
std::string_view to_string(StageLabel label);
std::string_view to_string(TrackRecommendation rec);

/// One assessment session of one student with one instructor.
struct StyleSession {
  std::string student_id;
  std::string instructor_id;
  std::size_t day = 1;
  double visual_score = 0.0;    ///< [0, 100], after visual material
  double auditory_score = 0.0;  ///< [0, 100], after auditory material
  double comprehension_time = 1.0;  ///< minutes, > 0
  int prior_preferred_style = 0;    ///< self-reported, 0 auditory / 1 visual
  double time_of_day = 9.0;         ///< hour in [0, 24)
  double instructor_score = 5.0;    ///< [0, 10]
  double lesson_duration = 45.0;    ///< minutes, > 0

  /// Throws ParameterError when a field is out of range.
  void validate() const;
};

struct LabeledSession {
  StyleSession session;
  StyleLabel label = StyleLabel::auditory;
};

/// Planted generator for classroom sessions. Each student is visual with
/// probability `visual_fraction`. Per session the score for the student's
/// own modality has mean 80 and the other mean 55, both with Gaussian noise
/// of `noise_std`, clamped to [0, 100]. Other fields:
///   comprehension_time  uniform [10, 60) minutes
///   prior_preferred_style  equals the latent style with probability 0.6
///   time_of_day  uniform [8, 18) hours
///   instructor_score  uniform [5, 10)
///   lesson_duration  uniform [30, 90) minutes
/// Instructors rotate over three ids; `day` counts sessions from 1.
struct StyleGenConfig {
  std::size_t n_students = 200;
  std::size_t sessions_per_student = 5;
  double visual_fraction = 0.5;
  double noise_std = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr double kPlantedMatchingMean = 80.0;
inline constexpr double kPlantedOtherMean = 55.0;

std::vector<LabeledSession> generate_style_sessions(const StyleGenConfig& cfg);

/// Visual iff tally / total > 0.65 (strict).
StyleLabel style_ratio_label(std::size_t visual_high_tally, std::size_t total_assessments);

/// Majority vote; ties go to auditory.
StyleLabel aggregate_sessions(std::span<const StyleLabel> labels);
StyleLabel aggregate_sessions(std::span<const LabeledSession> sessions);

/// Initial gate then advanced probe. `advanced_score` must be present exactly
/// when the initial score passes the threshold.
StageLabel route_learner_stage(double initial_score, std::optional<double> advanced_score,
                               double pass_threshold = 70.0);

struct ClassLevelSummary {
  double beginner_fraction = 0.0;
  double advanced_fraction = 0.0;
  TrackRecommendation recommendation = TrackRecommendation::beginner_track;
};

/// Advanced track only when strictly more than half the class is advanced.
ClassLevelSummary class_level_summary(std::span<const StageLabel> stages);

/// Feature order of the style design matrix.
inline constexpr std::array<std::string_view, 6> kStyleFeatureNames = {
    "score_difference", "comprehension_time", "prior_preferred_style",
    "time_of_day",      "instructor_score",   "lesson_duration"};

/// Six columns: visual minus auditory score, then the five other predictors.
DenseMatrix style_design_matrix(std::span<const LabeledSession> sessions);

/// CSV layout for sessions: ids and day are carried but not used as features.
Schema style_schema();
RawTable style_sessions_table(std::span<const LabeledSession> sessions);
/// Reads sessions back; every column of style_schema() is required.
std::vector<LabeledSession> style_sessions_from_table(const RawTable& table);
/// Design matrix straight from a table; the label column is optional.
DenseMatrix style_design_from_table(const RawTable& table);

// ---------------------------------------------------------------------------
// Case studies

enum class DataSource { external, synthetic };
std::string_view to_string(DataSource source);

/// Per-student checks for the style task over all sessions.
struct StudentLevelSummary {
  std::size_t students = 0;
  /// Accuracy of the 65% tally rule (tally = sessions with visual > auditory).
  double tally_rule_accuracy = 0.0;
  /// Accuracy of the majority vote over the model's per-session predictions.
  double model_vote_accuracy = 0.0;
};

struct CaseStudyReport {
  std::string task;  ///< "style" or "academic"
  Solver solver = Solver::lbfgs;
  DataSource data_source = DataSource::synthetic;
  SplitSpec split;
  OptimizerConfig config_echo;
  std::vector<std::string> class_names;
  std::vector<std::size_t> class_distribution;  ///< training rows per class
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t n_features = 0;
  MetricsReport train_metrics;
  MetricsReport test_metrics;
  /// Test accuracy of the ground-truth model, synthetic academic data only.
  std::optional<double> planted_test_accuracy;
  std::optional<StudentLevelSummary> students;
};

/// Everything needed to score new raw rows.
struct ModelBundle {
  std::string task;
  LogisticModel model;
  ScalerParams scaler;
  std::vector<std::string> feature_names;
  Schema input_schema;  ///< resolved: categorical levels filled in
  OptimizerConfig config;
};

struct CaseStudyResult {
  CaseStudyReport report;
  ModelBundle bundle;
};

/// Defaults for the style task: L-BFGS, l2 = 0.1.
OptimizerConfig default_style_optimizer();
/// Defaults for the academic task: lbfgs with max_iter 1000, sgd with
/// learning rate 0.01 and 100 epochs; l2 = 1e-4 for both.
OptimizerConfig default_academic_optimizer(Solver solver);

CaseStudyResult run_style_experiment(const StyleGenConfig& gen, const OptimizerConfig& opt,
                                     const SplitSpec& split);
CaseStudyResult run_style_sessions(std::span<const LabeledSession> sessions,
                                   const OptimizerConfig& opt, const SplitSpec& split,
                                   DataSource source);

inline constexpr std::size_t kAcademicPredictors = 35;
inline constexpr std::array<double, 3> kAcademicPrior = {0.474, 0.331, 0.195};

/// Class order of the academic target.
std::vector<std::string> academic_class_names();
/// Schema of the synthetic academic table: 35 predictors plus "Target".
Schema academic_synthetic_schema();

struct AcademicSynthetic {
  RawTable table;
  Schema schema;
  Dataset dataset;
  /// Ground-truth class probabilities per row (rows × 3).
  DenseMatrix true_probabilities;
};

/// Planted three-class multinomial-logit generator (see academic.cpp for the
/// exact feature distributions and weights). Intercepts are calibrated so the
/// class prior is kAcademicPrior.
AcademicSynthetic generate_academic_table(std::size_t n_rows, std::uint64_t seed);
Dataset generate_academic_synthetic(std::size_t n_rows, std::uint64_t seed);

struct ExternalCsv {
  std::filesystem::path csv;
  std::filesystem::path schema;
};
struct SyntheticAcademic {
  std::size_t n_rows = 5000;
  std::uint64_t seed = 0;
};
using AcademicSource = std::variant<ExternalCsv, SyntheticAcademic>;

CaseStudyResult run_academic_case_study(const AcademicSource& source, const SplitSpec& split,
                                        const OptimizerConfig& opt);

/// Unscaled design matrix for new raw rows under a trained bundle. Throws
/// SchemaError naming any missing or unexpected column.
DenseMatrix bundle_features(const ModelBundle& bundle, const RawTable& table);

}  // namespace edulearn
