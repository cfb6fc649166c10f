#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edulearn/classify.hpp"
#include "edulearn/pipelines.hpp"
#include "edulearn/regress.hpp"

namespace edulearn {

inline constexpr int kReportVersion = 1;
inline constexpr int kModelVersion = 1;

nlohmann::json to_json(const OptimizerConfig& cfg);
OptimizerConfig optimizer_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MetricsReport& m, const std::vector<std::string>& class_names);

/// {model_type, class_names, n_features, weights (row-major), intercepts,
///  converged, iterations_used}
nlohmann::json to_json(const LogisticModel& m);
LogisticModel logistic_model_from_json(const nlohmann::json& j);

/// {intercept, coefficients, feature_names, fit: {lsr, r_squared}}
nlohmann::json to_json(const LinearModel& m, const std::vector<std::string>& feature_names,
                       const FitStat& fit);

/// Fig-6 style block: class distribution followed by train and test
/// accuracy / precision / recall / F1 (macro averages), percentages with two
/// decimals.
std::string format_text_block(const CaseStudyReport& report);

nlohmann::json report_to_json(const CaseStudyReport& report);

nlohmann::json bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const nlohmann::json& j);
ModelBundle load_bundle(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place, so a
/// failed write leaves no partial file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace edulearn
