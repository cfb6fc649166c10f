#pragma once

#include <string>

#include "edulearn/pipelines.hpp"

namespace edulearn::detail {

// split -> scaler fit on train rows -> train -> metrics on both sides.
CaseStudyResult train_and_evaluate(const std::string& task, const Dataset& ds,
                                   const SplitSpec& split_spec, const OptimizerConfig& opt,
                                   DataSource source, TrainTestSplit* split_out = nullptr);

}  // namespace edulearn::detail
