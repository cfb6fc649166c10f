#include "case_study.hpp"

#include "edulearn/errors.hpp"

namespace edulearn {

std::string_view to_string(DataSource source) {
  return source == DataSource::external ? "external" : "synthetic";
}

namespace detail {

CaseStudyResult train_and_evaluate(const std::string& task, const Dataset& ds,
                                   const SplitSpec& split_spec, const OptimizerConfig& opt,
                                   DataSource source, TrainTestSplit* split_out) {
  opt.validate();
  TrainTestSplit parts = split(ds, split_spec);
  const ScalerParams scaler = fit_scaler(parts.train.features);
  const DenseMatrix x_train = transform(scaler, parts.train.features);
  const DenseMatrix x_test = transform(scaler, parts.test.features);

  CaseStudyResult result;
  auto& bundle = result.bundle;
  bundle.task = task;
  bundle.model = fit(x_train, parts.train.targets, ds.class_names, opt);
  bundle.scaler = scaler;
  bundle.feature_names = ds.feature_names;
  bundle.config = opt;

  auto& report = result.report;
  report.task = task;
  report.solver = opt.solver;
  report.data_source = source;
  report.split = split_spec;
  report.config_echo = opt;
  report.class_names = ds.class_names;
  report.class_distribution = parts.train.class_counts();
  report.train_rows = parts.train.rows();
  report.test_rows = parts.test.rows();
  report.n_features = ds.features.cols();
  const std::size_t k = ds.class_names.size();
  report.train_metrics = compute_metrics(parts.train.targets, predict(bundle.model, x_train), k);
  report.test_metrics = compute_metrics(parts.test.targets, predict(bundle.model, x_test), k);

  if (split_out) *split_out = std::move(parts);
  return result;
}

}  // namespace detail

DenseMatrix bundle_features(const ModelBundle& bundle, const RawTable& table) {
  DenseMatrix x;
  if (bundle.task == "style") {
    x = style_design_from_table(table);
  } else {
    auto encoded = encode_features(table, bundle.input_schema);
    if (encoded.names != bundle.feature_names) {
      throw SchemaError("", "encoded features do not match the model's feature list");
    }
    x = std::move(encoded.features);
  }
  if (x.cols() != bundle.model.n_features()) {
    throw SchemaError("", "input yields " + std::to_string(x.cols()) + " features, model expects " +
                              std::to_string(bundle.model.n_features()));
  }
  return x;
}

}  // namespace edulearn
