#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edulearn/classify.hpp"
#include "edulearn/errors.hpp"
#include "edulearn/pipelines.hpp"
#include "edulearn/regress.hpp"
#include "edulearn/report.hpp"

namespace py = pybind11;
using namespace edulearn;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

DenseMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return DenseMatrix(rows, cols, std::vector<double>(a.data(), a.data() + a.size()));
}

DenseVector to_vector(const Array& a) {
  if (a.ndim() != 1) throw DimensionError("expected a 1-D array");
  return DenseVector(std::vector<double>(a.data(), a.data() + a.size()));
}

std::vector<int> to_labels(const IntArray& a) {
  if (a.ndim() != 1) throw DimensionError("expected a 1-D label array");
  return {a.data(), a.data() + a.size()};
}

Array from_matrix(const DenseMatrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

Array from_vector(const DenseVector& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::string dump(const nlohmann::json& j) { return j.dump(); }

OptimizerConfig make_config(OptimizerConfig cfg, const std::optional<std::string>& solver,
                            std::optional<std::size_t> max_iter, std::optional<std::size_t> epochs,
                            std::optional<double> learning_rate, std::optional<double> tol,
                            std::optional<double> l2, std::optional<double> l1,
                            std::optional<std::size_t> lbfgs_memory,
                            std::optional<std::uint64_t> seed) {
  if (solver) cfg.solver = solver_from_string(*solver);
  if (max_iter) cfg.max_iter = *max_iter;
  if (epochs) cfg.epochs = *epochs;
  if (learning_rate) cfg.learning_rate = *learning_rate;
  if (tol) cfg.tol = *tol;
  if (l2) cfg.l2 = *l2;
  if (l1) cfg.l1 = *l1;
  if (lbfgs_memory) cfg.lbfgs_memory = *lbfgs_memory;
  if (seed) cfg.seed = *seed;
  cfg.validate();
  return cfg;
}

// Case studies hand back the report and model documents as JSON text; the
// Python package parses them so both stay identical to the CLI files.
py::tuple case_study_result(const CaseStudyResult& r) {
  return py::make_tuple(dump(report_to_json(r.report)), dump(bundle_to_json(r.bundle)));
}

// Python mirror of the C++ error hierarchy, keyed by Error::name(). Leaked on
// purpose: destroying Python objects after interpreter shutdown crashes.
py::object* g_base_error = nullptr;
std::map<std::string, py::object>* g_error_classes = nullptr;

#define OPTIMIZER_ARGS                                                                      \
  py::arg("solver") = py::none(), py::arg("max_iter") = py::none(),                         \
  py::arg("epochs") = py::none(), py::arg("learning_rate") = py::none(),                    \
  py::arg("tol") = py::none(), py::arg("l2") = py::none(), py::arg("l1") = py::none(),      \
  py::arg("lbfgs_memory") = py::none(), py::arg("seed") = py::none()

}  // namespace

PYBIND11_MODULE(_edulearn, m) {
  m.doc() = "Native core of the edulearn toolkit.";

  g_base_error = new py::object(py::reinterpret_steal<py::object>(
      PyErr_NewException("edulearn._edulearn.EdulearnError", PyExc_RuntimeError, nullptr)));
  m.attr("EdulearnError") = *g_base_error;
  g_error_classes = new std::map<std::string, py::object>();
  for (const auto& [name, py_name] : std::vector<std::pair<std::string, std::string>>{
           {"dimension_error", "DimensionError"},
           {"singularity_error", "SingularityError"},
           {"parameter_error", "ParameterError"},
           {"schema_error", "SchemaError"},
           {"parse_error", "ParseError"},
           {"label_error", "LabelError"},
           {"split_error", "SplitError"},
           {"io_error", "IoError"},
           {"degenerate_predictor_error", "DegeneratePredictorError"},
           {"degenerate_target_error", "DegenerateTargetError"},
           {"stalled_descent_error", "StalledDescentError"},
           {"divergence_error", "DivergenceError"}}) {
    py::object cls = py::reinterpret_steal<py::object>(
        PyErr_NewException(("edulearn._edulearn." + py_name).c_str(), g_base_error->ptr(), nullptr));
    m.attr(py_name.c_str()) = cls;
    (*g_error_classes)[name] = cls;
  }
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const auto it = g_error_classes->find(e.name());
      PyErr_SetString(it != g_error_classes->end() ? it->second.ptr() : g_base_error->ptr(),
                      e.what());
    }
  });

  m.def("sigmoid", &sigmoid, py::arg("z"));

  py::class_<LinearModel>(m, "LinearModel")
      .def_readonly("intercept", &LinearModel::intercept)
      .def_property_readonly("coefficients",
                             [](const LinearModel& lm) { return from_vector(lm.coefficients); })
      .def_readonly("converged", &LinearModel::converged)
      .def_readonly("iterations", &LinearModel::iterations)
      .def("predict", [](const LinearModel& lm, const Array& x) {
        return from_vector(predict(lm, to_matrix(x)));
      });

  m.def("fit_simple", [](const Array& x, const Array& y) {
    return fit_simple(to_vector(x), to_vector(y));
  }, py::arg("x"), py::arg("y"));
  m.def("fit_multiple", [](const Array& x, const Array& y) {
    return fit_multiple(to_matrix(x), to_vector(y));
  }, py::arg("x"), py::arg("y"));
  m.def("fit_ridge", [](const Array& x, const Array& y, double lambda) {
    return fit_ridge(to_matrix(x), to_vector(y), lambda);
  }, py::arg("x"), py::arg("y"), py::arg("lam"));
  m.def("fit_lasso", [](const Array& x, const Array& y, double lambda, double tol,
                        std::size_t max_sweeps) {
    return fit_lasso(to_matrix(x), to_vector(y), lambda, tol, max_sweeps);
  }, py::arg("x"), py::arg("y"), py::arg("lam"), py::arg("tol") = 1e-8,
     py::arg("max_sweeps") = 10000);
  m.def("r_squared", [](const LinearModel& lm, const Array& x, const Array& y) {
    return r_squared(lm, to_matrix(x), to_vector(y));
  }, py::arg("model"), py::arg("x"), py::arg("y"));

  py::class_<LogisticModel>(m, "LogisticModel")
      .def_readonly("n_classes", &LogisticModel::n_classes)
      .def_readonly("class_names", &LogisticModel::class_names)
      .def_readonly("converged", &LogisticModel::converged)
      .def_readonly("iterations_used", &LogisticModel::iterations_used)
      .def_property_readonly("weights",
                             [](const LogisticModel& lm) { return from_matrix(lm.weights); })
      .def_property_readonly("intercepts",
                             [](const LogisticModel& lm) { return from_vector(lm.intercepts); })
      .def("predict_proba", [](const LogisticModel& lm, const Array& x) {
        return from_matrix(predict_proba(lm, to_matrix(x)));
      }, py::arg("x"))
      .def("predict", [](const LogisticModel& lm, const Array& x) {
        return predict(lm, to_matrix(x));
      }, py::arg("x"))
      .def("to_json", [](const LogisticModel& lm) { return dump(to_json(lm)); });

  m.def("fit_logistic",
        [](const Array& x, const IntArray& y, std::vector<std::string> class_names,
           const std::optional<std::string>& solver, std::optional<std::size_t> max_iter,
           std::optional<std::size_t> epochs, std::optional<double> learning_rate,
           std::optional<double> tol, std::optional<double> l2, std::optional<double> l1,
           std::optional<std::size_t> lbfgs_memory, std::optional<std::uint64_t> seed) {
          const auto cfg = make_config({}, solver, max_iter, epochs, learning_rate, tol, l2, l1,
                                       lbfgs_memory, seed);
          TrainingTrace trace;
          auto model = fit(to_matrix(x), to_labels(y), std::move(class_names), cfg, &trace);
          return py::make_tuple(std::move(model), trace.losses);
        },
        py::arg("x"), py::arg("y"), py::arg("class_names"), OPTIMIZER_ARGS);

  m.def("compute_metrics",
        [](const IntArray& y_true, const IntArray& y_pred, std::size_t n_classes) {
          std::vector<std::string> names;
          for (std::size_t k = 0; k < n_classes; ++k) names.push_back(std::to_string(k));
          return dump(to_json(compute_metrics(to_labels(y_true), to_labels(y_pred), n_classes), names));
        },
        py::arg("y_true"), py::arg("y_pred"), py::arg("n_classes"));

  m.def("style_ratio_label", [](std::size_t tally, std::size_t total) {
    return std::string(to_string(style_ratio_label(tally, total)));
  }, py::arg("visual_high_tally"), py::arg("total_assessments"));
  m.def("route_learner_stage",
        [](double initial, std::optional<double> advanced, double threshold) {
          return std::string(to_string(route_learner_stage(initial, advanced, threshold)));
        },
        py::arg("initial_score"), py::arg("advanced_score") = py::none(),
        py::arg("pass_threshold") = 70.0);
  m.def("class_level_summary", [](const std::vector<std::string>& stages) {
    std::vector<StageLabel> labels;
    for (const auto& s : stages) {
      if (s == "beginner") labels.push_back(StageLabel::beginner);
      else if (s == "advanced") labels.push_back(StageLabel::advanced);
      else throw ParameterError("unknown stage '" + s + "'");
    }
    const auto summary = class_level_summary(labels);
    return py::dict(py::arg("beginner_fraction") = summary.beginner_fraction,
                    py::arg("advanced_fraction") = summary.advanced_fraction,
                    py::arg("recommendation") = std::string(to_string(summary.recommendation)));
  }, py::arg("stages"));

  m.def("run_style_experiment",
        [](std::size_t n_students, std::size_t sessions_per_student, double visual_fraction,
           double noise_std, std::uint64_t seed, double train_fraction,
           const std::optional<std::string>& solver, std::optional<std::size_t> max_iter,
           std::optional<std::size_t> epochs, std::optional<double> learning_rate,
           std::optional<double> tol, std::optional<double> l2, std::optional<double> l1,
           std::optional<std::size_t> lbfgs_memory) {
          StyleGenConfig gen{n_students, sessions_per_student, visual_fraction, noise_std, seed};
          const auto cfg = make_config(default_style_optimizer(), solver, max_iter, epochs,
                                       learning_rate, tol, l2, l1, lbfgs_memory, seed);
          return case_study_result(run_style_experiment(gen, cfg, {train_fraction, seed}));
        },
        py::arg("n_students") = 200, py::arg("sessions_per_student") = 5,
        py::arg("visual_fraction") = 0.5, py::arg("noise_std") = 10.0, py::arg("seed") = 0,
        py::arg("train_fraction") = 0.7, py::arg("solver") = py::none(),
        py::arg("max_iter") = py::none(), py::arg("epochs") = py::none(),
        py::arg("learning_rate") = py::none(), py::arg("tol") = py::none(),
        py::arg("l2") = py::none(), py::arg("l1") = py::none(),
        py::arg("lbfgs_memory") = py::none());

  m.def("run_academic_case_study",
        [](std::size_t n_rows, std::uint64_t seed, double train_fraction,
           std::optional<std::filesystem::path> csv, std::optional<std::filesystem::path> schema,
           const std::string& solver, std::optional<std::size_t> max_iter,
           std::optional<std::size_t> epochs, std::optional<double> learning_rate,
           std::optional<double> tol, std::optional<double> l2, std::optional<double> l1,
           std::optional<std::size_t> lbfgs_memory) {
          const auto cfg = make_config(default_academic_optimizer(solver_from_string(solver)),
                                       solver, max_iter, epochs, learning_rate, tol, l2, l1,
                                       lbfgs_memory, seed);
          if (csv.has_value() != schema.has_value()) {
            throw ParameterError("csv and schema must be given together");
          }
          const AcademicSource source = csv ? AcademicSource(ExternalCsv{*csv, *schema})
                                            : AcademicSource(SyntheticAcademic{n_rows, seed});
          return case_study_result(run_academic_case_study(source, {train_fraction, seed}, cfg));
        },
        py::arg("n_rows") = 5000, py::arg("seed") = 0, py::arg("train_fraction") = 0.7,
        py::arg("csv") = py::none(), py::arg("schema") = py::none(),
        py::arg("solver") = "lbfgs", py::arg("max_iter") = py::none(),
        py::arg("epochs") = py::none(), py::arg("learning_rate") = py::none(),
        py::arg("tol") = py::none(), py::arg("l2") = py::none(), py::arg("l1") = py::none(),
        py::arg("lbfgs_memory") = py::none());
}
