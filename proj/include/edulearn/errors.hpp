#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace edulearn {

/// Base of every error raised by the library. `name()` is the stable,
/// machine-readable identifier printed by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& message)
      : std::runtime_error(message), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message) : Error("dimension_error", message) {}
};

class SingularityError : public Error {
 public:
  SingularityError(std::size_t pivot, const std::string& message)
      : Error("singularity_error", message), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& message) : Error("parameter_error", message) {}
};

class SchemaError : public Error {
 public:
  SchemaError(std::string column, const std::string& message)
      : Error("schema_error", message), column_(std::move(column)) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& message)
      : Error("parse_error", message), row_(row), column_(std::move(column)) {}
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class LabelError : public Error {
 public:
  explicit LabelError(const std::string& message) : Error("label_error", message) {}
};

class SplitError : public Error {
 public:
  explicit SplitError(const std::string& message) : Error("split_error", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io_error", message) {}
};

class DegeneratePredictorError : public Error {
 public:
  explicit DegeneratePredictorError(const std::string& message)
      : Error("degenerate_predictor_error", message) {}
};

class DegenerateTargetError : public Error {
 public:
  explicit DegenerateTargetError(const std::string& message)
      : Error("degenerate_target_error", message) {}
};

/// Line search could not find a decrease. Carries the parameters reached.
class StalledDescentError : public Error {
 public:
  StalledDescentError(std::vector<double> last_iterate, std::size_t iteration,
                      const std::string& message)
      : Error("stalled_descent_error", message),
        last_iterate_(std::move(last_iterate)),
        iteration_(iteration) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::vector<double> last_iterate_;
  std::size_t iteration_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, double learning_rate, const std::string& message)
      : Error("divergence_error", message), epoch_(epoch), learning_rate_(learning_rate) {}
  std::size_t epoch() const noexcept { return epoch_; }
  double learning_rate() const noexcept { return learning_rate_; }

 private:
  std::size_t epoch_;
  double learning_rate_;
};

}  // namespace edulearn
