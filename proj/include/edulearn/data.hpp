#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edulearn/numcore.hpp"

namespace edulearn {

enum class ColumnKind { numeric, categorical, target, ignored };

std::string_view to_string(ColumnKind kind);
ColumnKind column_kind_from_string(std::string_view text);

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  /// Categorical levels or target classes, in encoding order. When absent the
  /// observed values are used in order of first appearance.
  std::optional<std::vector<std::string>> allowed_values;

  bool operator==(const ColumnSchema&) const = default;
};

/// Ordered column list. Serialized as JSON:
///   {"schema_version": 1, "columns": [{"name": .., "kind": .., "allowed_values": [..]}]}
/// `kind` is one of numeric, categorical, target, ignored.
struct Schema {
  static constexpr int kVersion = 1;
  std::vector<ColumnSchema> columns;

  /// Throws SchemaError unless exactly one target exists, names are unique and
  /// allowed_values lists are non-empty and duplicate-free.
  void validate() const;
  const ColumnSchema& target() const;
  const ColumnSchema* find(std::string_view name) const;

  bool operator==(const Schema&) const = default;
};

Schema load_schema(const std::filesystem::path& path);
Schema parse_schema(std::string_view json_text);
std::string format_schema(const Schema& schema);

/// CSV contents as strings: header plus rows of equal width.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column_index(std::string_view name) const;
};

/// RFC-4180 style: comma delimiter, optional double-quote quoting with ""
/// escapes, LF or CRLF line endings, mandatory header row.
RawTable parse_csv(std::string_view text);
RawTable read_csv(const std::filesystem::path& path);
std::string format_csv(const RawTable& table);

struct Dataset {
  DenseMatrix features;
  std::vector<int> targets;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::size_t n_raw_columns = 0;

  std::size_t rows() const noexcept { return features.rows(); }
  Dataset subset(std::span<const std::size_t> indices) const;
  std::vector<std::size_t> class_counts() const;
};

/// Fills in observed categorical levels and target classes so the schema
/// fully describes the encoding. Also checks the header against the schema.
Schema resolve_schema(const RawTable& table, const Schema& schema, bool require_target = true);

struct EncodedFeatures {
  DenseMatrix features;
  std::vector<std::string> names;
};

/// Feature columns only; a target column in the table is ignored. Requires a
/// resolved schema (see resolve_schema).
EncodedFeatures encode_features(const RawTable& table, const Schema& resolved);
std::vector<std::string> encoded_feature_names(const Schema& resolved);

Dataset encode_dataset(const RawTable& table, const Schema& schema);
Dataset load_csv(const std::filesystem::path& path, const Schema& schema);

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
};

struct TrainTestSplit {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Number of training rows: floor(rows * fraction + 0.5).
std::size_t train_size(std::size_t rows, double train_fraction);
std::vector<std::size_t> split_indices(std::size_t rows, const SplitSpec& spec,
                                       std::vector<std::size_t>* test_indices);
TrainTestSplit split(const Dataset& ds, const SplitSpec& spec);

struct ScalerParams {
  DenseVector means;
  DenseVector stds;
};

/// Per-column mean and population standard deviation; columns with
/// std < 1e-12 get std = 1.
ScalerParams fit_scaler(const DenseMatrix& x);
DenseMatrix transform(const ScalerParams& p, const DenseMatrix& x);
DenseMatrix inverse_transform(const ScalerParams& p, const DenseMatrix& x);

}  // namespace edulearn
