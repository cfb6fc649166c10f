#include "edulearn/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "edulearn/errors.hpp"
#include "edulearn/random.hpp"

namespace edulearn {

using nlohmann::json;

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::target: return "target";
    case ColumnKind::ignored: return "ignored";
  }
  return "numeric";
}

ColumnKind column_kind_from_string(std::string_view text) {
  if (text == "numeric") return ColumnKind::numeric;
  if (text == "categorical") return ColumnKind::categorical;
  if (text == "target") return ColumnKind::target;
  if (text == "ignored") return ColumnKind::ignored;
  throw SchemaError(std::string(text), "unknown column kind '" + std::string(text) + "'");
}

void Schema::validate() const {
  std::set<std::string> names;
  std::size_t targets = 0;
  for (const auto& c : columns) {
    if (c.name.empty()) throw SchemaError(c.name, "column with empty name");
    if (!names.insert(c.name).second) {
      throw SchemaError(c.name, "duplicate column '" + c.name + "' in schema");
    }
    if (c.kind == ColumnKind::target) ++targets;
    if (c.allowed_values) {
      if (c.kind != ColumnKind::categorical && c.kind != ColumnKind::target) {
        throw SchemaError(c.name, "allowed_values given for non-categorical column '" + c.name + "'");
      }
      if (c.allowed_values->empty()) {
        throw SchemaError(c.name, "allowed_values of column '" + c.name + "' is empty");
      }
      std::set<std::string> seen;
      for (const auto& v : *c.allowed_values) {
        if (!seen.insert(v).second) {
          throw SchemaError(c.name, "allowed_values of column '" + c.name + "' repeats '" + v + "'");
        }
      }
    }
  }
  if (targets != 1) {
    throw SchemaError("", "schema must have exactly one target column, found " +
                              std::to_string(targets));
  }
}

const ColumnSchema& Schema::target() const {
  for (const auto& c : columns)
    if (c.kind == ColumnKind::target) return c;
  throw SchemaError("", "schema has no target column");
}

const ColumnSchema* Schema::find(std::string_view name) const {
  for (const auto& c : columns)
    if (c.name == name) return &c;
  return nullptr;
}

Schema parse_schema(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("schema is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version") || !doc.contains("columns")) {
    throw SchemaError("", "schema needs 'schema_version' and 'columns'");
  }
  if (doc["schema_version"] != Schema::kVersion) {
    throw SchemaError("", "unsupported schema_version " + doc["schema_version"].dump());
  }
  Schema schema;
  try {
    for (const auto& col : doc.at("columns")) {
      ColumnSchema c;
      c.name = col.at("name").get<std::string>();
      c.kind = column_kind_from_string(col.at("kind").get<std::string>());
      if (col.contains("allowed_values")) {
        c.allowed_values = col["allowed_values"].get<std::vector<std::string>>();
      }
      schema.columns.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw SchemaError("", std::string("malformed schema column: ") + e.what());
  }
  schema.validate();
  return schema;
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open schema file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_schema(buffer.str());
}

std::string format_schema(const Schema& schema) {
  json cols = json::array();
  for (const auto& c : schema.columns) {
    json col = {{"name", c.name}, {"kind", std::string(to_string(c.kind))}};
    if (c.allowed_values) col["allowed_values"] = *c.allowed_values;
    cols.push_back(std::move(col));
  }
  json doc = {{"schema_version", Schema::kVersion}, {"columns", std::move(cols)}};
  return doc.dump(2) + "\n";
}

std::optional<std::size_t> RawTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

RawTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // Blank lines carry no data.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !field.empty()) {
          throw ParseError(line, "", "stray quote inside unquoted field on line " + std::to_string(line));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError(line, "", "unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  if (records.empty()) throw ParseError(0, "", "CSV has no header row");
  RawTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw ParseError(r, "", "row " + std::to_string(r) + " has " +
                                  std::to_string(records[r].size()) + " cells, header has " +
                                  std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

RawTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CSV file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

namespace {

void append_csv_field(std::string& out, const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    out += field;
    return;
  }
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
}

void append_csv_record(std::string& out, const std::vector<std::string>& record) {
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (i) out.push_back(',');
    append_csv_field(out, record[i]);
  }
  out.push_back('\n');
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view cell, std::size_t row, const std::string& column) {
  const std::string_view t = trim(cell);
  if (t.empty()) {
    throw ParseError(row, column, "missing value in row " + std::to_string(row) + ", column '" +
                                      column + "'");
  }
  double value = 0.0;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw ParseError(row, column, "cannot parse '" + std::string(t) + "' as a number in row " +
                                      std::to_string(row) + ", column '" + column + "'");
  }
  return value;
}

std::vector<std::string> observed_levels(const RawTable& table, std::size_t col) {
  std::vector<std::string> levels;
  std::set<std::string> seen;
  for (const auto& row : table.rows) {
    const std::string v(trim(row[col]));
    if (!v.empty() && seen.insert(v).second) levels.push_back(v);
  }
  return levels;
}

std::vector<std::size_t> header_positions(const RawTable& table, const Schema& schema,
                                          bool require_target) {
  std::map<std::string, std::size_t> header;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const std::string name(trim(table.header[i]));
    if (!header.emplace(name, i).second) {
      throw SchemaError(name, "column '" + name + "' appears twice in the header");
    }
  }
  std::vector<std::size_t> positions(schema.columns.size(), table.header.size());
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const auto& col = schema.columns[c];
    const auto it = header.find(col.name);
    if (it == header.end()) {
      if (col.kind == ColumnKind::target && !require_target) continue;
      throw SchemaError(col.name, "missing column '" + col.name + "'");
    }
    positions[c] = it->second;
    header.erase(it);
  }
  if (!header.empty()) {
    const std::string extra = header.begin()->first;
    throw SchemaError(extra, "unexpected column '" + extra + "' not in schema");
  }
  return positions;
}

}  // namespace

std::string format_csv(const RawTable& table) {
  std::string out;
  append_csv_record(out, table.header);
  for (const auto& row : table.rows) append_csv_record(out, row);
  return out;
}

Schema resolve_schema(const RawTable& table, const Schema& schema, bool require_target) {
  schema.validate();
  const auto positions = header_positions(table, schema, require_target);
  Schema resolved = schema;
  for (std::size_t c = 0; c < resolved.columns.size(); ++c) {
    auto& col = resolved.columns[c];
    const bool encodes = col.kind == ColumnKind::categorical || col.kind == ColumnKind::target;
    if (!encodes || col.allowed_values || positions[c] == table.header.size()) continue;
    auto levels = observed_levels(table, positions[c]);
    if (levels.empty()) throw SchemaError(col.name, "column '" + col.name + "' has no values");
    col.allowed_values = std::move(levels);
  }
  return resolved;
}

std::vector<std::string> encoded_feature_names(const Schema& resolved) {
  std::vector<std::string> names;
  for (const auto& col : resolved.columns) {
    if (col.kind == ColumnKind::numeric) {
      names.push_back(col.name);
    } else if (col.kind == ColumnKind::categorical) {
      if (!col.allowed_values) throw SchemaError(col.name, "categorical column '" + col.name + "' is unresolved");
      for (const auto& v : *col.allowed_values) names.push_back(col.name + "=" + v);
    }
  }
  return names;
}

EncodedFeatures encode_features(const RawTable& table, const Schema& resolved) {
  const auto positions = header_positions(table, resolved, /*require_target=*/false);
  EncodedFeatures out;
  out.names = encoded_feature_names(resolved);
  out.features = DenseMatrix(table.rows.size(), out.names.size());

  std::size_t offset = 0;
  for (std::size_t c = 0; c < resolved.columns.size(); ++c) {
    const auto& col = resolved.columns[c];
    const std::size_t pos = positions[c];
    if (col.kind == ColumnKind::numeric) {
      for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out.features(r, offset) = parse_number(table.rows[r][pos], r + 1, col.name);
      }
      offset += 1;
    } else if (col.kind == ColumnKind::categorical) {
      const auto& levels = *col.allowed_values;
      std::map<std::string, std::size_t, std::less<>> index;
      for (std::size_t k = 0; k < levels.size(); ++k) index.emplace(levels[k], k);
      for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string_view v = trim(table.rows[r][pos]);
        if (v.empty()) {
          throw ParseError(r + 1, col.name, "missing value in row " + std::to_string(r + 1) +
                                                ", column '" + col.name + "'");
        }
        const auto it = index.find(v);
        if (it == index.end()) {
          throw LabelError("value '" + std::string(v) + "' in row " + std::to_string(r + 1) +
                           " is not a known level of column '" + col.name + "'");
        }
        out.features(r, offset + it->second) = 1.0;
      }
      offset += levels.size();
    }
  }
  return out;
}

Dataset encode_dataset(const RawTable& table, const Schema& schema) {
  const Schema resolved = resolve_schema(table, schema);
  auto encoded = encode_features(table, resolved);

  const auto positions = header_positions(table, resolved, /*require_target=*/true);
  std::size_t tpos = 0;
  for (std::size_t c = 0; c < resolved.columns.size(); ++c)
    if (resolved.columns[c].kind == ColumnKind::target) tpos = positions[c];
  const auto& classes = *resolved.target().allowed_values;

  Dataset ds;
  ds.features = std::move(encoded.features);
  ds.feature_names = std::move(encoded.names);
  ds.class_names = classes;
  ds.n_raw_columns = table.header.size();
  ds.targets.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string_view v = trim(table.rows[r][tpos]);
    const auto it = std::find(classes.begin(), classes.end(), v);
    if (it == classes.end()) {
      throw LabelError("target value '" + std::string(v) + "' in row " + std::to_string(r + 1) +
                       " is not one of the allowed classes");
    }
    ds.targets.push_back(static_cast<int>(it - classes.begin()));
  }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  return encode_dataset(read_csv(path), schema);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.features = features.select_rows(indices);
  out.targets.reserve(indices.size());
  for (std::size_t i : indices) out.targets.push_back(targets[i]);
  out.feature_names = feature_names;
  out.class_names = class_names;
  out.n_raw_columns = n_raw_columns;
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (int t : targets) ++counts[static_cast<std::size_t>(t)];
  return counts;
}

std::size_t train_size(std::size_t rows, double train_fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(rows) * train_fraction + 0.5));
}

std::vector<std::size_t> split_indices(std::size_t rows, const SplitSpec& spec,
                                       std::vector<std::size_t>* test_indices) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw SplitError("train_fraction must lie strictly between 0 and 1");
  }
  if (rows < 2) throw SplitError("need at least 2 rows to split, got " + std::to_string(rows));
  const std::size_t n_train = train_size(rows, spec.train_fraction);
  if (n_train < 1 || n_train >= rows) {
    throw SplitError("split of " + std::to_string(rows) + " rows leaves an empty side");
  }
  Rng rng(spec.seed);
  auto perm = permutation(rows, rng);
  if (test_indices) test_indices->assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  perm.resize(n_train);
  return perm;
}

TrainTestSplit split(const Dataset& ds, const SplitSpec& spec) {
  TrainTestSplit out;
  out.train_indices = split_indices(ds.rows(), spec, &out.test_indices);
  out.train = ds.subset(out.train_indices);
  out.test = ds.subset(out.test_indices);
  return out;
}

ScalerParams fit_scaler(const DenseMatrix& x) {
  if (x.rows() == 0 || x.cols() == 0) throw DimensionError("fit_scaler: empty matrix");
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  std::vector<double> means(p, 0.0);
  std::vector<double> stds(p, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < p; ++c) means[c] += row[c];
  }
  for (auto& m : means) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < p; ++c) {
      const double d = row[c] - means[c];
      stds[c] += d * d;
    }
  }
  for (auto& s : stds) {
    s = std::sqrt(s / static_cast<double>(n));
    if (s < 1e-12) s = 1.0;
  }
  return {DenseVector(std::move(means)), DenseVector(std::move(stds))};
}

DenseMatrix transform(const ScalerParams& p, const DenseMatrix& x) {
  if (x.cols() != p.means.size() || p.stds.size() != p.means.size()) {
    throw DimensionError("transform: matrix has " + std::to_string(x.cols()) +
                         " columns, scaler has " + std::to_string(p.means.size()));
  }
  DenseMatrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto src = x.row(r);
    auto dst = out.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) dst[c] = (src[c] - p.means[c]) / p.stds[c];
  }
  return out;
}

DenseMatrix inverse_transform(const ScalerParams& p, const DenseMatrix& x) {
  if (x.cols() != p.means.size() || p.stds.size() != p.means.size()) {
    throw DimensionError("inverse_transform: column count mismatch");
  }
  DenseMatrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto src = x.row(r);
    auto dst = out.row(r);
    for (std::size_t c = 0; c < x.cols(); ++c) dst[c] = src[c] * p.stds[c] + p.means[c];
  }
  return out;
}

}  // namespace edulearn
