#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace valtree::data {

enum class VariableKind { response, continuous, categorical };
enum class Transform { none, natural_log };

std::string_view to_string(VariableKind kind);
std::string_view to_string(Transform transform);
VariableKind parse_kind(std::string_view text);
Transform parse_transform(std::string_view text);

// Column-name prefix given to a variable after the natural-log transform.
inline constexpr std::string_view kLogPrefix = "ln_";

struct VariableSpec {
  std::string name;
  VariableKind kind = VariableKind::continuous;
  Transform transform = Transform::none;
  std::string units;
};

// Declares the role of every column used by a model run. Exactly one
// variable is the response; log transforms only apply to numeric variables.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<VariableSpec> variables);

  // JSON object mapping variable name -> {kind, transform, units}; member
  // order is preserved.
  static Schema from_json(const nlohmann::ordered_json& doc);
  static Schema load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;

  const std::vector<VariableSpec>& variables() const { return variables_; }
  const VariableSpec& response() const;
  const VariableSpec* find(std::string_view name) const;

 private:
  std::vector<VariableSpec> variables_;
};

class Column {
 public:
  static Column numeric(std::string name, VariableKind kind, std::vector<double> values,
                        std::vector<std::uint8_t> missing, std::string units = {});
  // codes index into levels; -1 marks a missing cell.
  static Column categorical(std::string name, std::vector<std::string> levels,
                            std::vector<std::int32_t> codes, std::string units = {});

  const std::string& name() const { return name_; }
  VariableKind kind() const { return kind_; }
  bool is_categorical() const { return kind_ == VariableKind::categorical; }
  std::size_t size() const { return missing_.size(); }

  bool missing(std::size_t row) const { return missing_[row] != 0; }
  std::span<const std::uint8_t> missing_mask() const { return missing_; }
  std::size_t missing_count() const;

  // Numeric cells; missing cells hold NaN.
  double value(std::size_t row) const { return values_[row]; }
  std::span<const double> values() const { return values_; }

  std::int32_t code(std::size_t row) const { return codes_[row]; }
  std::span<const std::int32_t> codes() const { return codes_; }
  const std::vector<std::string>& levels() const { return levels_; }
  const std::string& level(std::size_t row) const;

  // Variable this column was derived from and the transform that produced it.
  const std::string& source() const { return source_; }
  Transform transform() const { return transform_; }
  const std::string& units() const { return units_; }

  Column renamed(std::string name) const;
  Column take(std::span<const std::size_t> rows) const;
  Column with_transform(std::string name, Transform transform, std::vector<double> values) const;

 private:
  Column() = default;

  std::string name_;
  std::string source_;
  VariableKind kind_ = VariableKind::continuous;
  Transform transform_ = Transform::none;
  std::string units_;
  std::vector<double> values_;
  std::vector<std::int32_t> codes_;
  std::vector<std::string> levels_;
  std::vector<std::uint8_t> missing_;
};

// Immutable columnar table. Copies share column storage.
class DataTable {
 public:
  DataTable() = default;
  DataTable(std::vector<Column> columns, std::string provenance);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  const std::string& provenance() const { return provenance_; }

  const Column& column(std::size_t index) const { return *columns_[index]; }
  const Column& column(std::string_view name) const;
  const Column* find(std::string_view name) const;
  bool has_column(std::string_view name) const { return find(name) != nullptr; }
  std::vector<std::string> column_names() const;

  // Maps a variable name to the column holding it: the name itself, or its
  // log-transformed counterpart when only that exists.
  std::string resolve(std::string_view name) const;

  DataTable select_rows(std::span<const std::size_t> rows) const;
  // Appends the column, or replaces an existing column of the same name.
  DataTable with_column(Column column) const;

 private:
  std::vector<std::shared_ptr<const Column>> columns_;
  std::size_t rows_ = 0;
  std::string provenance_;
};

// A single record keyed by variable or column name, used for prediction.
// Absent keys and std::monostate both mean missing.
using Cell = std::variant<std::monostate, double, std::string>;
using Record = std::map<std::string, Cell, std::less<>>;

Record record_at(const DataTable& table, std::size_t row);
// JSON object; null is missing, numbers and strings map to cells.
Record record_from_json(const nlohmann::json& doc);

// Numeric value of `column` in the record. Falls back to the raw `source`
// variable with `transform` applied, so raw records can feed models fitted
// on log columns. Nonpositive raw values under natural_log are a domain error.
std::optional<double> numeric_value(const Record& record, std::string_view column,
                                    std::string_view source, Transform transform);
std::optional<std::string> level_value(const Record& record, std::string_view column);

DataTable load_table(const std::filesystem::path& path, const Schema& schema);
DataTable read_table(std::istream& in, const Schema& schema, std::string provenance);
void write_csv(const DataTable& table, std::ostream& out);
void write_csv(const DataTable& table, const std::filesystem::path& path);

DataTable apply_transforms(const DataTable& table, const Schema& schema);
DataTable complete_cases(const DataTable& table, std::span<const std::string> vars);

struct PlantedCategorical {
  std::string name;
  int levels = 2;
  // Level effects are drawn N(0, effect_sd) from the seed unless given here.
  double effect_sd = 0.5;
  std::vector<double> effects;
};

struct SynthConfig {
  std::size_t n = 1000;
  double intercept = 6.0;
  double beta_revenue = 0.65;
  double beta_beta = 0.9;
  double beta_crp = -30.0;
  double noise_sd = 1.0;
  double revenue_missing_rate = 0.0;
  std::vector<PlantedCategorical> categoricals;

  void validate() const;
  static SynthConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

// Level effects actually planted by synth_deals for (config, seed), indexed
// [categorical][level number]; level k is named "<name>_NN" with NN = k+1
// zero-padded to two digits.
std::vector<std::vector<double>> planted_effects(const SynthConfig& config, std::uint64_t seed);

// Deal records with ln(valuation) = intercept + b1 ln(revenue) + b2 ln(beta)
// + b3 crp + category effects + N(0, noise_sd). Columns are in raw units.
DataTable synth_deals(const SynthConfig& config, std::uint64_t seed);
Schema synth_schema(const SynthConfig& config);

}  // namespace valtree::data
