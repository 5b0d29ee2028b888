#include <algorithm>
#include <cmath>
#include <limits>

#include "valtree/dataset.hpp"
#include "valtree/error.hpp"

namespace valtree::data {

Column Column::numeric(std::string name, VariableKind kind, std::vector<double> values,
                       std::vector<std::uint8_t> missing, std::string units) {
  if (kind == VariableKind::categorical)
    throw Error(ErrorCode::schema, "numeric column '" + name + "' declared categorical");
  if (missing.empty()) missing.assign(values.size(), 0);
  if (missing.size() != values.size())
    throw Error(ErrorCode::schema, "column '" + name + "': mask length differs from values");
  Column c;
  c.source_ = name;
  c.name_ = std::move(name);
  c.kind_ = kind;
  c.units_ = std::move(units);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) missing[i] = 1;
    if (missing[i]) values[i] = std::numeric_limits<double>::quiet_NaN();
  }
  c.values_ = std::move(values);
  c.missing_ = std::move(missing);
  return c;
}

Column Column::categorical(std::string name, std::vector<std::string> levels,
                           std::vector<std::int32_t> codes, std::string units) {
  Column c;
  c.source_ = name;
  c.name_ = std::move(name);
  c.kind_ = VariableKind::categorical;
  c.units_ = std::move(units);
  c.missing_.resize(codes.size());
  const auto n_levels = static_cast<std::int32_t>(levels.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i] >= n_levels || codes[i] < -1)
      throw Error(ErrorCode::schema, "column '" + c.name_ + "': level code out of range");
    c.missing_[i] = codes[i] < 0 ? 1 : 0;
  }
  c.codes_ = std::move(codes);
  c.levels_ = std::move(levels);
  return c;
}

std::size_t Column::missing_count() const {
  return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), 1));
}

const std::string& Column::level(std::size_t row) const {
  static const std::string empty;
  const auto c = codes_.at(row);
  return c < 0 ? empty : levels_[static_cast<std::size_t>(c)];
}

Column Column::renamed(std::string name) const {
  Column c = *this;
  c.name_ = std::move(name);
  return c;
}

Column Column::take(std::span<const std::size_t> rows) const {
  Column c;
  c.name_ = name_;
  c.source_ = source_;
  c.kind_ = kind_;
  c.transform_ = transform_;
  c.units_ = units_;
  c.levels_ = levels_;
  c.missing_.reserve(rows.size());
  if (is_categorical()) {
    c.codes_.reserve(rows.size());
    for (auto r : rows) c.codes_.push_back(codes_.at(r));
  } else {
    c.values_.reserve(rows.size());
    for (auto r : rows) c.values_.push_back(values_.at(r));
  }
  for (auto r : rows) c.missing_.push_back(missing_[r]);
  return c;
}

Column Column::with_transform(std::string name, Transform transform,
                              std::vector<double> values) const {
  Column c = *this;
  c.name_ = std::move(name);
  c.transform_ = transform;
  c.values_ = std::move(values);
  return c;
}

DataTable::DataTable(std::vector<Column> columns, std::string provenance)
    : provenance_(std::move(provenance)) {
  if (!columns.empty()) rows_ = columns.front().size();
  for (auto& col : columns) {
    if (col.size() != rows_)
      throw Error(ErrorCode::schema, "column '" + col.name() + "' has " +
                                         std::to_string(col.size()) + " rows, expected " +
                                         std::to_string(rows_));
    for (const auto& existing : columns_)
      if (existing->name() == col.name())
        throw Error(ErrorCode::schema, "duplicate column '" + col.name() + "'");
    columns_.push_back(std::make_shared<const Column>(std::move(col)));
  }
}

const Column* DataTable::find(std::string_view name) const {
  for (const auto& c : columns_)
    if (c->name() == name) return c.get();
  return nullptr;
}

const Column& DataTable::column(std::string_view name) const {
  if (const auto* c = find(name)) return *c;
  throw Error(ErrorCode::schema, "no column named '" + std::string(name) + "'");
}

std::vector<std::string> DataTable::column_names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c->name());
  return out;
}

std::string DataTable::resolve(std::string_view name) const {
  if (has_column(name)) return std::string(name);
  std::string logged = std::string(kLogPrefix) + std::string(name);
  if (has_column(logged)) return logged;
  throw Error(ErrorCode::schema, "no column named '" + std::string(name) + "'");
}

DataTable DataTable::select_rows(std::span<const std::size_t> rows) const {
  DataTable out;
  out.provenance_ = provenance_;
  out.rows_ = rows.size();
  for (const auto& c : columns_) out.columns_.push_back(std::make_shared<const Column>(c->take(rows)));
  return out;
}

DataTable DataTable::with_column(Column column) const {
  if (!columns_.empty() && column.size() != rows_)
    throw Error(ErrorCode::schema, "column '" + column.name() + "' length differs from table");
  DataTable out = *this;
  if (out.columns_.empty()) out.rows_ = column.size();
  auto ptr = std::make_shared<const Column>(std::move(column));
  for (auto& c : out.columns_) {
    if (c->name() == ptr->name()) {
      c = ptr;
      return out;
    }
  }
  out.columns_.push_back(std::move(ptr));
  return out;
}

DataTable apply_transforms(const DataTable& table, const Schema& schema) {
  std::vector<Column> cols;
  cols.reserve(table.cols());
  for (std::size_t j = 0; j < table.cols(); ++j) {
    const Column& col = table.column(j);
    const VariableSpec* spec = schema.find(col.name());
    if (spec == nullptr || spec->transform == Transform::none || col.is_categorical() ||
        col.transform() != Transform::none) {
      cols.push_back(col);
      continue;
    }
    std::vector<double> logged(col.size());
    for (std::size_t r = 0; r < col.size(); ++r) {
      if (col.missing(r)) {
        logged[r] = col.value(r);
        continue;
      }
      const double v = col.value(r);
      if (!(v > 0.0))
        throw Error(ErrorCode::domain, "natural_log of nonpositive value " + std::to_string(v) +
                                           " at row " + std::to_string(r + 1) + ", variable '" +
                                           col.name() + "'");
      logged[r] = std::log(v);
    }
    cols.push_back(col.with_transform(std::string(kLogPrefix) + col.name(), Transform::natural_log,
                                      std::move(logged)));
  }
  return DataTable(std::move(cols), table.provenance());
}

DataTable complete_cases(const DataTable& table, std::span<const std::string> vars) {
  std::vector<const Column*> used;
  for (const auto& v : vars) used.push_back(&table.column(table.resolve(v)));
  std::vector<std::size_t> keep;
  keep.reserve(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    bool ok = true;
    for (const auto* c : used) {
      if (c->missing(r)) {
        ok = false;
        break;
      }
    }
    if (ok) keep.push_back(r);
  }
  if (keep.size() == table.rows()) return table;
  return table.select_rows(keep);
}

}  // namespace valtree::data

namespace valtree::data {

Record record_at(const DataTable& table, std::size_t row) {
  Record rec;
  for (std::size_t j = 0; j < table.cols(); ++j) {
    const Column& c = table.column(j);
    if (c.missing(row)) {
      rec.emplace(c.name(), std::monostate{});
    } else if (c.is_categorical()) {
      rec.emplace(c.name(), c.level(row));
    } else {
      rec.emplace(c.name(), c.value(row));
    }
  }
  return rec;
}

Record record_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::parse, "record must be a JSON object");
  Record rec;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_null()) {
      rec.emplace(key, std::monostate{});
    } else if (value.is_number()) {
      rec.emplace(key, value.get<double>());
    } else if (value.is_string()) {
      rec.emplace(key, value.get<std::string>());
    } else {
      throw Error(ErrorCode::parse, "record field '" + key + "' must be a number, string or null");
    }
  }
  return rec;
}

std::optional<double> numeric_value(const Record& record, std::string_view column,
                                    std::string_view source, Transform transform) {
  auto read = [&](std::string_view key) -> std::optional<double> {
    auto it = record.find(key);
    if (it == record.end() || std::holds_alternative<std::monostate>(it->second)) return std::nullopt;
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    throw Error(ErrorCode::parse, "record field '" + std::string(key) + "' must be numeric");
  };
  if (record.find(column) != record.end()) return read(column);
  if (transform == Transform::none || source.empty() || source == column) return std::nullopt;
  auto raw = read(source);
  if (!raw) return std::nullopt;
  if (!(*raw > 0.0))
    throw Error(ErrorCode::domain, "natural_log of nonpositive value " + std::to_string(*raw) +
                                       " in record field '" + std::string(source) + "'");
  return std::log(*raw);
}

std::optional<std::string> level_value(const Record& record, std::string_view column) {
  auto it = record.find(column);
  if (it == record.end() || std::holds_alternative<std::monostate>(it->second)) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  // Numeric codes in JSON records are read as their text form.
  const double d = std::get<double>(it->second);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return std::string(buf);
}

}  // namespace valtree::data
