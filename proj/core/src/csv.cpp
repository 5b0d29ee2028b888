#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "valtree/dataset.hpp"
#include "valtree/error.hpp"

namespace valtree::data {
namespace {

// Splits one CSV record. Handles RFC 4180 quoting, including quoted commas
// and doubled quotes; embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos && (s.empty() || (s.front() != ' ' && s.back() != ' ')))
    return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

struct ColumnBuilder {
  const VariableSpec* spec = nullptr;
  std::size_t field = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> missing;
  std::vector<std::int32_t> codes;
  std::vector<std::string> levels;
  std::unordered_map<std::string, std::int32_t> level_index;
};

}  // namespace

DataTable read_table(std::istream& in, const Schema& schema, std::string provenance) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::parse, provenance + ": empty file");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
    line.erase(0, 3);
  std::vector<std::string> header = split_record(line);
  for (auto& h : header) h = std::string(trim(h));

  std::vector<ColumnBuilder> builders;
  for (std::size_t f = 0; f < header.size(); ++f) {
    const VariableSpec* spec = schema.find(header[f]);
    if (spec == nullptr) continue;
    for (const auto& b : builders)
      if (b.spec == spec) throw Error(ErrorCode::schema, "column '" + header[f] + "' appears twice");
    ColumnBuilder b;
    b.spec = spec;
    b.field = f;
    builders.push_back(std::move(b));
  }
  for (const auto& v : schema.variables()) {
    bool found = false;
    for (const auto& b : builders) found = found || b.spec == &v;
    if (!found)
      throw Error(ErrorCode::schema, "schema variable '" + v.name + "' is not a column of " + provenance);
  }

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_record(line);
    if (fields.size() != header.size())
      throw Error(ErrorCode::parse, "row " + std::to_string(row) + ": expected " +
                                        std::to_string(header.size()) + " fields, found " +
                                        std::to_string(fields.size()));
    for (auto& b : builders) {
      const std::string_view cell = trim(fields[b.field]);
      if (b.spec->kind == VariableKind::categorical) {
        if (cell.empty()) {
          b.codes.push_back(-1);
          continue;
        }
        std::string key(cell);
        auto [it, inserted] = b.level_index.try_emplace(key, static_cast<std::int32_t>(b.levels.size()));
        if (inserted) b.levels.push_back(key);
        b.codes.push_back(it->second);
        continue;
      }
      if (cell.empty()) {
        b.values.push_back(std::nan(""));
        b.missing.push_back(1);
        continue;
      }
      double v = 0.0;
      if (!parse_double(cell, v))
        throw Error(ErrorCode::parse, "row " + std::to_string(row) + ", column \"" + b.spec->name +
                                          "\": cannot parse '" + std::string(cell) + "' as a number");
      b.values.push_back(v);
      b.missing.push_back(0);
    }
  }

  std::vector<Column> columns;
  for (auto& b : builders) {
    if (b.spec->kind == VariableKind::categorical) {
      columns.push_back(Column::categorical(b.spec->name, std::move(b.levels), std::move(b.codes), b.spec->units));
    } else {
      columns.push_back(Column::numeric(b.spec->name, b.spec->kind, std::move(b.values),
                                        std::move(b.missing), b.spec->units));
    }
  }
  return DataTable(std::move(columns), std::move(provenance));
}

DataTable load_table(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open data file " + path.string());
  return read_table(in, schema, path.string());
}

void write_csv(const DataTable& table, std::ostream& out) {
  for (std::size_t j = 0; j < table.cols(); ++j) {
    if (j) out << ',';
    out << quote_if_needed(table.column(j).name());
  }
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t j = 0; j < table.cols(); ++j) {
      if (j) out << ',';
      const Column& c = table.column(j);
      if (c.missing(r)) continue;
      if (c.is_categorical())
        out << quote_if_needed(c.level(r));
      else
        out << format_double(c.value(r));
    }
    out << '\n';
  }
}

void write_csv(const DataTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  write_csv(table, out);
}

}  // namespace valtree::data
