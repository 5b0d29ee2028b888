#include <fstream>

#include "valtree/dataset.hpp"
#include "valtree/error.hpp"

namespace valtree::data {

std::string_view to_string(VariableKind kind) {
  switch (kind) {
    case VariableKind::response: return "response";
    case VariableKind::continuous: return "continuous";
    case VariableKind::categorical: return "categorical";
  }
  return "continuous";
}

std::string_view to_string(Transform transform) {
  return transform == Transform::natural_log ? "natural_log" : "none";
}

VariableKind parse_kind(std::string_view text) {
  if (text == "response") return VariableKind::response;
  if (text == "continuous") return VariableKind::continuous;
  if (text == "categorical") return VariableKind::categorical;
  throw Error(ErrorCode::schema, "unknown variable kind '" + std::string(text) + "'");
}

Transform parse_transform(std::string_view text) {
  if (text == "none") return Transform::none;
  if (text == "natural_log") return Transform::natural_log;
  throw Error(ErrorCode::schema, "unknown transform '" + std::string(text) + "'");
}

Schema::Schema(std::vector<VariableSpec> variables) : variables_(std::move(variables)) {
  int responses = 0;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (v.name.empty()) throw Error(ErrorCode::schema, "variable with empty name");
    for (std::size_t j = 0; j < i; ++j) {
      if (variables_[j].name == v.name)
        throw Error(ErrorCode::schema, "duplicate variable '" + v.name + "'");
    }
    if (v.kind == VariableKind::response) ++responses;
    if (v.kind == VariableKind::categorical && v.transform != Transform::none)
      throw Error(ErrorCode::schema,
                  "transform natural_log is not allowed on categorical '" + v.name + "'");
  }
  if (responses != 1)
    throw Error(ErrorCode::schema, "schema must declare exactly one response variable, found " +
                                       std::to_string(responses));
}

Schema Schema::from_json(const nlohmann::ordered_json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::schema, "schema document must be a JSON object");
  std::vector<VariableSpec> vars;
  for (const auto& [name, entry] : doc.items()) {
    if (!entry.is_object())
      throw Error(ErrorCode::schema, "schema entry '" + name + "' must be an object");
    VariableSpec spec;
    spec.name = name;
    spec.kind = parse_kind(entry.value("kind", std::string("continuous")));
    spec.transform = parse_transform(entry.value("transform", std::string("none")));
    spec.units = entry.value("units", std::string());
    vars.push_back(std::move(spec));
  }
  return Schema(std::move(vars));
}

Schema Schema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open schema file " + path.string());
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema, path.string() + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::ordered_json Schema::to_json() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& v : variables_) {
    doc[v.name] = {{"kind", to_string(v.kind)},
                   {"transform", to_string(v.transform)},
                   {"units", v.units}};
  }
  return doc;
}

const VariableSpec& Schema::response() const {
  for (const auto& v : variables_)
    if (v.kind == VariableKind::response) return v;
  throw Error(ErrorCode::schema, "schema has no response variable");
}

const VariableSpec* Schema::find(std::string_view name) const {
  for (const auto& v : variables_)
    if (v.name == name) return &v;
  return nullptr;
}

}  // namespace valtree::data
