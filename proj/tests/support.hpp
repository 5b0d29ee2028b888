#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "valtree/cart.hpp"
#include "valtree/dataset.hpp"

namespace valtree::testing {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// NaN cells become missing.
inline data::Column num(std::string name, const std::vector<double>& values,
                        data::VariableKind kind = data::VariableKind::continuous) {
  std::vector<std::uint8_t> missing(values.size(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) missing[i] = std::isnan(values[i]) ? 1 : 0;
  return data::Column::numeric(std::move(name), kind, values, std::move(missing));
}

inline data::Column response(std::string name, const std::vector<double>& values) {
  return num(std::move(name), values, data::VariableKind::response);
}

// Empty strings become missing; levels in first-appearance order.
inline data::Column cat(std::string name, const std::vector<std::string>& values) {
  std::vector<std::string> levels;
  std::vector<std::int32_t> codes;
  for (const auto& v : values) {
    if (v.empty()) {
      codes.push_back(-1);
      continue;
    }
    auto it = std::find(levels.begin(), levels.end(), v);
    if (it == levels.end()) {
      levels.push_back(v);
      it = levels.end() - 1;
    }
    codes.push_back(static_cast<std::int32_t>(it - levels.begin()));
  }
  return data::Column::categorical(std::move(name), std::move(levels), std::move(codes));
}

inline data::DataTable table(std::vector<data::Column> columns) {
  return data::DataTable(std::move(columns), "test");
}

// x = (1,2,3,4), y = (0,0,10,10).
inline data::DataTable step_table() {
  return table({response("y", {0, 0, 10, 10}), num("x", {1, 2, 3, 4})});
}

inline cart::GrowthControls loose_controls(std::uint64_t seed = 1) {
  cart::GrowthControls c;
  c.minsplit = 2;
  c.minbucket = 1;
  c.cv_folds = 2;
  c.seed = seed;
  return c;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("valtree_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace valtree::testing
