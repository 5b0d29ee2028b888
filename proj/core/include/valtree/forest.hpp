#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "valtree/cart.hpp"
#include "valtree/dataset.hpp"

namespace valtree::forest {

// Per-variable category ceiling of the common random-forest implementations.
inline constexpr std::size_t kDefaultMaxCategories = 53;

struct ForestOptions {
  std::size_t n_trees = 500;
  // Candidate variables per split; required, 1 <= mtry <= predictors.
  std::size_t mtry = 0;
  // Members use minbucket and max_depth from here, cp 0 and minsplit 2 * minbucket.
  cart::GrowthControls controls;
  std::uint64_t seed = 0;
  std::size_t max_categories = kDefaultMaxCategories;
  std::size_t threads = 1;
  // Test hook: when false every tree trains on the rows in order.
  bool bootstrap = true;
};

struct ForestModel {
  std::size_t n_trees = 0;
  std::size_t mtry = 0;
  std::uint64_t seed = 0;
  std::size_t max_categories = kDefaultMaxCategories;
  std::vector<cart::RegressionTree> trees;
  // Rows drawn for each tree, in draw order.
  std::vector<std::vector<std::uint32_t>> bootstrap_rows;
  std::string response;
  data::Transform response_transform = data::Transform::none;
  std::vector<std::string> predictors;
  std::size_t n_rows = 0;
  double oob_mse = 0.0;
  double pct_var_explained = 0.0;
  std::size_t oob_scored = 0;
  std::size_t oob_skipped = 0;
  std::vector<std::string> warnings;
};

ForestModel fit_forest(const data::DataTable& table, std::string_view response,
                       std::span<const std::string> predictors, const ForestOptions& options);

struct OobStats {
  double oob_mse = 0.0;
  double pct_var_explained = 0.0;
  std::size_t scored = 0;
  std::size_t skipped = 0;
};

// Rows must be those the forest was trained on, in the same order. Rows
// in-bag for every tree are skipped and counted.
OobStats oob_stats(const ForestModel& model, const data::DataTable& table, std::string_view response);

struct ForestPrediction {
  double value = 0.0;
  double valuation = 0.0;
  bool routed_missing = false;
  bool unseen_level = false;
};

// Mean of the member-tree predictions, summed in tree order.
ForestPrediction predict_forest(const ForestModel& model, const data::Record& record);

nlohmann::json forest_summary_json(const ForestModel& model);
nlohmann::json forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const nlohmann::json& doc);

}  // namespace valtree::forest
