#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "valtree/cart.hpp"
#include "valtree/forest.hpp"
#include "valtree/linmod.hpp"
#include "valtree/scorecard.hpp"

namespace valtree::report {

// Groups with fewer observations than this are flagged under FE tables.
inline constexpr std::size_t kSmallGroup = 5;

struct RegressionColumn {
  std::string name;
  linmod::LinearFit fit;
  // Set for fixed-effects columns; `fit` then holds the slope estimates.
  std::optional<linmod::FixedEffectsFit> fixed_effects;
};

RegressionColumn ols_column(std::string name, const linmod::LinearFit& fit);
RegressionColumn fe_column(std::string name, const linmod::FixedEffectsFit& fit);

// "coef<stars> [se]" with 4-decimal coefficients and 3-decimal errors.
std::string format_cell(double coefficient, double std_error, double p_value);

std::string render_regression_table(std::span<const RegressionColumn> columns);
nlohmann::json regression_table_json(std::span<const RegressionColumn> columns);

std::string render_cp_table(const cart::CpTable& cp, std::span<const cart::Importance> importance,
                            std::string_view title = {});
nlohmann::json cp_report_json(const cart::CpTable& cp, std::span<const cart::Importance> importance,
                              std::string_view title = {});

std::string render_forest_summary(const forest::ForestModel& model);

std::string render_block_scorecard(const scorecard::BlockScorecard& card);
std::string render_segment_scorecard(const scorecard::SegmentScorecard& card);

// Split condition as shown in dendrograms, e.g. "x ≤ 2.5" or "sector ∈ {A, B}".
std::string split_label(const cart::RegressionTree& tree, const cart::Split& split);
std::string export_tree_dot(const cart::RegressionTree& tree);

enum class Family { ols, fixed_effects, cart, forest, scorecard };

std::string_view to_string(Family family);
Family parse_family(std::string_view text);

struct ComparisonRow {
  std::string name;
  Family family = Family::ols;
  // R² for linear models, 1 - rel error for trees, % var explained / 100 for forests.
  double fit = 0.0;
  std::size_t n = 0;
  std::vector<std::string> categories;
  // Tree using only categorical predictors.
  bool categorical_only = false;
  // Fixed effects on a joint category.
  bool joint = false;
  std::size_t n_groups = 0;
};

ComparisonRow row_from_ols(std::string name, const linmod::LinearFit& fit, std::vector<std::string> categories = {});
ComparisonRow row_from_fe(std::string name, const linmod::FixedEffectsFit& fit, std::vector<std::string> categories,
                          bool joint);
ComparisonRow row_from_tree(std::string name, const cart::RegressionTree& tree, std::vector<std::string> categories,
                            bool categorical_only);
ComparisonRow row_from_forest(std::string name, const forest::ForestModel& model,
                              std::vector<std::string> categories = {});

struct Comparison {
  // Sorted by fit descending, ties by name.
  std::vector<ComparisonRow> rows;
  // A categorical-only tree ties or beats a joint fixed-effects regression.
  bool h3_contrast = false;
  std::string text;
  nlohmann::json json;
};

Comparison compare_models(std::vector<ComparisonRow> rows);

}  // namespace valtree::report
