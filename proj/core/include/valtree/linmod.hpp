#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "valtree/dataset.hpp"

namespace valtree::linmod {

// Where a design column came from: a numeric column, or one indicator level
// of a categorical column. The intercept has an empty column name.
struct TermSource {
  std::string column;
  std::string source;
  data::Transform transform = data::Transform::none;
  std::string level;
  bool indicator = false;
};

struct Design {
  std::vector<std::string> terms;
  std::vector<TermSource> sources;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  bool intercept = true;
  std::string response;
};

// Intercept first, then the numeric predictors in order, then k-1
// indicators per categorical with the first-appearing level as baseline.
// Rows must already be complete on every variable used.
Design encode_design(const data::DataTable& table, std::string_view response,
                     std::span<const std::string> predictors,
                     std::span<const std::string> dummies);

// Design row for one record. Categorical levels outside the indicator set
// (the baseline or unseen levels) encode as all-zero; a missing numeric
// value is a domain error.
Eigen::RowVectorXd encode_row(const Design& design, const data::Record& record);

struct LinearFit {
  std::vector<std::string> terms;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_values;
  std::vector<double> p_values;
  std::vector<std::string> dropped_terms;
  // Index into the design columns of each retained term.
  std::vector<std::size_t> kept_columns;
  std::size_t design_width = 0;
  std::size_t n = 0;
  std::size_t df_resid = 0;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  double sigma = 0.0;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  bool intercept = true;
  std::string response;

  // x must be a full design row (design_width entries); dropped columns are ignored.
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  Eigen::VectorXd predict_all(const Eigen::MatrixXd& x) const;
  double coefficient(std::string_view term) const;
};

struct OlsOptions {
  // Degrees of freedom consumed outside the design, e.g. absorbed group means.
  std::size_t absorbed_df = 0;
  // A column whose residual norm after projecting on the retained columns
  // falls below tolerance * its own norm is dropped as collinear.
  double collinearity_tolerance = 1e-7;
};

// Least squares by Householder QR, processing columns in design order so a
// column collinear with earlier ones is the one dropped.
LinearFit fit_ols(const Design& design, const OlsOptions& options = {});

// "***" p<0.01, "**" p<0.05, "*" p<0.1, otherwise empty.
std::string significance_stars(double p);

struct FixedEffectsFit {
  LinearFit base;
  std::string group_var;
  std::size_t n_groups = 0;
  double r2_within = 0.0;
  double r2_between = 0.0;
  double r2_overall = 0.0;
  std::vector<std::string> group_levels;
  std::vector<std::size_t> group_sizes;
  std::vector<double> group_intercepts;

  std::size_t small_groups(std::size_t threshold = 5) const;
};

// Within estimator: OLS without intercept on group-demeaned data. Rows
// missing the response, any slope or the group are dropped first.
FixedEffectsFit fit_fixed_effects(const data::DataTable& table, std::string_view response,
                                  std::span<const std::string> slopes, std::string_view group);

// Cross-product category of the given categoricals. Levels are member levels
// joined with "×", recorded in first-appearance order; only observed
// combinations become levels.
data::Column joint_category(const data::DataTable& table, std::span<const std::string> vars);

inline constexpr std::string_view kJointSeparator = "×";

}  // namespace valtree::linmod
