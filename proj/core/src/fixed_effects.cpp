#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "valtree/error.hpp"
#include "valtree/linmod.hpp"

namespace valtree::linmod {
namespace {

// Squared Pearson correlation; zero when either side has no spread.
double squared_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() < 2) return 0.0;
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double saa = da.square().sum();
  const double sbb = db.square().sum();
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  const double sab = (da * db).sum();
  return std::clamp(sab * sab / (saa * sbb), 0.0, 1.0);
}

}  // namespace

std::size_t FixedEffectsFit::small_groups(std::size_t threshold) const {
  std::size_t count = 0;
  for (auto s : group_sizes) count += s < threshold ? 1 : 0;
  return count;
}

FixedEffectsFit fit_fixed_effects(const data::DataTable& table, std::string_view response,
                                  std::span<const std::string> slopes, std::string_view group) {
  std::vector<std::string> used{std::string(response), std::string(group)};
  used.insert(used.end(), slopes.begin(), slopes.end());
  const data::DataTable rows = data::complete_cases(table, used);

  const data::Column& g = rows.column(rows.resolve(group));
  if (!g.is_categorical()) throw Error(ErrorCode::schema, "group variable '" + g.name() + "' is not categorical");
  const data::Column& yc = rows.column(rows.resolve(response));
  std::vector<const data::Column*> xcols;
  for (const auto& s : slopes) {
    const data::Column& c = rows.column(rows.resolve(s));
    if (c.is_categorical()) throw Error(ErrorCode::schema, "slope variable '" + c.name() + "' is categorical");
    xcols.push_back(&c);
  }

  const std::size_t n = rows.rows();
  const std::size_t k = xcols.size();

  // Dense group index in first-appearance order.
  std::vector<std::int32_t> gid(n);
  std::unordered_map<std::int32_t, std::int32_t> dense;
  FixedEffectsFit fe;
  fe.group_var = g.name();
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = dense.try_emplace(g.code(i), static_cast<std::int32_t>(dense.size()));
    if (inserted) {
      fe.group_levels.push_back(g.level(i));
      fe.group_sizes.push_back(0);
    }
    gid[i] = it->second;
    ++fe.group_sizes[static_cast<std::size_t>(it->second)];
  }
  const std::size_t groups = fe.group_sizes.size();
  fe.n_groups = groups;
  if (groups < 2)
    throw Error(ErrorCode::insufficient_data, "fixed effects on '" + g.name() + "' need at least 2 groups, found " +
                                                  std::to_string(groups));

  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    y(ii) = yc.value(i);
    for (std::size_t j = 0; j < k; ++j) x(ii, static_cast<Eigen::Index>(j)) = xcols[j]->value(i);
  }

  Eigen::VectorXd y_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(groups));
  Eigen::MatrixXd x_mean = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(groups), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < n; ++i) {
    y_mean(gid[i]) += y(static_cast<Eigen::Index>(i));
    x_mean.row(gid[i]) += x.row(static_cast<Eigen::Index>(i));
  }
  for (std::size_t gi = 0; gi < groups; ++gi) {
    const double size = static_cast<double>(fe.group_sizes[gi]);
    y_mean(static_cast<Eigen::Index>(gi)) /= size;
    x_mean.row(static_cast<Eigen::Index>(gi)) /= size;
  }

  Design within;
  within.intercept = false;
  within.response = yc.name();
  within.y.resize(static_cast<Eigen::Index>(n));
  within.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    within.y(ii) = y(ii) - y_mean(gid[i]);
    within.x.row(ii) = x.row(ii) - x_mean.row(gid[i]);
  }
  for (std::size_t j = 0; j < k; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double scale = std::max(1.0, x.col(jj).cwiseAbs().maxCoeff());
    if (within.x.col(jj).cwiseAbs().maxCoeff() <= 1e-12 * scale)
      throw Error(ErrorCode::within_collinearity,
                  "slope '" + xcols[j]->name() + "' is constant within every '" + g.name() + "' group");
    within.terms.push_back(xcols[j]->name());
    within.sources.push_back({xcols[j]->name(), xcols[j]->source(), xcols[j]->transform(), {}, false});
  }
  const double y_scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  if (within.y.cwiseAbs().maxCoeff() <= 1e-12 * y_scale)
    throw Error(ErrorCode::degenerate_response,
                "response '" + yc.name() + "' has no variation within '" + g.name() + "' groups");

  fe.base = fit_ols(within, OlsOptions{.absorbed_df = groups});
  fe.r2_within = std::clamp(fe.base.r2, 0.0, 1.0);

  // Slopes-only linear index on raw data, as used for between/overall R².
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < fe.base.kept_columns.size(); ++c)
    beta(static_cast<Eigen::Index>(fe.base.kept_columns[c])) = fe.base.coefficients[c];
  const Eigen::VectorXd xb = x * beta;
  const Eigen::VectorXd xb_mean = x_mean * beta;
  fe.r2_overall = squared_correlation(xb, y);
  fe.r2_between = squared_correlation(xb_mean, y_mean);
  fe.group_intercepts.resize(groups);
  for (std::size_t gi = 0; gi < groups; ++gi)
    fe.group_intercepts[gi] = y_mean(static_cast<Eigen::Index>(gi)) - xb_mean(static_cast<Eigen::Index>(gi));
  return fe;
}

data::Column joint_category(const data::DataTable& table, std::span<const std::string> vars) {
  if (vars.empty()) throw Error(ErrorCode::config, "joint_category needs at least one variable");
  std::vector<const data::Column*> cols;
  std::string name;
  for (const auto& v : vars) {
    const data::Column& c = table.column(table.resolve(v));
    if (!c.is_categorical()) throw Error(ErrorCode::schema, "'" + c.name() + "' is not categorical");
    if (!name.empty()) name += kJointSeparator;
    name += c.name();
    cols.push_back(&c);
  }
  std::vector<std::string> levels;
  std::vector<std::int32_t> codes(table.rows(), -1);
  std::unordered_map<std::string, std::int32_t> index;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    std::string key;
    bool missing = false;
    for (std::size_t j = 0; j < cols.size() && !missing; ++j) {
      if (cols[j]->missing(r)) {
        missing = true;
        break;
      }
      if (j) key += kJointSeparator;
      key += cols[j]->level(r);
    }
    if (missing) continue;
    auto [it, inserted] = index.try_emplace(key, static_cast<std::int32_t>(levels.size()));
    if (inserted) levels.push_back(key);
    codes[r] = it->second;
  }
  return data::Column::categorical(std::move(name), std::move(levels), std::move(codes));
}

}  // namespace valtree::linmod
