#include <unordered_map>

#include "valtree/error.hpp"
#include "valtree/linmod.hpp"

namespace valtree::linmod {
namespace {

void require_complete(const data::Column& col) {
  if (col.missing_count() != 0)
    throw Error(ErrorCode::config, "column '" + col.name() + "' has " +
                                       std::to_string(col.missing_count()) +
                                       " missing values; filter with complete_cases first");
}

}  // namespace

Design encode_design(const data::DataTable& table, std::string_view response,
                     std::span<const std::string> predictors,
                     std::span<const std::string> dummies) {
  const data::Column& y = table.column(table.resolve(response));
  if (y.is_categorical()) throw Error(ErrorCode::schema, "response '" + y.name() + "' is categorical");
  require_complete(y);

  Design d;
  d.response = y.name();
  d.terms.push_back("(Intercept)");
  d.sources.push_back({});

  std::vector<const data::Column*> numeric_cols;
  for (const auto& p : predictors) {
    const data::Column& c = table.column(table.resolve(p));
    if (c.is_categorical())
      throw Error(ErrorCode::schema, "predictor '" + c.name() + "' is categorical; pass it as a dummy");
    require_complete(c);
    numeric_cols.push_back(&c);
    d.terms.push_back(c.name());
    d.sources.push_back({c.name(), c.source(), c.transform(), {}, false});
  }

  struct Indicator {
    const data::Column* col;
    std::int32_t code;
  };
  std::vector<Indicator> indicators;
  for (const auto& name : dummies) {
    const data::Column& c = table.column(table.resolve(name));
    if (!c.is_categorical()) throw Error(ErrorCode::schema, "dummy variable '" + c.name() + "' is not categorical");
    require_complete(c);
    std::vector<std::int32_t> order;
    std::vector<char> seen(c.levels().size(), 0);
    for (auto code : c.codes()) {
      if (!seen[static_cast<std::size_t>(code)]) {
        seen[static_cast<std::size_t>(code)] = 1;
        order.push_back(code);
      }
    }
    if (order.size() < 2)
      throw Error(ErrorCode::degenerate_category,
                  "categorical '" + c.name() + "' has " + std::to_string(order.size()) +
                      " observed level; at least 2 are needed for indicator coding");
    for (std::size_t k = 1; k < order.size(); ++k) {
      const auto& level = c.levels()[static_cast<std::size_t>(order[k])];
      indicators.push_back({&c, order[k]});
      d.terms.push_back(c.name() + "[" + level + "]");
      d.sources.push_back({c.name(), c.source(), data::Transform::none, level, true});
    }
  }

  const auto n = static_cast<Eigen::Index>(table.rows());
  d.x.resize(n, static_cast<Eigen::Index>(d.terms.size()));
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    d.y(i) = y.value(r);
    d.x(i, 0) = 1.0;
    Eigen::Index j = 1;
    for (const auto* c : numeric_cols) d.x(i, j++) = c->value(r);
    for (const auto& ind : indicators) d.x(i, j++) = ind.col->code(r) == ind.code ? 1.0 : 0.0;
  }
  return d;
}

Eigen::RowVectorXd encode_row(const Design& design, const data::Record& record) {
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(design.terms.size()));
  for (std::size_t j = 0; j < design.sources.size(); ++j) {
    const auto& src = design.sources[j];
    const auto jj = static_cast<Eigen::Index>(j);
    if (src.column.empty()) {
      row(jj) = 1.0;
    } else if (src.indicator) {
      auto level = data::level_value(record, src.column);
      if (!level) throw Error(ErrorCode::domain, "record is missing categorical '" + src.column + "'");
      row(jj) = *level == src.level ? 1.0 : 0.0;
    } else {
      auto v = data::numeric_value(record, src.column, src.source, src.transform);
      if (!v) throw Error(ErrorCode::domain, "record is missing numeric '" + src.column + "'");
      row(jj) = *v;
    }
  }
  return row;
}

}  // namespace valtree::linmod
