#include "valtree/scorecard.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "valtree/error.hpp"

namespace valtree::scorecard {
namespace {

double back_transform(double value, data::Transform transform) {
  return transform == data::Transform::natural_log ? std::exp(value) : value;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string_view to_string(Block block) {
  switch (block) {
    case Block::non_financial: return "non_financial";
    case Block::financial: return "financial";
    case Block::deal_characteristics: return "deal_characteristics";
  }
  return "non_financial";
}

Block parse_block(std::string_view text) {
  if (text == "non_financial") return Block::non_financial;
  if (text == "financial") return Block::financial;
  if (text == "deal_characteristics") return Block::deal_characteristics;
  throw Error(ErrorCode::config, "unknown scorecard block '" + std::string(text) + "'");
}

const std::vector<BlockTerm>& BlockScorecard::terms(Block block) const {
  switch (block) {
    case Block::non_financial: return non_financial;
    case Block::financial: return financial;
    case Block::deal_characteristics: return deal_characteristics;
  }
  return non_financial;
}

BlockScorecard fit_block_scorecard(const data::DataTable& table, std::string_view response,
                                   const BlockAssignment& assignment) {
  std::vector<std::string> numeric;
  std::vector<std::string> categorical;
  std::vector<std::string> used{std::string(response)};
  std::vector<std::pair<std::string, Block>> column_block;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (assignment[j].first == assignment[i].first)
        throw Error(ErrorCode::config, "predictor '" + assignment[i].first + "' assigned to two blocks");
    const data::Column& c = table.column(table.resolve(assignment[i].first));
    (c.is_categorical() ? categorical : numeric).push_back(c.name());
    used.push_back(c.name());
    column_block.emplace_back(c.name(), assignment[i].second);
  }
  const data::DataTable rows = data::complete_cases(table, used);

  BlockScorecard card;
  card.design = linmod::encode_design(rows, response, numeric, categorical);
  card.fit = linmod::fit_ols(card.design);
  card.response = card.design.response;
  card.response_transform = rows.column(card.response).transform();

  card.column_blocks.assign(card.design.terms.size(), Block::non_financial);
  for (std::size_t j = 1; j < card.design.sources.size(); ++j) {
    for (const auto& [name, block] : column_block)
      if (name == card.design.sources[j].column) card.column_blocks[j] = block;
  }
  for (std::size_t k = 0; k < card.fit.kept_columns.size(); ++k) {
    const std::size_t j = card.fit.kept_columns[k];
    if (j == 0) {
      card.intercept = card.fit.coefficients[k];
      continue;
    }
    BlockTerm term{card.design.terms[j], card.fit.coefficients[k]};
    switch (card.column_blocks[j]) {
      case Block::non_financial: card.non_financial.push_back(term); break;
      case Block::financial: card.financial.push_back(term); break;
      case Block::deal_characteristics: card.deal_characteristics.push_back(term); break;
    }
  }
  card.design.x.resize(0, 0);
  card.design.y.resize(0);
  return card;
}

BlockScore score(const BlockScorecard& card, const data::Record& record) {
  const Eigen::RowVectorXd x = linmod::encode_row(card.design, record);
  BlockScore s;
  for (std::size_t k = 0; k < card.fit.kept_columns.size(); ++k) {
    const std::size_t j = card.fit.kept_columns[k];
    const double contribution = card.fit.coefficients[k] * x(static_cast<Eigen::Index>(j));
    if (j == 0) {
      s.intercept += contribution;
      continue;
    }
    switch (card.column_blocks[j]) {
      case Block::non_financial: s.non_financial += contribution; break;
      case Block::financial: s.financial += contribution; break;
      case Block::deal_characteristics: s.deal_characteristics += contribution; break;
    }
  }
  s.total = s.intercept + s.non_financial + s.financial + s.deal_characteristics;
  return s;
}

BlockScorecard fit_meta_stage2(const data::DataTable& table, std::string_view response,
                               const BlockScorecard& stage1, const BlockAssignment& assignment) {
  const data::Column& y = table.column(table.resolve(response));
  if (y.transform() != stage1.response_transform)
    throw Error(ErrorCode::composition, "stage-2 response transform differs from stage 1");
  std::vector<double> residual(table.rows());
  std::vector<std::uint8_t> missing(table.rows(), 0);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (y.missing(r)) {
      missing[r] = 1;
      continue;
    }
    try {
      residual[r] = y.value(r) - score(stage1, data::record_at(table, r)).total;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::domain) throw;
      missing[r] = 1;
    }
  }
  const std::string name = "stage1_residual";
  data::Column col = data::Column::numeric(name, data::VariableKind::response, std::move(residual), std::move(missing));
  BlockScorecard card = fit_block_scorecard(table.with_column(std::move(col)), name, assignment);
  card.response_transform = stage1.response_transform;
  return card;
}

MetaEstimate compose_meta(const BlockScorecard& startup, const BlockScorecard& deal, const data::Record& record) {
  if (startup.response_transform != deal.response_transform)
    throw Error(ErrorCode::composition, "stage scorecards use different response transforms (" +
                                            std::string(data::to_string(startup.response_transform)) + " vs " +
                                            std::string(data::to_string(deal.response_transform)) + ")");
  MetaEstimate m;
  m.stage1 = score(startup, record).total;
  m.stage2 = score(deal, record).total;
  m.value = m.stage1 + m.stage2;
  m.valuation = back_transform(m.value, startup.response_transform);
  return m;
}

namespace {

Condition branch_condition(const cart::RegressionTree& tree, const cart::Split& split, bool left) {
  const cart::Feature& f = tree.features[split.feature];
  Condition c;
  c.feature = split.feature;
  c.variable = f.name;
  c.missing = split.missing_left == left;
  if (f.kind == cart::FeatureKind::numeric) {
    if (left) c.upper = split.threshold;
    else c.lower = split.threshold;
    return c;
  }
  c.categorical = true;
  c.other_levels = c.missing;
  c.levels = left ? split.left_levels : split.right_levels;
  if (c.missing) {
    // Levels absent at the node follow the majority branch.
    for (std::int32_t code = 0; code < static_cast<std::int32_t>(f.levels.size()); ++code) {
      const bool at_node = std::binary_search(split.left_levels.begin(), split.left_levels.end(), code) ||
                           std::binary_search(split.right_levels.begin(), split.right_levels.end(), code);
      if (!at_node) c.levels.push_back(code);
    }
    std::sort(c.levels.begin(), c.levels.end());
  }
  return c;
}

void merge_into(std::vector<Condition>& rule, const Condition& next) {
  for (auto& c : rule) {
    if (c.feature != next.feature) continue;
    c.missing = c.missing && next.missing;
    if (c.categorical) {
      std::vector<std::int32_t> both;
      std::set_intersection(c.levels.begin(), c.levels.end(), next.levels.begin(), next.levels.end(),
                            std::back_inserter(both));
      c.levels = std::move(both);
      c.other_levels = c.other_levels && next.other_levels;
    } else {
      c.lower = std::max(c.lower, next.lower);
      c.upper = std::min(c.upper, next.upper);
    }
    return;
  }
  rule.push_back(next);
}

bool satisfies(const Condition& c, std::span<const cart::Feature> features, const data::Record& record) {
  const cart::Feature& f = features[c.feature];
  if (!c.categorical) {
    auto v = data::numeric_value(record, f.name, f.source, f.transform);
    if (!v) return c.missing;
    return c.lower < *v && *v <= c.upper;
  }
  auto level = data::level_value(record, f.name);
  if (!level) return c.missing;
  auto it = std::find(f.levels.begin(), f.levels.end(), *level);
  if (it == f.levels.end()) return c.other_levels;
  return std::binary_search(c.levels.begin(), c.levels.end(), static_cast<std::int32_t>(it - f.levels.begin()));
}

}  // namespace

std::string render_condition(const Condition& c, std::span<const cart::Feature> features) {
  const cart::Feature& f = features[c.feature];
  if (c.categorical) {
    std::string out = f.name + " ∈ {";
    for (std::size_t i = 0; i < c.levels.size(); ++i) {
      if (i) out += ", ";
      out += f.levels[static_cast<std::size_t>(c.levels[i])];
    }
    return out + "}";
  }
  const bool has_lower = std::isfinite(c.lower);
  const bool has_upper = std::isfinite(c.upper);
  if (has_lower && has_upper) return format_number(c.lower) + " < " + f.name + " ≤ " + format_number(c.upper);
  if (has_upper) return f.name + " ≤ " + format_number(c.upper);
  if (has_lower) return f.name + " > " + format_number(c.lower);
  return f.name + " any";
}

SegmentScorecard tree_to_scorecard(const cart::RegressionTree& tree, data::Transform response_transform) {
  SegmentScorecard card;
  card.response = tree.response;
  card.response_transform = response_transform;
  card.features = tree.features;
  const double root_n = static_cast<double>(tree.n_train());

  auto walk = [&](auto&& self, std::size_t at, std::vector<Condition> rule) -> void {
    const cart::TreeNode& node = tree.nodes[at];
    if (node.is_leaf()) {
      Segment s;
      s.prediction = node.prediction;
      s.valuation_eur = back_transform(node.prediction, response_transform);
      s.n = node.n;
      s.share = static_cast<double>(node.n) / root_n;
      s.leaf = at;
      if (rule.empty()) {
        s.rule = "ALL";
      } else {
        for (std::size_t i = 0; i < rule.size(); ++i) {
          if (i) s.rule += " AND ";
          s.rule += render_condition(rule[i], card.features);
        }
      }
      s.conditions = std::move(rule);
      card.segments.push_back(std::move(s));
      return;
    }
    auto left_rule = rule;
    merge_into(left_rule, branch_condition(tree, *node.split, true));
    self(self, static_cast<std::size_t>(node.left), std::move(left_rule));
    merge_into(rule, branch_condition(tree, *node.split, false));
    self(self, static_cast<std::size_t>(node.right), std::move(rule));
  };
  walk(walk, 0, {});
  return card;
}

std::size_t match_segment(const SegmentScorecard& card, const data::Record& record) {
  for (std::size_t i = 0; i < card.segments.size(); ++i) {
    bool ok = true;
    for (const auto& c : card.segments[i].conditions) {
      if (!satisfies(c, card.features, record)) {
        ok = false;
        break;
      }
    }
    if (ok) return i;
  }
  throw Error(ErrorCode::domain, "record matches no segment");
}

double score_segments(const SegmentScorecard& card, const data::Record& record) {
  return card.segments[match_segment(card, record)].prediction;
}

nlohmann::json block_scorecard_to_json(const BlockScorecard& card) {
  auto block = [](const std::vector<BlockTerm>& terms) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : terms) out.push_back({{"term", t.term}, {"coefficient", t.coefficient}});
    return out;
  };
  return {{"kind", "block_scorecard"},
          {"response", card.response},
          {"response_transform", data::to_string(card.response_transform)},
          {"intercept", card.intercept},
          {"blocks",
           {{"non_financial", block(card.non_financial)},
            {"financial", block(card.financial)},
            {"deal_characteristics", block(card.deal_characteristics)}}},
          {"n", card.fit.n},
          {"r2", card.fit.r2},
          {"adj_r2", card.fit.adj_r2},
          {"dropped_terms", card.fit.dropped_terms}};
}

nlohmann::json segment_scorecard_to_json(const SegmentScorecard& card) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : card.segments) {
    nlohmann::json conditions = nlohmann::json::array();
    for (const auto& c : s.conditions) {
      nlohmann::json e = {{"variable", c.variable}, {"missing", c.missing}};
      if (c.categorical) {
        std::vector<std::string> names;
        for (auto code : c.levels) names.push_back(card.features[c.feature].levels[static_cast<std::size_t>(code)]);
        e["levels"] = names;
        e["other_levels"] = c.other_levels;
      } else {
        if (std::isfinite(c.lower)) e["lower"] = c.lower;
        if (std::isfinite(c.upper)) e["upper"] = c.upper;
      }
      conditions.push_back(std::move(e));
    }
    segments.push_back({{"rule", s.rule},
                        {"conditions", std::move(conditions)},
                        {"prediction", s.prediction},
                        {"valuation_eur", s.valuation_eur},
                        {"n", s.n},
                        {"share", s.share}});
  }
  return {{"kind", "segment_scorecard"},
          {"response", card.response},
          {"response_transform", data::to_string(card.response_transform)},
          {"segments", std::move(segments)}};
}

}  // namespace valtree::scorecard
