#include "valtree/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "valtree/error.hpp"

namespace valtree::report {
namespace {

std::string fixed(double v, int decimals) {
  if (!std::isfinite(v)) return std::isnan(v) ? "NA" : (v > 0 ? "Inf" : "-Inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  // Avoid "-0.000".
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string general(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Terminal columns occupied by a UTF-8 string (one per code point).
std::size_t display_width(std::string_view s) {
  std::size_t w = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++w;
  return w;
}

std::string pad_right(std::string_view s, std::size_t width) {
  std::string out(s);
  out.append(width - std::min(width, display_width(s)), ' ');
  return out;
}

std::string pad_left(std::string_view s, std::size_t width) {
  std::string out(width - std::min(width, display_width(s)), ' ');
  out += s;
  return out;
}

// Rows of cells; column 0 left-aligned, the rest right-aligned, separated by
// two spaces. Trailing spaces are trimmed.
std::string layout(const std::vector<std::vector<std::string>>& rows, bool first_left = true) {
  std::size_t cols = 0;
  for (const auto& r : rows) cols = std::max(cols, r.size());
  std::vector<std::size_t> width(cols, 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], display_width(r[c]));
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string cell = c < r.size() ? r[c] : std::string();
      if (c) line += "  ";
      line += (c == 0 && first_left) ? pad_right(cell, width[c]) : pad_left(cell, width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

std::string rule_line(const std::string& table) {
  std::size_t w = 0;
  std::istringstream in(table);
  for (std::string line; std::getline(in, line);) w = std::max(w, display_width(line));
  return std::string(w, '-') + "\n";
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

RegressionColumn ols_column(std::string name, const linmod::LinearFit& fit) {
  return {std::move(name), fit, std::nullopt};
}

RegressionColumn fe_column(std::string name, const linmod::FixedEffectsFit& fit) {
  return {std::move(name), fit.base, fit};
}

std::string format_cell(double coefficient, double std_error, double p_value) {
  return fixed(coefficient, 4) + linmod::significance_stars(p_value) + " [" + fixed(std_error, 3) + "]";
}

std::string render_regression_table(std::span<const RegressionColumn> columns) {
  std::vector<std::string> terms;
  bool any_fe = false;
  bool any_ols = false;
  for (const auto& col : columns) {
    for (const auto& t : col.fit.terms)
      if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
    (col.fixed_effects ? any_fe : any_ols) = true;
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{""};
  for (const auto& col : columns) header.push_back(col.name);
  rows.push_back(header);
  for (const auto& term : terms) {
    std::vector<std::string> row{term};
    for (const auto& col : columns) {
      auto it = std::find(col.fit.terms.begin(), col.fit.terms.end(), term);
      if (it == col.fit.terms.end()) {
        row.emplace_back();
        continue;
      }
      const auto k = static_cast<std::size_t>(it - col.fit.terms.begin());
      row.push_back(format_cell(col.fit.coefficients[k], col.fit.std_errors[k], col.fit.p_values[k]));
    }
    rows.push_back(std::move(row));
  }
  const std::size_t body_end = rows.size();

  auto footer = [&](std::string label, auto value) {
    std::vector<std::string> row{std::move(label)};
    for (const auto& col : columns) row.push_back(value(col));
    rows.push_back(std::move(row));
  };
  footer("Observations", [](const RegressionColumn& c) { return std::to_string(c.fit.n); });
  if (any_ols) {
    footer("R-squared", [](const RegressionColumn& c) { return c.fixed_effects ? "" : fixed(c.fit.r2, 3); });
    footer("Adjusted R-squared",
           [](const RegressionColumn& c) { return c.fixed_effects ? "" : fixed(c.fit.adj_r2, 3); });
  }
  if (any_fe) {
    footer("Number of categories", [](const RegressionColumn& c) {
      return c.fixed_effects ? std::to_string(c.fixed_effects->n_groups) : std::string();
    });
    footer("Within-R-squared", [](const RegressionColumn& c) {
      return c.fixed_effects ? fixed(c.fixed_effects->r2_within, 3) : std::string();
    });
    footer("Between-R-squared", [](const RegressionColumn& c) {
      return c.fixed_effects ? fixed(c.fixed_effects->r2_between, 3) : std::string();
    });
    footer("Overall-R-squared", [](const RegressionColumn& c) {
      return c.fixed_effects ? fixed(c.fixed_effects->r2_overall, 3) : std::string();
    });
  }

  const std::string table = layout(rows);
  const std::string rule = rule_line(table);
  std::istringstream in(table);
  std::string out = rule;
  std::string line;
  for (std::size_t i = 0; std::getline(in, line); ++i) {
    if (i == 1 || i == body_end) out += rule;
    out += line + "\n";
  }
  out += rule;
  out += "Standard errors in brackets\n";
  out += "*** p<0.01, ** p<0.05, * p<0.1\n";
  for (const auto& col : columns) {
    if (!col.fit.dropped_terms.empty())
      out += col.name + ": dropped as collinear: " + join(col.fit.dropped_terms, ", ") + "\n";
    if (col.fixed_effects) {
      const std::size_t small = col.fixed_effects->small_groups(kSmallGroup);
      if (small > 0)
        out += col.name + ": " + std::to_string(small) + " of " + std::to_string(col.fixed_effects->n_groups) +
               " groups have fewer than " + std::to_string(kSmallGroup) +
               " observations; small groups inflate Type-1 error risk\n";
    }
  }
  return out;
}

nlohmann::json regression_table_json(std::span<const RegressionColumn> columns) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& col : columns) {
    nlohmann::json terms = nlohmann::json::array();
    for (std::size_t k = 0; k < col.fit.terms.size(); ++k)
      terms.push_back({{"term", col.fit.terms[k]},
                       {"coefficient", col.fit.coefficients[k]},
                       {"std_error", col.fit.std_errors[k]},
                       {"t_value", col.fit.t_values[k]},
                       {"p_value", col.fit.p_values[k]},
                       {"stars", linmod::significance_stars(col.fit.p_values[k])}});
    nlohmann::json m = {{"name", col.name},
                        {"family", col.fixed_effects ? "fixed_effects" : "ols"},
                        {"response", col.fit.response},
                        {"terms", std::move(terms)},
                        {"dropped_terms", col.fit.dropped_terms},
                        {"observations", col.fit.n},
                        {"df_resid", col.fit.df_resid}};
    if (col.fixed_effects) {
      const auto& fe = *col.fixed_effects;
      m["group"] = fe.group_var;
      m["n_groups"] = fe.n_groups;
      m["r2_within"] = fe.r2_within;
      m["r2_between"] = fe.r2_between;
      m["r2_overall"] = fe.r2_overall;
      m["small_groups"] = fe.small_groups(kSmallGroup);
    } else {
      m["r2"] = col.fit.r2;
      m["adj_r2"] = col.fit.adj_r2;
    }
    models.push_back(std::move(m));
  }
  return {{"kind", "regression_table"}, {"models", std::move(models)}};
}

std::string render_cp_table(const cart::CpTable& cp, std::span<const cart::Importance> importance,
                            std::string_view title) {
  std::string out;
  if (!title.empty()) out += std::string(title) + "\n";
  out += "OBS: " + std::to_string(cp.n_obs) + "   End Nodes: " + std::to_string(cp.end_nodes) + "\n";
  std::vector<std::vector<std::string>> rows{{"", "cp", "nsplit", "rel error", "xerror", "xstd"}};
  for (std::size_t i = 0; i < cp.rows.size(); ++i) {
    const auto& r = cp.rows[i];
    rows.push_back({std::to_string(i + 1), fixed(r.cp, 5), std::to_string(r.nsplit), fixed(r.rel_error, 4),
                    cp.cross_validated ? fixed(r.xerror, 5) : "-", cp.cross_validated ? fixed(r.xstd, 5) : "-"});
  }
  out += layout(rows);
  if (!importance.empty()) {
    out += "\nVariable importance\n";
    std::vector<std::string> names;
    std::vector<std::string> scores;
    for (const auto& i : importance) {
      names.push_back(i.variable);
      scores.push_back(std::to_string(i.score));
    }
    out += layout({names, scores}, false);
  }
  out += "\nrel error = SSE(T)/SSE(root); xerror and xstd are cross-validated and scaled by SSE(root)\n";
  return out;
}

nlohmann::json cp_report_json(const cart::CpTable& cp, std::span<const cart::Importance> importance,
                              std::string_view title) {
  return {{"kind", "cp_table"},
          {"title", title},
          {"cp_table", cart::cp_table_to_json(cp)},
          {"importance", cart::importance_to_json(importance)}};
}

std::string render_forest_summary(const forest::ForestModel& model) {
  std::string out;
  out += "Type of random forest : Regression\n";
  out += "Number of trees : " + std::to_string(model.n_trees) + "\n";
  out += "No. of variables tried at each split: " + std::to_string(model.mtry) + "\n";
  out += "Mean of squared residuals : " + fixed(model.oob_mse, 6) + "\n";
  out += "% Var explained : " + fixed(model.pct_var_explained, 2) + "\n";
  if (model.oob_skipped > 0)
    out += "Rows never out-of-bag (excluded): " + std::to_string(model.oob_skipped) + "\n";
  for (const auto& w : model.warnings) out += "warning: " + w + "\n";
  return out;
}

std::string render_block_scorecard(const scorecard::BlockScorecard& card) {
  std::vector<std::vector<std::string>> rows{{"Block", "Term", "Coefficient"}};
  rows.push_back({"intercept", "(Intercept)", fixed(card.intercept, 4)});
  for (auto block : {scorecard::Block::non_financial, scorecard::Block::financial,
                     scorecard::Block::deal_characteristics}) {
    const auto& terms = card.terms(block);
    if (terms.empty()) rows.push_back({std::string(scorecard::to_string(block)), "-", ""});
    for (const auto& t : terms)
      rows.push_back({std::string(scorecard::to_string(block)), t.term, fixed(t.coefficient, 4)});
  }
  std::string out = "Score of " + card.response + " = intercept + non_financial + financial + deal_characteristics\n";
  out += layout(rows);
  out += "Observations " + std::to_string(card.fit.n) + ", R-squared " + fixed(card.fit.r2, 3) + "\n";
  if (!card.fit.dropped_terms.empty()) out += "dropped as collinear: " + join(card.fit.dropped_terms, ", ") + "\n";
  return out;
}

std::string render_segment_scorecard(const scorecard::SegmentScorecard& card) {
  const bool log = card.response_transform == data::Transform::natural_log;
  std::vector<std::string> header{"Segment", "Rule", "Prediction"};
  if (log) header.push_back("Valuation (EUR)");
  header.insert(header.end(), {"n", "Share", "Missing routed here"});
  std::vector<std::vector<std::string>> rows{header};
  for (std::size_t i = 0; i < card.segments.size(); ++i) {
    const auto& s = card.segments[i];
    std::vector<std::string> missing;
    for (const auto& c : s.conditions)
      if (c.missing) missing.push_back(c.variable);
    std::vector<std::string> row{std::to_string(i + 1), s.rule, fixed(s.prediction, 4)};
    if (log) row.push_back(fixed(s.valuation_eur, 0));
    row.insert(row.end(), {std::to_string(s.n), fixed(s.share, 4), missing.empty() ? "-" : join(missing, ", ")});
    rows.push_back(std::move(row));
  }
  // Left-align the rule column too.
  std::string out = "Segments of " + card.response + "\n";
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], display_width(r[c]));
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) line += "  ";
      line += (c == 1 || c + 1 == r.size()) ? pad_right(r[c], width[c]) : pad_left(r[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::string split_label(const cart::RegressionTree& tree, const cart::Split& split) {
  const cart::Feature& f = tree.features[split.feature];
  if (f.kind == cart::FeatureKind::numeric) return f.name + " ≤ " + general(split.threshold);
  std::vector<std::string> names;
  for (auto code : split.left_levels) names.push_back(f.levels[static_cast<std::size_t>(code)]);
  return f.name + " ∈ {" + join(names, ", ") + "}";
}

std::string export_tree_dot(const cart::RegressionTree& tree) {
  std::string out = "digraph tree {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    std::string label;
    if (!node.is_leaf()) label = dot_escape(split_label(tree, *node.split)) + "\\n";
    label += "prediction = " + general(node.prediction) + "\\nn = " + std::to_string(node.n);
    out += "  n" + std::to_string(i) + " [label=\"" + label + "\"];\n";
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    if (node.is_leaf()) continue;
    out += "  n" + std::to_string(i) + " -> n" + std::to_string(node.left) + " [label=\"yes\"];\n";
    out += "  n" + std::to_string(i) + " -> n" + std::to_string(node.right) + " [label=\"no\"];\n";
  }
  out += "}\n";
  return out;
}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::ols: return "ols";
    case Family::fixed_effects: return "fixed_effects";
    case Family::cart: return "cart";
    case Family::forest: return "forest";
    case Family::scorecard: return "scorecard";
  }
  return "ols";
}

Family parse_family(std::string_view text) {
  for (auto f : {Family::ols, Family::fixed_effects, Family::cart, Family::forest, Family::scorecard})
    if (to_string(f) == text) return f;
  throw Error(ErrorCode::config, "unknown model family '" + std::string(text) + "'");
}

ComparisonRow row_from_ols(std::string name, const linmod::LinearFit& fit, std::vector<std::string> categories) {
  ComparisonRow r;
  r.name = std::move(name);
  r.family = Family::ols;
  r.fit = fit.r2;
  r.n = fit.n;
  r.categories = std::move(categories);
  return r;
}

ComparisonRow row_from_fe(std::string name, const linmod::FixedEffectsFit& fit, std::vector<std::string> categories,
                          bool joint) {
  ComparisonRow r;
  r.name = std::move(name);
  r.family = Family::fixed_effects;
  r.fit = fit.r2_overall;
  r.n = fit.base.n;
  r.categories = std::move(categories);
  r.joint = joint;
  r.n_groups = fit.n_groups;
  return r;
}

ComparisonRow row_from_tree(std::string name, const cart::RegressionTree& tree, std::vector<std::string> categories,
                            bool categorical_only) {
  ComparisonRow r;
  r.name = std::move(name);
  r.family = Family::cart;
  r.fit = 1.0 - tree.sse() / tree.root_sse();
  r.n = tree.n_train();
  r.categories = std::move(categories);
  r.categorical_only = categorical_only;
  return r;
}

ComparisonRow row_from_forest(std::string name, const forest::ForestModel& model,
                              std::vector<std::string> categories) {
  ComparisonRow r;
  r.name = std::move(name);
  r.family = Family::forest;
  r.fit = model.pct_var_explained / 100.0;
  r.n = model.n_rows;
  r.categories = std::move(categories);
  return r;
}

Comparison compare_models(std::vector<ComparisonRow> rows) {
  if (rows.size() < 2) throw Error(ErrorCode::config, "model comparison needs at least two models");
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    if (a.fit != b.fit) return a.fit > b.fit;
    return a.name < b.name;
  });

  Comparison c;
  const ComparisonRow* best_tree = nullptr;
  const ComparisonRow* best_joint = nullptr;
  for (const auto& r : rows) {
    if (r.family == Family::cart && r.categorical_only && !best_tree) best_tree = &r;
    if (r.family == Family::fixed_effects && r.joint && !best_joint) best_joint = &r;
  }
  c.h3_contrast = best_tree && best_joint && best_tree->fit >= best_joint->fit;

  std::vector<std::vector<std::string>> table{{"Rank", "Model", "Family", "Fit", "N", "Categories"}};
  nlohmann::json json_rows = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::string cats = r.categories.empty() ? "-" : join(r.categories, ", ");
    if (r.joint) cats += " (joint, " + std::to_string(r.n_groups) + " groups)";
    table.push_back({std::to_string(i + 1), r.name, std::string(to_string(r.family)), fixed(r.fit, 4),
                     std::to_string(r.n), cats});
    json_rows.push_back({{"rank", i + 1},
                         {"name", r.name},
                         {"family", to_string(r.family)},
                         {"fit", r.fit},
                         {"n", r.n},
                         {"categories", r.categories},
                         {"categorical_only", r.categorical_only},
                         {"joint", r.joint},
                         {"n_groups", r.n_groups}});
  }
  // Left-align every column but Fit and N.
  std::vector<std::size_t> width(6, 0);
  for (const auto& r : table)
    for (std::size_t k = 0; k < r.size(); ++k) width[k] = std::max(width[k], display_width(r[k]));
  for (const auto& r : table) {
    std::string line;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) line += "  ";
      line += (k == 3 || k == 4) ? pad_left(r[k], width[k]) : pad_right(r[k], width[k]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    c.text += line + "\n";
  }
  c.text += "Fit: R-squared (ols), overall R-squared (fixed_effects), 1 - rel error (cart), % var explained / 100 (forest)\n";
  if (c.h3_contrast)
    c.text += "Contrast: categorical-only tree '" + best_tree->name + "' (" + fixed(best_tree->fit, 4) +
              ") matches or beats joint fixed effects '" + best_joint->name + "' (" + fixed(best_joint->fit, 4) + ")\n";

  c.json = {{"kind", "model_comparison"}, {"rows", std::move(json_rows)}, {"h3_contrast", c.h3_contrast}};
  c.rows = std::move(rows);
  return c;
}

}  // namespace valtree::report
