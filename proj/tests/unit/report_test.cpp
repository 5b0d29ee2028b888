#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "dot_parser.hpp"
#include "support.hpp"
#include "valtree/error.hpp"
#include "valtree/report.hpp"

namespace valtree {
namespace {

using testing::cat;
using testing::num;
using testing::response;

linmod::LinearFit small_fit() {
  const data::DataTable t = testing::table({response("y", {1, 3, 2, 5, 4, 6, 8, 7}), num("a", {1, 2, 3, 4, 5, 6, 7, 8})});
  return linmod::fit_ols(linmod::encode_design(t, "y", std::vector<std::string>{"a"}, {}));
}

TEST(Cell, PaperFormat) { EXPECT_EQ(report::format_cell(0.6861, 0.034, 0.001), "0.6861*** [0.034]"); }

TEST(Cell, NoNegativeZero) { EXPECT_EQ(report::format_cell(-0.00001, 0.0001, 0.5), "0.0000 [0.000]"); }

TEST(RegressionTable, OlsFooterAndNoCollinearityNote) {
  const std::vector<report::RegressionColumn> cols{report::ols_column("(1)", small_fit())};
  const std::string text = report::render_regression_table(cols);
  EXPECT_NE(text.find("Observations"), std::string::npos);
  EXPECT_NE(text.find("R-squared"), std::string::npos);
  EXPECT_NE(text.find("Adjusted R-squared"), std::string::npos);
  EXPECT_NE(text.find("Standard errors in brackets"), std::string::npos);
  EXPECT_NE(text.find("*** p<0.01, ** p<0.05, * p<0.1"), std::string::npos);
  EXPECT_EQ(text.find("collinear"), std::string::npos);
  EXPECT_EQ(text.find("Within-R-squared"), std::string::npos);
}

TEST(RegressionTable, CollinearityNote) {
  const data::DataTable t = testing::table({response("y", {1, 3, 2, 5, 4}), num("a", {1, 2, 3, 4, 5}), num("b", {2, 4, 6, 8, 10})});
  const auto fit = linmod::fit_ols(linmod::encode_design(t, "y", std::vector<std::string>{"a", "b"}, {}));
  const std::vector<report::RegressionColumn> cols{report::ols_column("(1)", fit)};
  EXPECT_NE(report::render_regression_table(cols).find("dropped as collinear: b"), std::string::npos);
}

TEST(RegressionTable, FixedEffectsFooterAndSmallGroups) {
  std::vector<double> y, x;
  std::vector<std::string> g;
  for (int i = 0; i < 16; ++i) {
    x.push_back(i);
    y.push_back(0.5 * i + (i % 4) * 0.3 + (i < 12 ? 0 : 3));
    g.push_back(i < 12 ? "big" : "small");
  }
  const data::DataTable t = testing::table({response("y", y), num("x", x), cat("g", g)});
  const auto fe = linmod::fit_fixed_effects(t, "y", std::vector<std::string>{"x"}, "g");
  const std::vector<report::RegressionColumn> cols{report::ols_column("(1)", small_fit()), report::fe_column("(2)", fe)};
  const std::string text = report::render_regression_table(cols);
  for (const char* label : {"Within-R-squared", "Between-R-squared", "Overall-R-squared", "Number of categories"})
    EXPECT_NE(text.find(label), std::string::npos) << label;
  EXPECT_NE(text.find("1 of 2 groups have fewer than 5 observations"), std::string::npos);
  const auto doc = report::regression_table_json(cols);
  EXPECT_EQ(doc.at("models")[1].at("n_groups"), 2);
}

TEST(RegressionTable, NumbersRoundTrip) {
  const auto fit = small_fit();
  const std::vector<report::RegressionColumn> cols{report::ols_column("(1)", fit)};
  const std::string text = report::render_regression_table(cols);
  const std::regex cell(R"((-?\d+\.\d{4})\**\s\[(\d+\.\d{3})\])");
  std::vector<std::pair<double, double>> found;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), cell); it != std::sregex_iterator(); ++it)
    found.emplace_back(std::stod((*it)[1]), std::stod((*it)[2]));
  ASSERT_EQ(found.size(), fit.terms.size());
  for (std::size_t k = 0; k < found.size(); ++k) {
    EXPECT_NEAR(found[k].first, fit.coefficients[k], 0.5e-4 + 1e-12);
    EXPECT_NEAR(found[k].second, fit.std_errors[k], 0.5e-3 + 1e-12);
  }
}

TEST(RegressionTable, PureFunction) {
  const std::vector<report::RegressionColumn> cols{report::ols_column("(1)", small_fit())};
  EXPECT_EQ(report::render_regression_table(cols), report::render_regression_table(cols));
}

TEST(CpRender, RootOnlyRow) {
  cart::CpTable cp;
  cp.rows = {{1.0, 0, 1.0, 1.00094, 0.03164}};
  cp.n_obs = 10;
  cp.cross_validated = true;
  const std::string text = report::render_cp_table(cp, {});
  EXPECT_NE(text.find("OBS: 10"), std::string::npos);
  EXPECT_NE(text.find("End Nodes: 1"), std::string::npos);
  EXPECT_NE(text.find("rel error"), std::string::npos);
  EXPECT_TRUE(std::regex_search(text, std::regex(R"(1\.00000\s+0\s+1\.0000\s+1\.00094\s+0\.03164)"))) << text;
}

TEST(CpRender, PaperShapedRowAndImportance) {
  cart::CpTable cp;
  cp.rows = {{0.31393, 0, 1.0, 1.00094, 0.03164}, {0.03812, 1, 0.68607, 0.70001, 0.02999}};
  cp.n_obs = 1045;
  cp.end_nodes = 2;
  cp.cross_validated = true;
  const std::vector<cart::Importance> imp{{"ln_revenue", 59}, {"ln_beta", 23}, {"crp", 18}};
  const std::string text = report::render_cp_table(cp, imp);
  EXPECT_TRUE(std::regex_search(text, std::regex(R"(0\.31393\s+0\s+1\.0000\s+1\.00094\s+0\.03164)"))) << text;
  EXPECT_TRUE(std::regex_search(text, std::regex(R"(0\.03812\s+1\s+0\.6861)"))) << text;
  EXPECT_TRUE(std::regex_search(text, std::regex(R"(ln_revenue\s+ln_beta\s+crp\n\s*59\s+23\s+18)"))) << text;
  EXPECT_NE(text.find("SSE(T)/SSE(root)"), std::string::npos);
}

TEST(ForestRender, TableLayout) {
  forest::ForestModel m;
  m.n_trees = 1000;
  m.mtry = 1;
  m.oob_mse = 2.268259;
  m.pct_var_explained = 73.99;
  const std::string text = report::render_forest_summary(m);
  EXPECT_NE(text.find("Type of random forest : Regression"), std::string::npos);
  EXPECT_NE(text.find("Number of trees : 1000"), std::string::npos);
  EXPECT_NE(text.find("No. of variables tried at each split: 1"), std::string::npos);
  EXPECT_NE(text.find("Mean of squared residuals : 2.268259"), std::string::npos);
  EXPECT_NE(text.find("% Var explained : 73.99"), std::string::npos);
}

TEST(Dot, RootOnly) {
  auto c = testing::loose_controls();
  c.cp_min = 1.0;
  const auto tree = cart::grow(testing::step_table(), "y", std::vector<std::string>{"x"}, c);
  const auto g = testing::parse_dot(report::export_tree_dot(tree));
  EXPECT_EQ(g.nodes.size(), 1u);
  EXPECT_TRUE(g.edges.empty());
}

TEST(Dot, StepTree) {
  const auto tree = cart::grow(testing::step_table(), "y", std::vector<std::string>{"x"}, testing::loose_controls());
  const auto g = testing::parse_dot(report::export_tree_dot(tree));
  ASSERT_EQ(g.nodes.size(), 3u);
  ASSERT_EQ(g.edges.size(), 2u);
  const std::string root = g.nodes.at("n0").at("label");
  EXPECT_NE(root.find("x ≤ 2.5"), std::string::npos);
  EXPECT_NE(root.find("n = 4"), std::string::npos);
  EXPECT_EQ(g.edges[0].to, "n1");
  EXPECT_EQ(g.edges[0].attrs.at("label"), "yes");
}

TEST(Dot, QuotesEscaped) {
  const data::DataTable t = testing::table({response("y", {1, 1, 9, 9}), cat("g", {"a\"b", "a\"b", "c", "c"})});
  const auto tree = cart::grow(t, "y", std::vector<std::string>{"g"}, testing::loose_controls());
  const auto g = testing::parse_dot(report::export_tree_dot(tree));
  EXPECT_NE(g.nodes.at("n0").at("label").find("a\"b"), std::string::npos);
}

TEST(DotParser, RejectsGarbage) {
  EXPECT_THROW(testing::parse_dot("digraph { a -> }"), std::runtime_error);
  EXPECT_THROW(testing::parse_dot("graph x { }"), std::runtime_error);
}

report::ComparisonRow row(std::string name, report::Family f, double fit) {
  report::ComparisonRow r;
  r.name = std::move(name);
  r.family = f;
  r.fit = fit;
  r.n = 100;
  return r;
}

TEST(Compare, TreeRankedAboveOls) {
  const auto c = report::compare_models({row("ols", report::Family::ols, 0.41), row("tree", report::Family::cart, 0.50)});
  EXPECT_EQ(c.rows[0].name, "tree");
  EXPECT_EQ(c.json.at("rows")[0].at("name"), "tree");
  EXPECT_FALSE(c.h3_contrast);
}

TEST(Compare, TiesByName) {
  const auto c = report::compare_models({row("b", report::Family::ols, 0.5), row("a", report::Family::cart, 0.5)});
  EXPECT_EQ(c.rows[0].name, "a");
}

TEST(Compare, ContrastFlag) {
  auto fe = row("joint", report::Family::fixed_effects, 0.282);
  fe.joint = true;
  fe.n_groups = 90;
  auto tree = row("micro", report::Family::cart, 0.55);
  tree.categorical_only = true;
  const auto c = report::compare_models({fe, tree});
  EXPECT_TRUE(c.h3_contrast);
  EXPECT_NE(c.text.find("Contrast"), std::string::npos);
  EXPECT_EQ(c.json.at("h3_contrast"), true);
  tree.categorical_only = false;
  EXPECT_FALSE(report::compare_models({fe, tree}).h3_contrast);
}

TEST(Compare, NeedsTwoRows) { EXPECT_THROW(report::compare_models({row("a", report::Family::ols, 1)}), Error); }

TEST(Compare, RowBuilders) {
  const auto tree = cart::grow(testing::step_table(), "y", std::vector<std::string>{"x"}, testing::loose_controls());
  EXPECT_NEAR(report::row_from_tree("t", tree, {}, false).fit, 1.0, 1e-12);
  forest::ForestModel m;
  m.pct_var_explained = 73.99;
  EXPECT_NEAR(report::row_from_forest("f", m).fit, 0.7399, 1e-12);
}

TEST(Scorecards, AlignedText) {
  const auto tree = cart::grow(testing::step_table(), "y", std::vector<std::string>{"x"}, testing::loose_controls());
  const std::string text = report::render_segment_scorecard(scorecard::tree_to_scorecard(tree, data::Transform::none));
  EXPECT_NE(text.find("x ≤ 2.5"), std::string::npos);
  EXPECT_NE(text.find("x > 2.5"), std::string::npos);
  EXPECT_NE(text.find("0.5000"), std::string::npos);
}

}  // namespace
}  // namespace valtree
