#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "valtree/error.hpp"
#include "valtree/forest.hpp"

namespace valtree {
namespace {

using testing::cat;
using testing::num;
using testing::response;

data::DataTable friedman(std::uint64_t seed, std::size_t n, double noise) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> z;
  std::vector<double> y, x1, x2, x3;
  for (std::size_t i = 0; i < n; ++i) {
    x1.push_back(u(rng));
    x2.push_back(u(rng));
    x3.push_back(u(rng));
    y.push_back(10 * std::sin(3.14159 * x1.back() * x2.back()) + 20 * (x3.back() - 0.5) * (x3.back() - 0.5) +
                noise * z(rng));
  }
  return testing::table({response("y", y), num("x1", x1), num("x2", x2), num("x3", x3)});
}

const std::vector<std::string> kX3{"x1", "x2", "x3"};

forest::ForestOptions options(std::size_t n_trees, std::size_t mtry, std::uint64_t seed) {
  forest::ForestOptions o;
  o.n_trees = n_trees;
  o.mtry = mtry;
  o.seed = seed;
  o.controls.minbucket = 5;
  return o;
}

TEST(Forest, ConfigEcho) {
  const auto m = forest::fit_forest(friedman(1, 150, 1.0), "y", kX3, options(1000, 1, 3));
  EXPECT_EQ(m.n_trees, 1000u);
  EXPECT_EQ(m.mtry, 1u);
  EXPECT_EQ(m.trees.size(), 1000u);
  const auto s = forest::forest_summary_json(m);
  EXPECT_EQ(s.at("n_trees"), 1000);
  EXPECT_EQ(s.at("mtry"), 1);
}

TEST(Forest, CardinalityLimit) {
  std::vector<double> y;
  std::vector<std::string> city;
  for (int i = 0; i < 116; ++i) {
    y.push_back(i % 7);
    city.push_back("city" + std::to_string(i % 58));
  }
  const auto t = testing::table({response("y", y), cat("city", city)});
  const std::vector<std::string> p{"city"};
  try {
    forest::fit_forest(t, "y", p, options(5, 1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::cardinality);
    EXPECT_NE(std::string(e.what()).find("53"), std::string::npos);
  }
  auto o = options(5, 1, 1);
  o.max_categories = 60;
  const auto m = forest::fit_forest(t, "y", p, o);
  EXPECT_FALSE(m.warnings.empty());
}

TEST(Forest, MtryValidated) {
  const auto t = friedman(1, 50, 1.0);
  EXPECT_THROW(forest::fit_forest(t, "y", kX3, options(5, 0, 1)), Error);
  EXPECT_THROW(forest::fit_forest(t, "y", kX3, options(5, 4, 1)), Error);
}

TEST(Forest, IdentityBootstrapEqualsSingleTree) {
  const auto t = friedman(2, 120, 0.5);
  auto o = options(1, 3, 1);
  o.bootstrap = false;
  const auto m = forest::fit_forest(t, "y", kX3, o);
  cart::GrowthControls c;
  c.cp_min = 1e-300;
  c.minbucket = 5;
  c.minsplit = 10;
  c.max_depth = o.controls.max_depth;
  const auto tree = cart::grow(t, "y", kX3, c);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto rec = data::record_at(t, r);
    EXPECT_EQ(forest::predict_forest(m, rec).value, cart::predict_tree(tree, rec).value);
  }
}

TEST(Forest, MeanOfMembers) {
  const auto t = friedman(3, 80, 0.5);
  const auto m = forest::fit_forest(t, "y", kX3, options(7, 2, 5));
  const auto rec = data::record_at(t, 0);
  double s = 0.0;
  for (const auto& tree : m.trees) s += cart::predict_tree(tree, rec).value;
  EXPECT_NEAR(forest::predict_forest(m, rec).value, s / 7.0, 1e-12);
}

TEST(Forest, NoiselessStepExplainsVariance) {
  std::vector<double> y, x;
  for (int i = 0; i < 200; ++i) {
    x.push_back(i);
    y.push_back(i < 100 ? 0.0 : 10.0);
  }
  const auto t = testing::table({response("y", y), num("x", x)});
  const auto m = forest::fit_forest(t, "y", std::vector<std::string>{"x"}, options(200, 1, 11));
  EXPECT_GT(m.pct_var_explained, 95.0);
}

TEST(Forest, PureNoiseMayBeNegative) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  std::vector<double> y, x;
  for (int i = 0; i < 200; ++i) {
    x.push_back(z(rng));
    y.push_back(z(rng));
  }
  const auto t = testing::table({response("y", y), num("x", x)});
  const auto m = forest::fit_forest(t, "y", std::vector<std::string>{"x"}, options(100, 1, 2));
  EXPECT_LT(m.pct_var_explained, 10.0);
  const auto s = forest::oob_stats(m, t, "y");
  EXPECT_EQ(s.oob_mse, m.oob_mse);
  EXPECT_EQ(s.pct_var_explained, m.pct_var_explained);
}

TEST(Forest, DeterministicAcrossRunsAndThreads) {
  const auto t = friedman(5, 200, 1.0);
  auto o = options(40, 1, 77);
  const auto a = forest::fit_forest(t, "y", kX3, o);
  o.threads = 4;
  const auto b = forest::fit_forest(t, "y", kX3, o);
  EXPECT_EQ(forest::forest_to_json(a).dump(), forest::forest_to_json(b).dump());
  EXPECT_EQ(a.oob_mse, b.oob_mse);
  o.seed = 78;
  const auto c = forest::fit_forest(t, "y", kX3, o);
  EXPECT_NE(a.oob_mse, c.oob_mse);
}

TEST(Forest, OobCoverage) {
  const auto t = friedman(6, 1000, 1.0);
  const auto m = forest::fit_forest(t, "y", kX3, options(50, 1, 9));
  EXPECT_LT(static_cast<double>(m.oob_skipped), 0.01 * 1000);
  EXPECT_EQ(m.oob_scored + m.oob_skipped, 1000u);
}

TEST(Forest, VarianceShrinksWithMoreTrees) {
  const auto t = friedman(7, 300, 1.0);
  const data::Record probe{{"x1", 0.3}, {"x2", 0.6}, {"x3", 0.2}};
  auto spread = [&](std::size_t n_trees) {
    std::vector<double> v;
    for (std::uint64_t s = 1; s <= 6; ++s) v.push_back(forest::predict_forest(forest::fit_forest(t, "y", kX3, options(n_trees, 1, s * 1000)), probe).value);
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    return var;
  };
  const double v10 = spread(10), v100 = spread(100), v500 = spread(500);
  EXPECT_GT(v10, v100);
  EXPECT_GT(v100, v500);
}

TEST(Forest, JsonRoundTrip) {
  const auto t = friedman(8, 120, 1.0);
  const auto m = forest::fit_forest(t, "y", kX3, options(10, 2, 3));
  const auto back = forest::forest_from_json(forest::forest_to_json(m));
  EXPECT_EQ(forest::forest_to_json(back).dump(), forest::forest_to_json(m).dump());
  for (std::size_t r = 0; r < 20; ++r) {
    const auto rec = data::record_at(t, r);
    EXPECT_EQ(forest::predict_forest(m, rec).value, forest::predict_forest(back, rec).value);
  }
}

}  // namespace
}  // namespace valtree
