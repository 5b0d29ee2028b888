#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "valtree/error.hpp"
#include "valtree/linmod.hpp"

namespace valtree {
namespace {

using testing::cat;
using testing::num;
using testing::response;

linmod::LinearFit simple_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const data::DataTable t = testing::table({response("y", y), num("x", x)});
  return linmod::fit_ols(linmod::encode_design(t, "y", std::vector<std::string>{"x"}, {}));
}

TEST(EncodeDesign, WidthAndBaseline) {
  const data::DataTable t = testing::table(
      {response("y", {1, 2, 3, 4, 5, 6}), num("a", {1, 2, 3, 4, 5, 6}), num("b", {2, 1, 2, 1, 2, 1}),
       cat("model", {"B2B", "B2C", "B2G", "B2B", "B2C", "B2G"}), cat("c4", {"p", "q", "r", "s", "p", "q"})});
  const auto one = linmod::encode_design(t, "y", {}, std::vector<std::string>{"model"});
  ASSERT_EQ(one.terms.size(), 3u);
  EXPECT_EQ(one.terms[1], "model[B2C]");
  EXPECT_EQ(one.terms[2], "model[B2G]");

  const auto none = linmod::encode_design(t, "y", {}, {});
  EXPECT_EQ(none.x.cols(), 1);

  const auto full = linmod::encode_design(t, "y", std::vector<std::string>{"a", "b"},
                                          std::vector<std::string>{"model", "c4"});
  EXPECT_EQ(full.x.cols(), 8);
  EXPECT_EQ(full.terms[0], "(Intercept)");
}

TEST(EncodeDesign, SingleLevelIsDegenerate) {
  const data::DataTable t = testing::table({response("y", {1, 2}), cat("c", {"a", "a"})});
  try {
    linmod::encode_design(t, "y", {}, std::vector<std::string>{"c"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_category);
  }
}

TEST(Ols, ExactLine) {
  const auto fit = simple_fit({0, 1, 2}, {1, 3, 5});
  EXPECT_NEAR(fit.coefficients[0], 1.0, 1e-12);
  EXPECT_NEAR(fit.coefficients[1], 2.0, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
}

TEST(Ols, HandNormalEquations) {
  const auto fit = simple_fit({0, 1, 2}, {0, 1, 1});
  EXPECT_NEAR(fit.coefficients[1], 0.5, 1e-12);
  EXPECT_NEAR(fit.coefficients[0], 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(fit.r2, 0.75, 1e-12);
  // SSres = 1/6, sigma^2 = 1/6, Var(slope) = sigma^2 / Sxx = 1/12.
  EXPECT_NEAR(fit.std_errors[1], std::sqrt(1.0 / 12.0), 1e-12);
  EXPECT_EQ(fit.df_resid, 1u);
  EXPECT_NEAR(fit.adj_r2, 1 - 0.25 * 2.0 / 1.0, 1e-12);
  // t = 0.5 / sqrt(1/12) = sqrt(3); two-sided p for t(1) = 1 - 2 atan(sqrt 3)/pi = 1/3.
  EXPECT_NEAR(fit.p_values[1], 1.0 / 3.0, 1e-12);
}

TEST(Ols, DuplicateColumnDropped) {
  const data::DataTable t = testing::table({response("y", {1, 3, 2, 5, 4}), num("a", {1, 2, 3, 4, 5}),
                                            num("b", {1, 2, 3, 4, 5})});
  const auto fit = linmod::fit_ols(linmod::encode_design(t, "y", std::vector<std::string>{"a", "b"}, {}));
  ASSERT_EQ(fit.dropped_terms.size(), 1u);
  EXPECT_EQ(fit.dropped_terms[0], "b");
  EXPECT_EQ(fit.terms.size(), 2u);
}

TEST(Ols, Errors) {
  try {
    simple_fit({1, 2, 3}, {4, 4, 4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_response);
  }
  try {
    simple_fit({1, 2}, {1, 5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::insufficient_data);
  }
}

TEST(Ols, AddingPredictorNeverLowersR2) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> y, a, b;
    for (int i = 0; i < 30; ++i) {
      a.push_back(z(rng));
      b.push_back(z(rng));
      y.push_back(a.back() + z(rng));
    }
    const data::DataTable t = testing::table({response("y", y), num("a", a), num("b", b)});
    const auto small = linmod::fit_ols(linmod::encode_design(t, "y", std::vector<std::string>{"a"}, {}));
    const auto big = linmod::fit_ols(linmod::encode_design(t, "y", std::vector<std::string>{"a", "b"}, {}));
    EXPECT_GE(big.r2, small.r2 - 1e-12);
    EXPECT_LE(big.adj_r2, big.r2);
  }
}

TEST(Ols, RowPermutationInvariance) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  std::vector<double> y, a;
  for (int i = 0; i < 40; ++i) {
    a.push_back(z(rng));
    y.push_back(2 * a.back() + z(rng));
  }
  const auto base = simple_fit(a, y);
  std::vector<std::size_t> idx(40);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<double> y2, a2;
  for (auto i : idx) {
    y2.push_back(y[i]);
    a2.push_back(a[i]);
  }
  const auto perm = simple_fit(a2, y2);
  for (std::size_t k = 0; k < base.coefficients.size(); ++k)
    EXPECT_NEAR(base.coefficients[k], perm.coefficients[k], 1e-10);
}

TEST(Ols, PredictMatchesFitted) {
  const data::DataTable t = testing::table({response("y", {1, 3, 2, 5}), num("a", {1, 2, 3, 4})});
  const auto design = linmod::encode_design(t, "y", std::vector<std::string>{"a"}, {});
  const auto fit = linmod::fit_ols(design);
  const Eigen::VectorXd all = fit.predict_all(design.x);
  const data::Record r{{"a", 3.0}};
  EXPECT_NEAR(fit.predict(linmod::encode_row(design, r)), all(2), 1e-12);
}

TEST(Stars, Thresholds) {
  EXPECT_EQ(linmod::significance_stars(0.004), "***");
  EXPECT_EQ(linmod::significance_stars(0.01), "**");
  EXPECT_EQ(linmod::significance_stars(0.049), "**");
  EXPECT_EQ(linmod::significance_stars(0.05), "*");
  EXPECT_EQ(linmod::significance_stars(0.0999), "*");
  EXPECT_EQ(linmod::significance_stars(0.1), "");
  EXPECT_EQ(linmod::significance_stars(0.2), "");
  EXPECT_THROW(linmod::significance_stars(1.5), Error);
  EXPECT_THROW(linmod::significance_stars(-0.1), Error);
}

TEST(FixedEffects, EqualSlopesDifferentIntercepts) {
  const data::DataTable t = testing::table({response("y", {1, 2, 3, 11, 12, 13}), num("x", {1, 2, 3, 1, 2, 3}),
                                            cat("g", {"a", "a", "a", "b", "b", "b"})});
  const auto fe = linmod::fit_fixed_effects(t, "y", std::vector<std::string>{"x"}, "g");
  EXPECT_NEAR(fe.base.coefficients[0], 1.0, 1e-12);
  EXPECT_NEAR(fe.r2_within, 1.0, 1e-12);
  EXPECT_EQ(fe.n_groups, 2u);
  EXPECT_NEAR(fe.group_intercepts[0], 0.0, 1e-12);
  EXPECT_NEAR(fe.group_intercepts[1], 10.0, 1e-12);
}

TEST(FixedEffects, LsdvEquivalence) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z;
  std::vector<double> y, x1, x2;
  std::vector<std::string> g;
  for (int i = 0; i < 120; ++i) {
    const int grp = i % 7;
    x1.push_back(z(rng) + grp);
    x2.push_back(z(rng));
    y.push_back(0.7 * x1.back() - 0.3 * x2.back() + grp * grp * 0.2 + z(rng));
    g.push_back("g" + std::to_string(grp));
  }
  const data::DataTable t = testing::table({response("y", y), num("x1", x1), num("x2", x2), cat("g", g)});
  const std::vector<std::string> slopes{"x1", "x2"};
  const auto fe = linmod::fit_fixed_effects(t, "y", slopes, "g");
  const auto lsdv = linmod::fit_ols(linmod::encode_design(t, "y", slopes, std::vector<std::string>{"g"}));
  EXPECT_NEAR(fe.base.coefficients[0], lsdv.coefficient("x1"), 1e-8);
  EXPECT_NEAR(fe.base.coefficients[1], lsdv.coefficient("x2"), 1e-8);
  // Same residuals, so the same standard errors.
  EXPECT_NEAR(fe.base.std_errors[0], lsdv.std_errors[1], 1e-8);
  for (double r2 : {fe.r2_within, fe.r2_between, fe.r2_overall}) {
    EXPECT_GE(r2, 0.0);
    EXPECT_LE(r2, 1.0);
  }
}

TEST(FixedEffects, NoWithinVariationIsDegenerate) {
  const data::DataTable t =
      testing::table({response("y", {1, 1, 5, 5}), num("x", {1, 2, 3, 4}), cat("g", {"a", "a", "b", "b"})});
  try {
    linmod::fit_fixed_effects(t, "y", {}, "g");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::degenerate_response);
  }
}

TEST(FixedEffects, ConstantWithinGroupSlopeIsCollinear) {
  const data::DataTable t = testing::table(
      {response("y", {1, 2, 5, 7}), num("x", {1, 1, 3, 3}), cat("g", {"a", "a", "b", "b"})});
  try {
    linmod::fit_fixed_effects(t, "y", std::vector<std::string>{"x"}, "g");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::within_collinearity);
  }
}

TEST(FixedEffects, SmallGroupsCounted) {
  std::vector<double> y, x;
  std::vector<std::string> g;
  for (int i = 0; i < 14; ++i) {
    y.push_back(i * 0.5 + (i % 3));
    x.push_back(i);
    g.push_back(i < 10 ? "big" : (i < 12 ? "s1" : "s2"));
  }
  const data::DataTable t = testing::table({response("y", y), num("x", x), cat("g", g)});
  const auto fe = linmod::fit_fixed_effects(t, "y", std::vector<std::string>{"x"}, "g");
  EXPECT_EQ(fe.small_groups(5), 2u);
}

TEST(JointCategory, ObservedCombinationsOnly) {
  const data::DataTable full = testing::table(
      {cat("s", {"a", "a", "a", "a", "b", "b", "b", "b", "c", "c", "c", "c"}),
       cat("k", {"1", "2", "3", "4", "1", "2", "3", "4", "1", "2", "3", "4"})});
  const auto j = linmod::joint_category(full, std::vector<std::string>{"s", "k"});
  EXPECT_EQ(j.levels().size(), 12u);
  EXPECT_EQ(j.levels()[0], "a×1");

  const data::DataTable few =
      testing::table({cat("s", {"a", "a", "b", "b", "c", "c"}), cat("k", {"1", "1", "2", "3", "1", "4"})});
  EXPECT_EQ(linmod::joint_category(few, std::vector<std::string>{"s", "k"}).levels().size(), 5u);

  const data::DataTable gap = testing::table({cat("s", {"a", ""}), cat("k", {"1", "2"})});
  EXPECT_TRUE(linmod::joint_category(gap, std::vector<std::string>{"s", "k"}).missing(1));
}

TEST(JointCategory, NinetyGroupFixedEffects) {
  data::SynthConfig cfg;
  cfg.n = 900;
  cfg.categoricals = {{"a", 3, 0.5, {}}, {"b", 5, 0.5, {}}, {"c", 6, 0.5, {}}};
  const data::DataTable t = data::apply_transforms(data::synth_deals(cfg, 4), data::synth_schema(cfg));
  data::Column j = linmod::joint_category(t, std::vector<std::string>{"a", "b", "c"});
  ASSERT_EQ(j.levels().size(), 90u);
  const std::string name = j.name();
  const auto fe = linmod::fit_fixed_effects(t.with_column(std::move(j)), "ln_valuation",
                                            std::vector<std::string>{"ln_revenue", "ln_beta", "crp"}, name);
  EXPECT_EQ(fe.n_groups, 90u);
}

TEST(Synth, NoiselessRecoversAllCoefficients) {
  data::SynthConfig cfg;
  cfg.n = 400;
  cfg.noise_sd = 0.0;
  const data::DataTable t = data::apply_transforms(data::synth_deals(cfg, 17), data::synth_schema(cfg));
  const auto fit = linmod::fit_ols(
      linmod::encode_design(t, "ln_valuation", std::vector<std::string>{"ln_revenue", "ln_beta", "crp"}, {}));
  EXPECT_NEAR(fit.coefficient("(Intercept)"), cfg.intercept, 1e-8);
  EXPECT_NEAR(fit.coefficient("ln_revenue"), cfg.beta_revenue, 1e-8);
  EXPECT_NEAR(fit.coefficient("ln_beta"), cfg.beta_beta, 1e-8);
  EXPECT_NEAR(fit.coefficient("crp"), cfg.beta_crp, 1e-8);
}

}  // namespace
}  // namespace valtree
