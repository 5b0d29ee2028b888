#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"

namespace valtree {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 20-row step data: valuation jumps from 1e5 to 1e6 at revenue 10.5.
fs::path step_workspace(const std::string& name) {
  const fs::path dir = testing::scratch_dir(name);
  std::string csv = "valuation,revenue,sector\n";
  for (int i = 1; i <= 20; ++i)
    csv += std::to_string(i <= 10 ? 100000 : 1000000) + "," + std::to_string(i) + "," + (i % 2 ? "A" : "B") + "\n";
  write(dir / "deals.csv", csv);
  write(dir / "schema.json", R"({"valuation": {"kind": "response", "transform": "natural_log", "units": "EUR"},
    "revenue": {"kind": "continuous", "transform": "natural_log", "units": "EUR"},
    "sector": {"kind": "categorical"}})");
  write(dir / "c.json", R"({"schema": "schema.json", "data": "deals.csv", "seed": 5, "out": "out",
    "models": [{"name": "tree", "family": "cart", "predictors": ["revenue", "sector"],
                "controls": {"minsplit": 2, "minbucket": 1, "cv_folds": 5}}]})");
  return dir;
}

TEST(Cli, FitTreeWritesCpTable) {
  const fs::path dir = step_workspace("fit_tree");
  const auto r = run({"fit-tree", "--config", (dir / "c.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "tree.cp.txt"));
  EXPECT_TRUE(fs::exists(dir / "out" / "tree.cp.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "tree.tree.json"));
  EXPECT_NE(r.out.find("End Nodes: 2"), std::string::npos) << r.out;
  EXPECT_TRUE(r.err.empty());
}

TEST(Cli, PredictWithMissingRevenue) {
  const fs::path dir = step_workspace("predict");
  ASSERT_EQ(run({"fit-tree", "--config", (dir / "c.json").string()}).code, 0);
  write(dir / "r.json", R"({"revenue": null, "sector": "A"})");
  const auto r = run({"predict", "--model", (dir / "out" / "tree.tree.json").string(), "--record",
                      (dir / "r.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc.at("valuation").get<double>(), 100000.0, 1e-6);
  ASSERT_EQ(doc.at("flags").size(), 1u);
  EXPECT_NE(doc.at("flags")[0].get<std::string>().find("missing"), std::string::npos);
}

TEST(Cli, NoLogModeEmitsEur) {
  const fs::path dir = step_workspace("nolog");
  const auto r = run({"fit-tree", "--config", (dir / "c.json").string(), "--no-log"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto tree = nlohmann::json::parse(slurp(dir / "out" / "tree.tree.json"));
  EXPECT_EQ(tree.at("response"), "valuation");
  EXPECT_EQ(tree.at("response_transform"), "none");
  write(dir / "r.json", R"({"revenue": 15})");
  const auto p = run({"predict", "--model", (dir / "out" / "tree.tree.json").string(), "--record",
                      (dir / "r.json").string()});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(nlohmann::json::parse(p.out).at("valuation").get<double>(), 1000000.0);
}

TEST(Cli, ForestCardinalityLimit) {
  const fs::path dir = testing::scratch_dir("cardinality");
  write(dir / "c.json", R"({"seed": 1, "synth": {"n": 300, "categoricals": [{"name": "city", "levels": 58}]},
    "models": [{"name": "rf", "family": "forest", "predictors": ["city"], "n_trees": 5, "mtry": 1}]})");
  const auto r = run({"fit-forest", "--config", (dir / "c.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("at most 53 categories"), std::string::npos) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"fit-tree", "--bogus"}).code, 2);
  EXPECT_EQ(run({"explode"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ModuleErrorsExitOne) {
  const fs::path dir = testing::scratch_dir("errors");
  EXPECT_EQ(run({"fit-tree", "--config", (dir / "missing.json").string()}).code, 1);
  write(dir / "c.json", R"({"synth": {"n": 50}, "models": [{"name": "t", "family": "cart", "predictors": ["revenue"]}]})");
  const auto r = run({"fit-tree", "--config", (dir / "c.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("seed"), std::string::npos);
  write(dir / "dup.json", R"({"models": [{"name": "a", "family": "ols"}, {"name": "a", "family": "cart"}]})");
  EXPECT_EQ(run({"fit-ols", "--config", (dir / "dup.json").string()}).code, 1);
}

TEST(Cli, ArtifactsAreByteIdentical) {
  const fs::path dir = testing::scratch_dir("determinism");
  write(dir / "c.json", R"({"seed": 3, "threads": 2,
    "synth": {"n": 300, "revenue_missing_rate": 0.1, "categoricals": [{"name": "sector", "levels": 5}]},
    "models": [
      {"name": "dcf", "family": "ols", "predictors": ["revenue", "beta", "crp"]},
      {"name": "fe", "family": "fixed_effects", "predictors": ["revenue"], "group": "sector"},
      {"name": "tree", "family": "cart", "predictors": ["revenue", "beta", "crp", "sector"]},
      {"name": "rf", "family": "forest", "predictors": ["revenue", "beta", "crp"], "n_trees": 20, "mtry": 1, "save_model": true},
      {"name": "card", "family": "scorecard", "blocks": {"financial": ["revenue"], "non_financial": ["sector"]}}]})");
  for (const char* out : {"a", "b"}) {
    for (const char* cmd : {"fit-ols", "fit-fe", "fit-tree", "fit-forest", "fit-scorecard", "compare"}) {
      const auto r = run({cmd, "--config", (dir / "c.json").string(), "--out", (dir / out).string()});
      ASSERT_EQ(r.code, 0) << cmd << ": " << r.err;
    }
  }
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / e.path().filename())) << e.path();
    ++compared;
  }
  EXPECT_GE(compared, 10u);
}

TEST(Cli, SynthIngestAndExportDot) {
  const fs::path dir = testing::scratch_dir("synth");
  ASSERT_EQ(run({"synth", "--seed", "4", "--out", (dir / "data").string()}).code, 0);
  ASSERT_TRUE(fs::exists(dir / "data" / "deals.csv"));
  const auto ingest = run({"ingest", "--data", (dir / "data" / "deals.csv").string(), "--schema",
                           (dir / "data" / "schema.json").string()});
  ASSERT_EQ(ingest.code, 0) << ingest.err;
  EXPECT_NE(ingest.out.find("ln_valuation"), std::string::npos);

  const fs::path ws = step_workspace("dot");
  ASSERT_EQ(run({"fit-tree", "--config", (ws / "c.json").string()}).code, 0);
  const auto dot = run({"export-dot", "--model", (ws / "out" / "tree.tree.json").string()});
  ASSERT_EQ(dot.code, 0);
  EXPECT_EQ(dot.out.rfind("digraph", 0), 0u);
}

}  // namespace
}  // namespace valtree
