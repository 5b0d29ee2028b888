#include "valtree/forest.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "valtree/error.hpp"
#include "valtree/parallel.hpp"
#include "valtree/rng.hpp"

namespace valtree::forest {
namespace {

OobStats compute_oob(const ForestModel& model, const cart::TreeData& data) {
  const std::size_t n = data.rows();
  if (n != model.n_rows)
    throw Error(ErrorCode::config, "oob_stats: table has " + std::to_string(n) + " rows, forest was trained on " +
                                       std::to_string(model.n_rows));
  const double mean = std::accumulate(data.y.begin(), data.y.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : data.y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  if (!(var > 0.0)) throw Error(ErrorCode::degenerate_response, "response has zero variance");

  std::vector<double> sum(n, 0.0);
  std::vector<std::uint32_t> count(n, 0);
  std::vector<char> in_bag(n);
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    std::fill(in_bag.begin(), in_bag.end(), 0);
    for (auto r : model.bootstrap_rows[t]) in_bag[r] = 1;
    const auto& tree = model.trees[t];
    for (std::size_t r = 0; r < n; ++r) {
      if (in_bag[r]) continue;
      sum[r] += tree.nodes[cart::leaf_for_row(tree, data, r)].prediction;
      ++count[r];
    }
  }
  OobStats s;
  double sq = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (count[r] == 0) {
      ++s.skipped;
      continue;
    }
    const double e = data.y[r] - sum[r] / count[r];
    sq += e * e;
    ++s.scored;
  }
  if (s.scored == 0) throw Error(ErrorCode::insufficient_data, "no row is out-of-bag for any tree");
  s.oob_mse = sq / static_cast<double>(s.scored);
  s.pct_var_explained = 100.0 * (1.0 - s.oob_mse / var);
  return s;
}

}  // namespace

ForestModel fit_forest(const data::DataTable& table, std::string_view response,
                       std::span<const std::string> predictors, const ForestOptions& options) {
  if (options.n_trees < 1) throw Error(ErrorCode::config, "n_trees must be >= 1");
  if (options.mtry < 1 || options.mtry > predictors.size())
    throw Error(ErrorCode::config, "mtry must lie in [1, " + std::to_string(predictors.size()) + "], got " +
                                       std::to_string(options.mtry));
  if (options.controls.minbucket < 1) throw Error(ErrorCode::config, "minbucket must be >= 1");

  ForestModel model;
  if (options.max_categories > kDefaultMaxCategories)
    model.warnings.push_back("max_categories raised to " + std::to_string(options.max_categories) +
                             " above the usual limit of " + std::to_string(kDefaultMaxCategories));
  for (const auto& p : predictors) {
    const data::Column& c = table.column(table.resolve(p));
    if (!c.is_categorical()) continue;
    std::set<std::int32_t> seen;
    for (auto code : c.codes())
      if (code >= 0) seen.insert(code);
    if (seen.size() > options.max_categories)
      throw Error(ErrorCode::cardinality,
                  "categorical '" + c.name() + "' has " + std::to_string(seen.size()) +
                      " levels; random forests accept at most " + std::to_string(options.max_categories) +
                      " categories per variable");
  }

  const cart::TreeData data = cart::make_tree_data(table, response, predictors);
  const std::size_t n = data.rows();
  if (n < 2) throw Error(ErrorCode::insufficient_data, "forest needs at least 2 rows");

  cart::GrowthControls member = options.controls;
  member.minsplit = 2 * member.minbucket;

  model.n_trees = options.n_trees;
  model.mtry = options.mtry;
  model.seed = options.seed;
  model.max_categories = options.max_categories;
  model.response = data.response;
  model.response_transform = data.response_transform;
  for (const auto& f : data.features) model.predictors.push_back(f.name);
  model.n_rows = n;
  model.trees.resize(options.n_trees);
  model.bootstrap_rows.resize(options.n_trees);

  parallel_for(options.n_trees, options.threads, [&](std::size_t t) {
    Engine engine = make_engine(options.seed, t);
    std::vector<std::uint32_t> drawn(n);
    if (options.bootstrap) {
      for (auto& r : drawn) r = static_cast<std::uint32_t>(uniform_index(engine, n));
    } else {
      std::iota(drawn.begin(), drawn.end(), 0U);
    }
    std::vector<std::size_t> rows(drawn.begin(), drawn.end());
    cart::GrowOptions grow;
    grow.mtry = options.mtry;
    grow.engine = &engine;
    grow.cp_min = 0.0;
    model.trees[t] = cart::grow_rows(data, rows, member, grow);
    model.bootstrap_rows[t] = std::move(drawn);
  });

  if (options.bootstrap) {
    const OobStats s = compute_oob(model, data);
    model.oob_mse = s.oob_mse;
    model.pct_var_explained = s.pct_var_explained;
    model.oob_scored = s.scored;
    model.oob_skipped = s.skipped;
  } else {
    model.oob_skipped = n;
  }
  return model;
}

OobStats oob_stats(const ForestModel& model, const data::DataTable& table, std::string_view response) {
  return compute_oob(model, cart::make_tree_data(table, response, model.predictors));
}

ForestPrediction predict_forest(const ForestModel& model, const data::Record& record) {
  if (model.trees.empty()) throw Error(ErrorCode::config, "forest has no trees");
  ForestPrediction out;
  double sum = 0.0;
  for (const auto& tree : model.trees) {
    const auto p = cart::predict_tree(tree, record);
    sum += p.value;
    out.routed_missing = out.routed_missing || p.routed_missing;
    out.unseen_level = out.unseen_level || p.unseen_level;
  }
  out.value = sum / static_cast<double>(model.trees.size());
  out.valuation = model.response_transform == data::Transform::natural_log ? std::exp(out.value) : out.value;
  return out;
}

nlohmann::json forest_summary_json(const ForestModel& model) {
  return {{"type", "Regression"},
          {"n_trees", model.n_trees},
          {"mtry", model.mtry},
          {"seed", model.seed},
          {"max_categories", model.max_categories},
          {"response", model.response},
          {"predictors", model.predictors},
          {"n_rows", model.n_rows},
          {"oob_mse", model.oob_mse},
          {"pct_var_explained", model.pct_var_explained},
          {"oob_scored", model.oob_scored},
          {"oob_skipped", model.oob_skipped},
          {"warnings", model.warnings}};
}

nlohmann::json forest_to_json(const ForestModel& model) {
  nlohmann::json doc = forest_summary_json(model);
  doc["schema_version"] = cart::kTreeSchemaVersion;
  doc["kind"] = "random_forest";
  doc["response_transform"] = data::to_string(model.response_transform);
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : model.trees) trees.push_back(cart::tree_to_json(t));
  doc["trees"] = std::move(trees);
  doc["bootstrap_rows"] = model.bootstrap_rows;
  return doc;
}

ForestModel forest_from_json(const nlohmann::json& doc) {
  ForestModel m;
  try {
    if (doc.value("kind", std::string()) != "random_forest")
      throw Error(ErrorCode::model_format, "document is not a random_forest");
    m.n_trees = doc.at("n_trees").get<std::size_t>();
    m.mtry = doc.at("mtry").get<std::size_t>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.max_categories = doc.at("max_categories").get<std::size_t>();
    m.response = doc.at("response").get<std::string>();
    m.response_transform = data::parse_transform(doc.at("response_transform").get<std::string>());
    m.predictors = doc.at("predictors").get<std::vector<std::string>>();
    m.n_rows = doc.at("n_rows").get<std::size_t>();
    m.oob_mse = doc.at("oob_mse").get<double>();
    m.pct_var_explained = doc.at("pct_var_explained").get<double>();
    m.oob_scored = doc.at("oob_scored").get<std::size_t>();
    m.oob_skipped = doc.at("oob_skipped").get<std::size_t>();
    m.warnings = doc.value("warnings", std::vector<std::string>{});
    for (const auto& t : doc.at("trees")) m.trees.push_back(cart::tree_from_json(t));
    m.bootstrap_rows = doc.at("bootstrap_rows").get<std::vector<std::vector<std::uint32_t>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::model_format, e.what());
  }
  if (m.trees.size() != m.n_trees || m.bootstrap_rows.size() != m.n_trees)
    throw Error(ErrorCode::model_format, "forest tree count does not match n_trees");
  return m;
}

}  // namespace valtree::forest
