#include <algorithm>

#include "valtree/cart.hpp"
#include "valtree/error.hpp"

namespace valtree::cart {
namespace {

std::vector<std::string> level_names(const Feature& f, const std::vector<std::int32_t>& codes) {
  std::vector<std::string> out;
  for (auto c : codes) out.push_back(f.levels.at(static_cast<std::size_t>(c)));
  return out;
}

std::vector<std::int32_t> level_codes(const Feature& f, const nlohmann::json& names) {
  std::vector<std::int32_t> out;
  for (const auto& name : names) {
    auto it = std::find(f.levels.begin(), f.levels.end(), name.get<std::string>());
    if (it == f.levels.end())
      throw Error(ErrorCode::model_format, "level '" + name.get<std::string>() + "' not declared for '" + f.name + "'");
    out.push_back(static_cast<std::int32_t>(it - f.levels.begin()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

nlohmann::json tree_to_json(const RegressionTree& tree) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : tree.features) {
    nlohmann::json e = {{"name", f.name},
                        {"source", f.source},
                        {"transform", data::to_string(f.transform)},
                        {"kind", f.kind == FeatureKind::numeric ? "numeric" : "categorical"}};
    if (f.kind == FeatureKind::categorical) e["levels"] = f.levels;
    features.push_back(std::move(e));
  }
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const TreeNode& node = tree.nodes[k];
    nlohmann::json e = {{"id", k},
                        {"n", node.n},
                        {"prediction", node.prediction},
                        {"sse", node.sse},
                        {"depth", node.depth}};
    if (node.split) {
      const Split& s = *node.split;
      const Feature& f = tree.features[s.feature];
      nlohmann::json split = {{"feature", f.name}, {"missing", s.missing_left ? "left" : "right"}};
      if (f.kind == FeatureKind::numeric) {
        split["threshold"] = s.threshold;
      } else {
        split["left_levels"] = level_names(f, s.left_levels);
        split["right_levels"] = level_names(f, s.right_levels);
      }
      e["split"] = std::move(split);
      e["improvement"] = node.improvement;
      e["n_missing"] = node.n_missing;
      e["left"] = node.left;
      e["right"] = node.right;
    }
    nodes.push_back(std::move(e));
  }
  return {{"schema_version", kTreeSchemaVersion},
          {"kind", "regression_tree"},
          {"response", tree.response},
          {"response_transform", data::to_string(tree.response_transform)},
          {"controls", tree.controls.to_json()},
          {"features", std::move(features)},
          {"nodes", std::move(nodes)}};
}

RegressionTree tree_from_json(const nlohmann::json& doc) {
  RegressionTree tree;
  try {
    if (doc.at("schema_version").get<int>() != kTreeSchemaVersion)
      throw Error(ErrorCode::model_format, "unsupported tree schema_version " + doc.at("schema_version").dump());
    if (doc.value("kind", std::string()) != "regression_tree")
      throw Error(ErrorCode::model_format, "document is not a regression_tree");
    tree.response = doc.at("response").get<std::string>();
    tree.response_transform = data::parse_transform(doc.at("response_transform").get<std::string>());
    tree.controls = GrowthControls::from_json(doc.at("controls"));
    for (const auto& e : doc.at("features")) {
      Feature f;
      f.name = e.at("name").get<std::string>();
      f.source = e.value("source", f.name);
      f.transform = data::parse_transform(e.value("transform", std::string("none")));
      const auto kind = e.at("kind").get<std::string>();
      if (kind == "categorical") {
        f.kind = FeatureKind::categorical;
        f.levels = e.at("levels").get<std::vector<std::string>>();
      } else if (kind != "numeric") {
        throw Error(ErrorCode::model_format, "unknown feature kind '" + kind + "'");
      }
      tree.features.push_back(std::move(f));
    }
    for (const auto& e : doc.at("nodes")) {
      TreeNode node;
      node.n = e.at("n").get<std::size_t>();
      node.prediction = e.at("prediction").get<double>();
      node.sse = e.at("sse").get<double>();
      node.depth = e.value("depth", std::size_t{0});
      if (e.contains("split")) {
        const auto& js = e.at("split");
        const auto name = js.at("feature").get<std::string>();
        Split s;
        auto it = std::find_if(tree.features.begin(), tree.features.end(),
                               [&](const Feature& f) { return f.name == name; });
        if (it == tree.features.end()) throw Error(ErrorCode::model_format, "split on undeclared feature '" + name + "'");
        s.feature = static_cast<std::size_t>(it - tree.features.begin());
        s.missing_left = js.at("missing").get<std::string>() == "left";
        if (it->kind == FeatureKind::numeric) {
          s.threshold = js.at("threshold").get<double>();
        } else {
          s.left_levels = level_codes(*it, js.at("left_levels"));
          s.right_levels = level_codes(*it, js.at("right_levels"));
        }
        node.split = std::move(s);
        node.improvement = e.at("improvement").get<double>();
        node.n_missing = e.value("n_missing", std::size_t{0});
        node.left = e.at("left").get<std::int32_t>();
        node.right = e.at("right").get<std::int32_t>();
      }
      tree.nodes.push_back(std::move(node));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::model_format, e.what());
  }
  const auto count = static_cast<std::int32_t>(tree.nodes.size());
  if (count == 0) throw Error(ErrorCode::model_format, "tree has no nodes");
  for (std::int32_t k = 0; k < count; ++k) {
    const auto& node = tree.nodes[static_cast<std::size_t>(k)];
    if (node.split && !(node.left > k && node.right > node.left && node.right < count))
      throw Error(ErrorCode::model_format, "node " + std::to_string(k) + " has invalid child indices");
  }
  return tree;
}

nlohmann::json cp_table_to_json(const CpTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"cp", r.cp}, {"nsplit", r.nsplit}, {"rel_error", r.rel_error}, {"xerror", r.xerror}, {"xstd", r.xstd}});
  return {{"n_obs", table.n_obs},
          {"end_nodes", table.end_nodes},
          {"cross_validated", table.cross_validated},
          {"rows", std::move(rows)}};
}

nlohmann::json importance_to_json(std::span<const Importance> importance) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& i : importance) out.push_back({{"variable", i.variable}, {"score", i.score}});
  return out;
}

}  // namespace valtree::cart
