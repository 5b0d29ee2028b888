#include <algorithm>
#include <cmath>
#include <map>

#include "valtree/cart.hpp"
#include "valtree/error.hpp"

namespace valtree::cart {

void GrowthControls::validate() const {
  if (minbucket < 1) throw Error(ErrorCode::config, "minbucket must be >= 1");
  if (minsplit < 2 * minbucket) throw Error(ErrorCode::config, "minsplit must be >= 2 * minbucket");
  if (!(cp_min > 0.0 && cp_min <= 1.0)) throw Error(ErrorCode::config, "cp_min must lie in (0, 1]");
  if (cv_folds < 2) throw Error(ErrorCode::config, "cv_folds must be >= 2");
}

GrowthControls GrowthControls::from_json(const nlohmann::json& doc) {
  GrowthControls c;
  if (doc.is_null()) return c;
  if (!doc.is_object()) throw Error(ErrorCode::config, "controls must be a JSON object");
  try {
    c.cp_min = doc.value("cp_min", c.cp_min);
    c.minsplit = doc.value("minsplit", c.minsplit);
    c.minbucket = doc.value("minbucket", c.minbucket);
    c.max_depth = doc.value("max_depth", c.max_depth);
    c.cv_folds = doc.value("cv_folds", c.cv_folds);
    c.seed = doc.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::config, std::string("controls: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json GrowthControls::to_json() const {
  return {{"cp_min", cp_min}, {"minsplit", minsplit}, {"minbucket", minbucket},
          {"max_depth", max_depth}, {"cv_folds", cv_folds}, {"seed", seed}};
}

TreeData make_tree_data(const data::DataTable& table, std::string_view response,
                        std::span<const std::string> predictors) {
  TreeData d;
  const data::Column& y = table.column(table.resolve(response));
  if (y.is_categorical()) throw Error(ErrorCode::schema, "response '" + y.name() + "' is categorical");
  if (y.missing_count() != 0)
    throw Error(ErrorCode::config, "response '" + y.name() + "' has missing values; drop those rows first");
  d.response = y.name();
  d.response_transform = y.transform();
  d.y.assign(y.values().begin(), y.values().end());
  for (const auto& p : predictors) {
    const data::Column& c = table.column(table.resolve(p));
    if (c.name() == d.response) throw Error(ErrorCode::config, "response used as a predictor");
    for (const auto& f : d.features)
      if (f.name == c.name()) throw Error(ErrorCode::config, "predictor '" + c.name() + "' listed twice");
    Feature f;
    f.name = c.name();
    f.source = c.source();
    f.transform = c.transform();
    if (c.is_categorical()) {
      f.kind = FeatureKind::categorical;
      f.levels = c.levels();
      d.codes.emplace_back(c.codes().begin(), c.codes().end());
      d.numeric.emplace_back();
    } else {
      f.kind = FeatureKind::numeric;
      d.numeric.emplace_back(c.values().begin(), c.values().end());
      d.codes.emplace_back();
    }
    d.features.push_back(std::move(f));
  }
  return d;
}

std::size_t RegressionTree::leaves() const {
  std::size_t count = 0;
  for (const auto& node : nodes) count += node.is_leaf() ? 1 : 0;
  return count;
}

double RegressionTree::sse() const {
  double s = 0.0;
  for (const auto& node : nodes)
    if (node.is_leaf()) s += node.sse;
  return s;
}

namespace {

bool contains(const std::vector<std::int32_t>& sorted, std::int32_t code) {
  return std::binary_search(sorted.begin(), sorted.end(), code);
}

}  // namespace

std::size_t leaf_for_row(const RegressionTree& tree, const TreeData& data, std::size_t row) {
  std::size_t at = 0;
  while (!tree.nodes[at].is_leaf()) {
    const TreeNode& node = tree.nodes[at];
    const Split& s = *node.split;
    bool go_left = s.missing_left;
    if (tree.features[s.feature].kind == FeatureKind::numeric) {
      const double v = data.numeric[s.feature][row];
      if (!std::isnan(v)) go_left = v <= s.threshold;
    } else {
      const auto c = data.codes[s.feature][row];
      if (c >= 0) {
        if (contains(s.left_levels, c)) go_left = true;
        else if (contains(s.right_levels, c)) go_left = false;
      }
    }
    at = static_cast<std::size_t>(go_left ? node.left : node.right);
  }
  return at;
}

Prediction predict_tree(const RegressionTree& tree, const data::Record& record) {
  Prediction out;
  auto flag = [&out](std::string text) {
    if (std::find(out.flags.begin(), out.flags.end(), text) == out.flags.end()) out.flags.push_back(std::move(text));
  };
  std::size_t at = 0;
  while (!tree.nodes[at].is_leaf()) {
    const TreeNode& node = tree.nodes[at];
    const Split& s = *node.split;
    const Feature& f = tree.features[s.feature];
    bool go_left = s.missing_left;
    if (f.kind == FeatureKind::numeric) {
      auto v = data::numeric_value(record, f.name, f.source, f.transform);
      if (v) {
        go_left = *v <= s.threshold;
      } else {
        out.routed_missing = true;
        flag("missing '" + f.name + "' routed to majority branch");
      }
    } else {
      auto level = data::level_value(record, f.name);
      if (!level) {
        out.routed_missing = true;
        flag("missing '" + f.name + "' routed to majority branch");
      } else {
        auto it = std::find(f.levels.begin(), f.levels.end(), *level);
        const auto code = it == f.levels.end() ? -1 : static_cast<std::int32_t>(it - f.levels.begin());
        if (code >= 0 && contains(s.left_levels, code)) {
          go_left = true;
        } else if (code >= 0 && contains(s.right_levels, code)) {
          go_left = false;
        } else if (code < 0) {
          out.unseen_level = true;
          flag("level '" + *level + "' of '" + f.name + "' unseen in training, routed to majority branch");
        }
      }
    }
    at = static_cast<std::size_t>(go_left ? node.left : node.right);
  }
  out.leaf = at;
  out.value = tree.nodes[at].prediction;
  out.valuation = tree.response_transform == data::Transform::natural_log ? std::exp(out.value) : out.value;
  return out;
}

std::vector<Importance> variable_importance(const RegressionTree& tree) {
  std::map<std::size_t, double> by_feature;
  double total = 0.0;
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) continue;
    by_feature[node.split->feature] += node.improvement;
    total += node.improvement;
  }
  std::vector<Importance> out;
  if (by_feature.empty() || !(total > 0.0)) return out;
  for (const auto& [feature, imp] : by_feature)
    out.push_back({tree.features[feature].name, std::lround(100.0 * imp / total)});
  std::sort(out.begin(), out.end(), [](const Importance& a, const Importance& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.variable < b.variable;
  });
  return out;
}

}  // namespace valtree::cart
