#include <algorithm>
#include <cmath>
#include <numeric>

#include "valtree/cart.hpp"
#include "valtree/error.hpp"

namespace valtree::cart {
namespace {

constexpr double kNoiseFraction = 1e-12;

struct NodeStats {
  double mean = 0.0;
  double sse = 0.0;
};

NodeStats stats(const std::vector<double>& y, std::span<const std::size_t> rows) {
  NodeStats s;
  if (rows.empty()) return s;
  double sum = 0.0;
  for (auto r : rows) sum += y[r];
  s.mean = sum / static_cast<double>(rows.size());
  for (auto r : rows) s.sse += (y[r] - s.mean) * (y[r] - s.mean);
  return s;
}

struct Candidate {
  Split split;
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  std::size_t n_missing = 0;
  double improvement = 0.0;
};

class Grower {
 public:
  Grower(const TreeData& data, const GrowthControls& controls, const GrowOptions& options)
      : data_(data), controls_(controls), options_(options) {
    pool_.resize(data.features.size());
    std::iota(pool_.begin(), pool_.end(), 0);
  }

  RegressionTree run(std::vector<std::size_t> rows) {
    tree_.features = data_.features;
    tree_.response = data_.response;
    tree_.response_transform = data_.response_transform;
    tree_.controls = controls_;
    const NodeStats root = stats(data_.y, rows);
    root_sse_ = root.sse;
    const double cp = options_.cp_min.value_or(controls_.cp_min);
    bar_ = std::max(cp * root_sse_, kNoiseFraction * root_sse_);
    build(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  std::vector<std::size_t> candidate_features() {
    const std::size_t p = pool_.size();
    if (options_.mtry == 0 || options_.mtry >= p || options_.engine == nullptr) {
      std::vector<std::size_t> all(p);
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    for (std::size_t i = 0; i < options_.mtry; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_index(*options_.engine, p - i));
      std::swap(pool_[i], pool_[j]);
    }
    std::vector<std::size_t> picked(pool_.begin(), pool_.begin() + static_cast<std::ptrdiff_t>(options_.mtry));
    std::sort(picked.begin(), picked.end());
    return picked;
  }

  std::optional<Candidate> evaluate(std::size_t f, const std::vector<std::size_t>& rows, double node_sse) {
    std::vector<std::size_t> present;
    present.reserve(rows.size());
    std::vector<double> ys;
    ys.reserve(rows.size());
    Candidate c;
    c.split.feature = f;
    if (data_.features[f].kind == FeatureKind::numeric) {
      const auto& col = data_.numeric[f];
      std::vector<double> xs;
      xs.reserve(rows.size());
      for (auto r : rows) {
        if (std::isnan(col[r])) continue;
        present.push_back(r);
        xs.push_back(col[r]);
        ys.push_back(data_.y[r]);
      }
      auto best = best_split_numeric(xs, ys, controls_.minbucket);
      if (!best) return std::nullopt;
      c.split.threshold = best->threshold;
      c.split.missing_left = best->n_left >= best->n_right;
      for (auto r : rows) {
        const double v = col[r];
        const bool left = std::isnan(v) ? c.split.missing_left : v <= c.split.threshold;
        (left ? c.left : c.right).push_back(r);
      }
    } else {
      const auto& col = data_.codes[f];
      std::vector<std::int32_t> cs;
      cs.reserve(rows.size());
      for (auto r : rows) {
        if (col[r] < 0) continue;
        present.push_back(r);
        cs.push_back(col[r]);
        ys.push_back(data_.y[r]);
      }
      auto best = best_split_categorical(cs, ys, controls_.minbucket);
      if (!best) return std::nullopt;
      c.split.left_levels = std::move(best->left_levels);
      c.split.right_levels = std::move(best->right_levels);
      c.split.missing_left = best->n_left >= best->n_right;
      for (auto r : rows) {
        const auto code = col[r];
        bool left = c.split.missing_left;
        if (code >= 0) left = std::binary_search(c.split.left_levels.begin(), c.split.left_levels.end(), code);
        (left ? c.left : c.right).push_back(r);
      }
    }
    c.n_missing = rows.size() - present.size();
    c.improvement = node_sse - stats(data_.y, c.left).sse - stats(data_.y, c.right).sse;
    return c;
  }

  std::int32_t build(std::vector<std::size_t> rows, std::size_t depth) {
    const auto index = static_cast<std::int32_t>(tree_.nodes.size());
    const NodeStats s = stats(data_.y, rows);
    TreeNode node;
    node.prediction = s.mean;
    node.n = rows.size();
    node.sse = s.sse;
    node.depth = depth;
    tree_.nodes.push_back(node);

    if (rows.size() < controls_.minsplit || depth >= controls_.max_depth || s.sse <= bar_) return index;

    std::optional<Candidate> best;
    for (auto f : candidate_features()) {
      auto c = evaluate(f, rows, s.sse);
      if (c && (!best || c->improvement > best->improvement)) best = std::move(c);
    }
    // Strict: a split must beat cp * SSE(root), so cp = 1 always yields the root.
    if (!best || !(best->improvement > bar_)) return index;

    auto& stored = tree_.nodes[static_cast<std::size_t>(index)];
    stored.split = std::move(best->split);
    stored.improvement = best->improvement;
    stored.n_missing = best->n_missing;
    rows.clear();
    rows.shrink_to_fit();
    const auto left = build(std::move(best->left), depth + 1);
    const auto right = build(std::move(best->right), depth + 1);
    tree_.nodes[static_cast<std::size_t>(index)].left = left;
    tree_.nodes[static_cast<std::size_t>(index)].right = right;
    return index;
  }

  const TreeData& data_;
  const GrowthControls& controls_;
  const GrowOptions& options_;
  std::vector<std::size_t> pool_;
  RegressionTree tree_;
  double root_sse_ = 0.0;
  double bar_ = 0.0;
};

}  // namespace

RegressionTree grow_rows(const TreeData& data, std::span<const std::size_t> rows,
                         const GrowthControls& controls, const GrowOptions& options) {
  if (rows.empty()) throw Error(ErrorCode::insufficient_data, "cannot grow a tree on zero rows");
  Grower grower(data, controls, options);
  return grower.run(std::vector<std::size_t>(rows.begin(), rows.end()));
}

RegressionTree grow(const data::DataTable& table, std::string_view response,
                    std::span<const std::string> predictors, const GrowthControls& controls) {
  controls.validate();
  const TreeData data = make_tree_data(table, response, predictors);
  const std::size_t n = data.rows();
  if (n < controls.minsplit)
    throw Error(ErrorCode::insufficient_data, std::to_string(n) + " rows is fewer than minsplit = " +
                                                  std::to_string(controls.minsplit));
  const double mean = std::accumulate(data.y.begin(), data.y.end(), 0.0) / static_cast<double>(n);
  double spread = 0.0;
  double scale = 1.0;
  for (double v : data.y) {
    spread = std::max(spread, std::abs(v - mean));
    scale = std::max(scale, std::abs(v));
  }
  if (spread <= 1e-12 * scale)
    throw Error(ErrorCode::degenerate_response, "response '" + data.response + "' has zero SSE at the root");
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return grow_rows(data, rows, controls);
}

}  // namespace valtree::cart
