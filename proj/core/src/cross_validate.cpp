#include <cmath>
#include <limits>
#include <numeric>

#include "valtree/cart.hpp"
#include "valtree/error.hpp"
#include "valtree/parallel.hpp"

namespace valtree::cart {
namespace {

constexpr std::uint64_t kFoldStream = 0xF01D;

}  // namespace

std::vector<CvPoint> cross_validate(const TreeData& data, const GrowthControls& controls,
                                    std::span<const double> cp_values, std::size_t threads) {
  controls.validate();
  const std::size_t n = data.rows();
  const std::size_t folds = controls.cv_folds;
  if (folds > n)
    throw Error(ErrorCode::config, std::to_string(folds) + " folds requested for " + std::to_string(n) + " rows");
  const std::size_t m = cp_values.size();
  if (m == 0) return {};

  const double mean = std::accumulate(data.y.begin(), data.y.end(), 0.0) / static_cast<double>(n);
  double root_sse = 0.0;
  for (double v : data.y) root_sse += (v - mean) * (v - mean);
  if (!(root_sse > 0.0)) throw Error(ErrorCode::degenerate_response, "response has zero SSE at the root");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Engine engine = make_engine(controls.seed, kFoldStream);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(engine, i));
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::size_t> fold_of(n);
  for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = i % folds;

  // Row 0 is the root-only tree; later rows prune between neighbouring cps.
  std::vector<double> beta(m);
  beta[0] = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < m; ++i) beta[i] = std::sqrt(cp_values[i] * cp_values[i - 1]);

  // errors[i * n + row]: each fold writes only its own held-out rows.
  std::vector<double> errors(m * n, 0.0);
  parallel_for(folds, threads, [&](std::size_t fold) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t r = 0; r < n; ++r) (fold_of[r] == fold ? test : train).push_back(r);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto r : train) {
      lo = std::min(lo, data.y[r]);
      hi = std::max(hi, data.y[r]);
    }
    if (train.empty() || !(hi > lo))
      throw Error(ErrorCode::degenerate_fold,
                  "fold " + std::to_string(fold + 1) + " has zero training variance");

    const RegressionTree tree = grow_rows(data, train, controls);
    const auto complexity = node_complexity(tree);
    std::vector<std::size_t> path;
    for (auto r : test) {
      path.clear();
      const std::size_t leaf = leaf_for_row(tree, data, r);
      // Reconstruct the root-to-leaf path by descending again.
      std::size_t at = 0;
      path.push_back(at);
      while (at != leaf) {
        const TreeNode& node = tree.nodes[at];
        const auto left = static_cast<std::size_t>(node.left);
        const auto right = static_cast<std::size_t>(node.right);
        at = (right <= leaf) ? right : left;
        path.push_back(at);
      }
      for (std::size_t i = 0; i < m; ++i) {
        double pred = tree.nodes[leaf].prediction;
        for (auto node : path) {
          if (tree.nodes[node].is_leaf() || complexity[node] <= beta[i]) {
            pred = tree.nodes[node].prediction;
            break;
          }
        }
        const double e = data.y[r] - pred;
        errors[i * n + r] = e * e;
      }
    }
  });

  std::vector<CvPoint> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double e = errors[i * n + r];
      sum += e;
      sum_sq += e * e;
    }
    out[i].xerror = sum / root_sse;
    out[i].xstd = std::sqrt(std::max(0.0, sum_sq - sum * sum / static_cast<double>(n))) / root_sse;
  }
  return out;
}

std::vector<CvPoint> cross_validate(const data::DataTable& table, std::string_view response,
                                    std::span<const std::string> predictors,
                                    const GrowthControls& controls, std::size_t threads) {
  const RegressionTree tree = grow(table, response, predictors, controls);
  const CpTable pruned = pruning_table(tree);
  std::vector<double> cps;
  for (const auto& row : pruned.rows) cps.push_back(row.cp);
  return cross_validate(make_tree_data(table, response, predictors), controls, cps, threads);
}

}  // namespace valtree::cart
