#include <algorithm>
#include <cmath>
#include <limits>

#include "valtree/cart.hpp"
#include "valtree/error.hpp"

namespace valtree::cart {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Weakest links within this relative distance of the minimum are snipped together.
constexpr double kTieFraction = 1e-12;

struct PruneStep {
  double cp = 0.0;
  std::size_t nsplit = 0;
  double sse = 0.0;
};

struct WeakestLink {
  std::vector<double> complexity;
  std::vector<PruneStep> steps;
};

WeakestLink weakest_link(const RegressionTree& tree) {
  const std::size_t n = tree.nodes.size();
  const double root_sse = tree.root_sse();
  WeakestLink out;
  out.complexity.assign(n, kInf);
  std::vector<char> collapsed(n, 0);
  std::vector<double> sub_sse(n);
  std::vector<std::size_t> leaves(n);
  std::vector<char> reachable(n);

  for (;;) {
    for (std::size_t k = n; k-- > 0;) {
      const TreeNode& node = tree.nodes[k];
      if (node.is_leaf() || collapsed[k]) {
        sub_sse[k] = node.sse;
        leaves[k] = 1;
      } else {
        const auto l = static_cast<std::size_t>(node.left);
        const auto r = static_cast<std::size_t>(node.right);
        sub_sse[k] = sub_sse[l] + sub_sse[r];
        leaves[k] = leaves[l] + leaves[r];
      }
    }
    std::fill(reachable.begin(), reachable.end(), 0);
    reachable[0] = 1;
    double g_min = kInf;
    for (std::size_t k = 0; k < n; ++k) {
      const TreeNode& node = tree.nodes[k];
      if (!reachable[k] || node.is_leaf() || collapsed[k]) continue;
      reachable[static_cast<std::size_t>(node.left)] = 1;
      reachable[static_cast<std::size_t>(node.right)] = 1;
      const double g = (node.sse - sub_sse[k]) / static_cast<double>(leaves[k] - 1) / root_sse;
      g_min = std::min(g_min, g);
    }
    if (g_min == kInf) break;

    const double cutoff = g_min + kTieFraction * std::abs(g_min);
    for (std::size_t k = 0; k < n; ++k) {
      const TreeNode& node = tree.nodes[k];
      if (!reachable[k] || node.is_leaf() || collapsed[k]) continue;
      const double g = (node.sse - sub_sse[k]) / static_cast<double>(leaves[k] - 1) / root_sse;
      if (g <= cutoff) collapsed[k] = 1;
    }
    // Snipped nodes and every internal node beneath them leave at g_min.
    for (std::size_t k = 0; k < n; ++k) {
      if (collapsed[k] && out.complexity[k] == kInf) out.complexity[k] = g_min;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const TreeNode& node = tree.nodes[k];
      if (node.is_leaf() || out.complexity[k] == kInf) continue;
      for (auto child : {node.left, node.right}) {
        const auto c = static_cast<std::size_t>(child);
        if (!tree.nodes[c].is_leaf() && out.complexity[c] == kInf) out.complexity[c] = out.complexity[k];
      }
    }

    PruneStep step;
    step.cp = g_min;
    // Recount the pruned tree.
    std::fill(reachable.begin(), reachable.end(), 0);
    reachable[0] = 1;
    for (std::size_t k = 0; k < n; ++k) {
      if (!reachable[k]) continue;
      const TreeNode& node = tree.nodes[k];
      if (node.is_leaf() || collapsed[k]) {
        step.sse += node.sse;
        continue;
      }
      ++step.nsplit;
      reachable[static_cast<std::size_t>(node.left)] = 1;
      reachable[static_cast<std::size_t>(node.right)] = 1;
    }
    out.steps.push_back(step);
  }
  return out;
}

}  // namespace

std::vector<double> node_complexity(const RegressionTree& tree) { return weakest_link(tree).complexity; }

RegressionTree prune(const RegressionTree& tree, double cp) {
  const auto complexity = node_complexity(tree);
  RegressionTree out;
  out.features = tree.features;
  out.response = tree.response;
  out.response_transform = tree.response_transform;
  out.controls = tree.controls;

  // Preorder copy; children are appended right after their parent's subtree starts.
  auto copy = [&](auto&& self, std::size_t at) -> std::int32_t {
    const auto index = static_cast<std::int32_t>(out.nodes.size());
    TreeNode node = tree.nodes[at];
    const bool keep = !node.is_leaf() && complexity[at] > cp;
    if (!keep) {
      node.split.reset();
      node.improvement = 0.0;
      node.n_missing = 0;
      node.left = node.right = -1;
      out.nodes.push_back(std::move(node));
      return index;
    }
    out.nodes.push_back(node);
    const auto l = self(self, static_cast<std::size_t>(node.left));
    const auto r = self(self, static_cast<std::size_t>(node.right));
    out.nodes[static_cast<std::size_t>(index)].left = l;
    out.nodes[static_cast<std::size_t>(index)].right = r;
    return index;
  };
  copy(copy, 0);
  return out;
}

CpTable pruning_table(const RegressionTree& tree) {
  const WeakestLink wl = weakest_link(tree);
  const double root_sse = tree.root_sse();
  CpTable table;
  table.n_obs = tree.n_train();
  table.end_nodes = tree.leaves();
  if (wl.steps.empty()) {
    table.rows.push_back({1.0, 0, 1.0, 0.0, 0.0});
    return table;
  }
  for (std::size_t j = wl.steps.size(); j-- > 0;) {
    const PruneStep& s = wl.steps[j];
    table.rows.push_back({s.cp, s.nsplit, s.sse / root_sse, 0.0, 0.0});
  }
  table.rows.push_back({tree.controls.cp_min, tree.splits(), tree.sse() / root_sse, 0.0, 0.0});
  return table;
}

CpTable cp_table(const RegressionTree& tree, const data::DataTable& table, const GrowthControls& controls,
                 std::size_t threads) {
  controls.validate();
  CpTable out = pruning_table(tree);
  std::vector<std::string> names;
  for (const auto& f : tree.features) names.push_back(f.name);
  const TreeData data = make_tree_data(table, tree.response, names);
  if (data.rows() != tree.n_train())
    throw Error(ErrorCode::config, "cp_table: table has " + std::to_string(data.rows()) +
                                       " rows but the tree was grown on " + std::to_string(tree.n_train()));
  std::vector<double> cps;
  for (const auto& row : out.rows) cps.push_back(row.cp);
  const auto cv = cross_validate(data, controls, cps, threads);
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    out.rows[i].xerror = cv[i].xerror;
    out.rows[i].xstd = cv[i].xstd;
  }
  out.cross_validated = true;
  return out;
}

}  // namespace valtree::cart
