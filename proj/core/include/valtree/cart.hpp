#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "valtree/dataset.hpp"
#include "valtree/rng.hpp"

namespace valtree::cart {

struct GrowthControls {
  double cp_min = 0.01;
  std::size_t minsplit = 20;
  std::size_t minbucket = 7;
  std::size_t max_depth = 30;
  std::size_t cv_folds = 10;
  std::uint64_t seed = 0;

  void validate() const;
  static GrowthControls from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

struct NumericSplit {
  double threshold = 0.0;  // left branch takes x <= threshold
  double improvement = 0.0;
  std::size_t n_left = 0;
  std::size_t n_right = 0;
};

// Best SSE-reducing cut among midpoints of consecutive distinct x values,
// subject to both sides holding at least minbucket rows. Ties keep the lower
// threshold. Returns nullopt when no cut reduces the SSE.
std::optional<NumericSplit> best_split_numeric(std::span<const double> x, std::span<const double> y,
                                               std::size_t minbucket = 1);

struct CategoricalSplit {
  std::vector<std::int32_t> left_levels;   // sorted level codes
  std::vector<std::int32_t> right_levels;  // sorted level codes
  double improvement = 0.0;
  std::size_t n_left = 0;
  std::size_t n_right = 0;
};

// Orders the observed levels by mean response and scans the k-1 prefix cuts.
// For squared error this attains the optimum over all 2^(k-1)-1 binary
// partitions. The left side is the low-mean prefix; ties keep the shorter
// prefix.
std::optional<CategoricalSplit> best_split_categorical(std::span<const std::int32_t> levels,
                                                       std::span<const double> y,
                                                       std::size_t minbucket = 1);

enum class FeatureKind { numeric, categorical };

struct Feature {
  std::string name;
  std::string source;
  data::Transform transform = data::Transform::none;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> levels;
};

// Column-major training matrix for tree growth. Missing numeric cells are
// NaN, missing categorical cells are -1.
struct TreeData {
  std::vector<Feature> features;
  std::vector<std::vector<double>> numeric;
  std::vector<std::vector<std::int32_t>> codes;
  std::vector<double> y;
  std::string response;
  data::Transform response_transform = data::Transform::none;

  std::size_t rows() const { return y.size(); }
};

// Response must be complete; predictors may have missing cells.
TreeData make_tree_data(const data::DataTable& table, std::string_view response,
                        std::span<const std::string> predictors);

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  std::vector<std::int32_t> left_levels;
  std::vector<std::int32_t> right_levels;
  // Direction for missing values and for levels not seen at this node: the
  // child that received more non-missing training rows.
  bool missing_left = true;
};

struct TreeNode {
  std::optional<Split> split;
  double prediction = 0.0;
  std::size_t n = 0;
  double sse = 0.0;
  // SSE(node) - SSE(left) - SSE(right), in squared response units.
  double improvement = 0.0;
  // Training rows missing the split variable, routed to the majority child.
  std::size_t n_missing = 0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::size_t depth = 0;

  bool is_leaf() const { return !split.has_value(); }
};

// Nodes are stored in preorder; children always follow their parent.
struct RegressionTree {
  std::vector<Feature> features;
  std::vector<TreeNode> nodes;
  std::string response;
  data::Transform response_transform = data::Transform::none;
  GrowthControls controls;

  const TreeNode& root() const { return nodes.front(); }
  double root_sse() const { return nodes.front().sse; }
  std::size_t n_train() const { return nodes.front().n; }
  std::size_t leaves() const;
  std::size_t splits() const { return leaves() - 1; }
  // Sum of leaf SSE.
  double sse() const;
};

// Options used by ensemble growth; the defaults give plain CART.
struct GrowOptions {
  // Candidate variables sampled per split; 0 means all.
  std::size_t mtry = 0;
  Engine* engine = nullptr;
  // Overrides controls.cp_min when set (ensembles grow with 0).
  std::optional<double> cp_min;
};

// Rows: the training row indices into `data` (duplicates allowed).
RegressionTree grow_rows(const TreeData& data, std::span<const std::size_t> rows,
                         const GrowthControls& controls, const GrowOptions& options = {});

RegressionTree grow(const data::DataTable& table, std::string_view response,
                    std::span<const std::string> predictors, const GrowthControls& controls);

// Leaf reached by row `row` of `data`; missing values follow majority routing.
std::size_t leaf_for_row(const RegressionTree& tree, const TreeData& data, std::size_t row);

struct Prediction {
  double value = 0.0;
  // exp(value) for a natural_log response, otherwise value itself.
  double valuation = 0.0;
  std::size_t leaf = 0;
  bool routed_missing = false;
  bool unseen_level = false;
  std::vector<std::string> flags;
};

Prediction predict_tree(const RegressionTree& tree, const data::Record& record);

// Complexity at which each internal node is snipped by weakest-link pruning,
// scaled by the root SSE; leaves hold +inf.
std::vector<double> node_complexity(const RegressionTree& tree);

// Subtree keeping only splits whose complexity exceeds cp.
RegressionTree prune(const RegressionTree& tree, double cp);

struct CpRow {
  double cp = 0.0;
  std::size_t nsplit = 0;
  double rel_error = 1.0;
  double xerror = 0.0;
  double xstd = 0.0;
};

struct CpTable {
  std::vector<CpRow> rows;
  std::size_t n_obs = 0;
  std::size_t end_nodes = 1;
  bool cross_validated = false;
};

// Pruning sequence only; xerror and xstd are left at zero.
CpTable pruning_table(const RegressionTree& tree);

struct CvPoint {
  double xerror = 0.0;
  double xstd = 0.0;
};

// K-fold estimate at each cp value: folds from a seeded shuffle, each fold
// tree pruned at the geometric mean of consecutive cp values (row 0 uses the
// root). Errors are scaled by the full-data root SSE.
std::vector<CvPoint> cross_validate(const TreeData& data, const GrowthControls& controls,
                                    std::span<const double> cp_values, std::size_t threads = 1);
std::vector<CvPoint> cross_validate(const data::DataTable& table, std::string_view response,
                                    std::span<const std::string> predictors,
                                    const GrowthControls& controls, std::size_t threads = 1);

// Pruning sequence of `tree` with cross-validated columns from `table`.
CpTable cp_table(const RegressionTree& tree, const data::DataTable& table,
                 const GrowthControls& controls, std::size_t threads = 1);

struct Importance {
  std::string variable;
  long score = 0;
};

// Split improvements summed per variable, normalized to 100, rounded, sorted
// descending (ties by name). Empty for a root-only tree.
std::vector<Importance> variable_importance(const RegressionTree& tree);

inline constexpr int kTreeSchemaVersion = 1;

nlohmann::json tree_to_json(const RegressionTree& tree);
RegressionTree tree_from_json(const nlohmann::json& doc);
nlohmann::json cp_table_to_json(const CpTable& table);
nlohmann::json importance_to_json(std::span<const Importance> importance);

}  // namespace valtree::cart
