#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "valtree/cart.hpp"
#include "valtree/dataset.hpp"
#include "valtree/linmod.hpp"

namespace valtree::scorecard {

enum class Block { non_financial, financial, deal_characteristics };

std::string_view to_string(Block block);
Block parse_block(std::string_view text);

// Predictor -> block, in the order the predictors enter the design.
using BlockAssignment = std::vector<std::pair<std::string, Block>>;

struct BlockTerm {
  std::string term;
  double coefficient = 0.0;
};

struct BlockScorecard {
  std::string response;
  data::Transform response_transform = data::Transform::none;
  double intercept = 0.0;
  std::vector<BlockTerm> non_financial;
  std::vector<BlockTerm> financial;
  std::vector<BlockTerm> deal_characteristics;
  linmod::LinearFit fit;
  // Column layout of the fit (terms and sources only, no data).
  linmod::Design design;
  // Block of each design column; the intercept's entry is unused.
  std::vector<Block> column_blocks;

  const std::vector<BlockTerm>& terms(Block block) const;
};

struct BlockScore {
  double intercept = 0.0;
  double non_financial = 0.0;
  double financial = 0.0;
  double deal_characteristics = 0.0;
  double total = 0.0;
};

// One joint OLS over every assigned predictor; numeric predictors enter as
// is, categoricals as indicators. Rows incomplete on any used variable are
// dropped first.
BlockScorecard fit_block_scorecard(const data::DataTable& table, std::string_view response,
                                   const BlockAssignment& assignment);

BlockScore score(const BlockScorecard& card, const data::Record& record);

// Stage-2 card fitted on the stage-1 residuals, in the stage-1 response space.
BlockScorecard fit_meta_stage2(const data::DataTable& table, std::string_view response,
                               const BlockScorecard& stage1, const BlockAssignment& assignment);

struct MetaEstimate {
  double stage1 = 0.0;
  double stage2 = 0.0;
  // stage1 + stage2 in the shared response space.
  double value = 0.0;
  // exp(value) for a log response, value otherwise.
  double valuation = 0.0;
};

// Two-stage additive composition: startup-value score plus deal-value
// adjustment, in the (shared) response space.
MetaEstimate compose_meta(const BlockScorecard& startup, const BlockScorecard& deal,
                          const data::Record& record);

// One path condition, merged over every split on the same variable.
// Numeric: lower < x <= upper. Categorical: level in `levels`, or not a
// training level at all when `other_levels`. Missing values satisfy the
// condition when `missing` is set.
struct Condition {
  std::size_t feature = 0;
  std::string variable;
  bool categorical = false;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  std::vector<std::int32_t> levels;
  bool other_levels = false;
  bool missing = false;
};

struct Segment {
  std::vector<Condition> conditions;
  std::string rule;
  double prediction = 0.0;
  double valuation_eur = 0.0;
  std::size_t n = 0;
  double share = 0.0;
  std::size_t leaf = 0;
};

struct SegmentScorecard {
  std::string response;
  data::Transform response_transform = data::Transform::none;
  std::vector<cart::Feature> features;
  std::vector<Segment> segments;
};

SegmentScorecard tree_to_scorecard(const cart::RegressionTree& tree, data::Transform response_transform);

std::string render_condition(const Condition& c, std::span<const cart::Feature> features);
// Segment whose rule the record satisfies; segments partition the space.
std::size_t match_segment(const SegmentScorecard& card, const data::Record& record);
double score_segments(const SegmentScorecard& card, const data::Record& record);

nlohmann::json block_scorecard_to_json(const BlockScorecard& card);
nlohmann::json segment_scorecard_to_json(const SegmentScorecard& card);

}  // namespace valtree::scorecard
