#include <algorithm>
#include <cmath>
#include <numeric>

#include "valtree/cart.hpp"

namespace valtree::cart {
namespace {

// Cuts whose gain is below this fraction of the node SSE are rounding noise.
constexpr double kNoiseFraction = 1e-12;

double centered_sse(std::span<const double> y, double mean) {
  double s = 0.0;
  for (double v : y) s += (v - mean) * (v - mean);
  return s;
}

double gain(double sum_left, double n_left, double sum_right, double n_right, double sum, double n) {
  return sum_left * sum_left / n_left + sum_right * sum_right / n_right - sum * sum / n;
}

}  // namespace

std::optional<NumericSplit> best_split_numeric(std::span<const double> x, std::span<const double> y,
                                               std::size_t minbucket) {
  const std::size_t n = x.size();
  minbucket = std::max<std::size_t>(minbucket, 1);
  if (n != y.size() || n < 2 * minbucket) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  if (!(x[order.front()] < x[order.back()])) return std::nullopt;

  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  const double total_sse = centered_sse(y, mean);
  if (total_sse <= 0.0) return std::nullopt;

  double sum = 0.0;
  for (double v : y) sum += v - mean;
  const double dn = static_cast<double>(n);

  double best = 0.0;
  std::size_t best_k = 0;
  double left = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    left += y[order[k - 1]] - mean;
    if (k < minbucket || n - k < minbucket) continue;
    if (!(x[order[k - 1]] < x[order[k]])) continue;
    const double dk = static_cast<double>(k);
    const double g = gain(left, dk, sum - left, dn - dk, sum, dn);
    if (g > best) {
      best = g;
      best_k = k;
    }
  }
  if (best_k == 0 || best <= kNoiseFraction * total_sse) return std::nullopt;

  const double lo = x[order[best_k - 1]];
  const double hi = x[order[best_k]];
  double threshold = lo + (hi - lo) / 2.0;
  if (!(threshold < hi)) threshold = lo;
  return NumericSplit{threshold, best, best_k, n - best_k};
}

std::optional<CategoricalSplit> best_split_categorical(std::span<const std::int32_t> levels,
                                                       std::span<const double> y,
                                                       std::size_t minbucket) {
  const std::size_t n = levels.size();
  minbucket = std::max<std::size_t>(minbucket, 1);
  if (n != y.size() || n < 2 * minbucket) return std::nullopt;

  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  const double total_sse = centered_sse(y, mean);
  if (total_sse <= 0.0) return std::nullopt;

  std::int32_t max_code = 0;
  for (auto c : levels) max_code = std::max(max_code, c);
  const auto width = static_cast<std::size_t>(max_code) + 1;
  std::vector<double> sums(width, 0.0);
  std::vector<std::size_t> counts(width, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(levels[i]);
    sums[c] += y[i] - mean;
    ++counts[c];
  }
  std::vector<std::int32_t> observed;
  for (std::size_t c = 0; c < width; ++c)
    if (counts[c] > 0) observed.push_back(static_cast<std::int32_t>(c));
  if (observed.size() < 2) return std::nullopt;

  auto level_mean = [&](std::int32_t c) {
    return sums[static_cast<std::size_t>(c)] / static_cast<double>(counts[static_cast<std::size_t>(c)]);
  };
  std::stable_sort(observed.begin(), observed.end(),
                   [&](std::int32_t a, std::int32_t b) { return level_mean(a) < level_mean(b); });

  double sum = 0.0;
  for (auto c : observed) sum += sums[static_cast<std::size_t>(c)];
  const double dn = static_cast<double>(n);

  double best = 0.0;
  std::size_t best_k = 0;
  std::size_t best_n_left = 0;
  double left = 0.0;
  std::size_t n_left = 0;
  for (std::size_t k = 1; k < observed.size(); ++k) {
    const auto c = static_cast<std::size_t>(observed[k - 1]);
    left += sums[c];
    n_left += counts[c];
    if (n_left < minbucket || n - n_left < minbucket) continue;
    const double g = gain(left, static_cast<double>(n_left), sum - left, dn - static_cast<double>(n_left), sum, dn);
    if (g > best) {
      best = g;
      best_k = k;
      best_n_left = n_left;
    }
  }
  if (best_k == 0 || best <= kNoiseFraction * total_sse) return std::nullopt;

  CategoricalSplit split;
  split.left_levels.assign(observed.begin(), observed.begin() + static_cast<std::ptrdiff_t>(best_k));
  split.right_levels.assign(observed.begin() + static_cast<std::ptrdiff_t>(best_k), observed.end());
  std::sort(split.left_levels.begin(), split.left_levels.end());
  std::sort(split.right_levels.begin(), split.right_levels.end());
  split.improvement = best;
  split.n_left = best_n_left;
  split.n_right = n - best_n_left;
  return split;
}

}  // namespace valtree::cart
