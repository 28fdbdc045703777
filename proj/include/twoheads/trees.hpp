#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "twoheads/matrix.hpp"
#include "twoheads/rng.hpp"

namespace twoheads {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf output

  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;
  std::size_t depth() const;
  std::size_t n_leaves() const;

  bool operator==(const Tree&) const = default;
};

// Weighted Gini split score for one side: (w0^2 + w1^2) / w. Summed over
// both children, larger is purer.
inline double gini_score(double weight, double weight_pos) {
  const double w0 = weight - weight_pos;
  return (w0 * w0 + weight_pos * weight_pos) / weight;
}

// 1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - (G_L+G_R)^2/(H_L+H_R+l)]
double second_order_gain(double g_left, double h_left, double g_right, double h_right, double lambda);

// Threshold between two distinct sorted values that keeps `lo` on the left
// and `hi` on the right.
inline double split_point(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

// Per-node CART classifier with Gini impurity, used by the random forest.
// `weights` are per-row multiplicities (bootstrap counts); rows with zero
// weight are ignored. Each split considers `features_per_split` features
// drawn without replacement from `rng` (all of them, in order, when equal to
// the column count). Leaves hold the weighted-majority label, ties to 0.
struct CartOptions {
  std::optional<std::size_t> max_depth;
  std::size_t features_per_split = 0;
};

Tree grow_cart(const Matrix& X, std::span<const int> y, std::span<const double> weights,
               const CartOptions& options, Rng& rng);

// Each column's row order, ascending by value then row index. Computed once
// per boosting fit and shared across rounds.
class PresortedColumns {
 public:
  explicit PresortedColumns(const Matrix& X);
  std::span<const std::uint32_t> order(std::size_t feature) const {
    return std::span<const std::uint32_t>(order_).subspan(feature * rows_, rows_);
  }

 private:
  std::size_t rows_ = 0;
  std::vector<std::uint32_t> order_;
};

enum class SplitCriterion {
  gini,          // target = label in {0,1}; leaves hold the majority label
  variance,      // split on (sum t)^2 / count; leaf = sum t / sum h
  second_order,  // split on (sum t)^2 / (sum h + lambda); leaf = sum t / (sum h + lambda)
};

struct LevelwiseOptions {
  SplitCriterion criterion = SplitCriterion::variance;
  std::optional<std::size_t> max_depth;
  double reg_lambda = 0.0;
  double min_split_gain = 0.0;
};

// Exact greedy grower that expands a whole level per pass over the
// presorted columns. For boosting, `target` is the negative gradient and
// `hessian` the second derivative of the loss; gini ignores `hessian`.
Tree grow_levelwise(const Matrix& X, const PresortedColumns& sorted, std::span<const double> target,
                    std::span<const double> hessian, const LevelwiseOptions& options);

}  // namespace twoheads
