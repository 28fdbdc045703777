#include "twoheads/trees.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "twoheads/error.hpp"

namespace twoheads {

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0)
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold
                                     ? nodes[i].left
                                     : nodes[i].right);
  return nodes[i].value;
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes[i].feature >= 0) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t Tree::n_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

double second_order_gain(double g_left, double h_left, double g_right, double h_right, double lambda) {
  const double g = g_left + g_right;
  const double h = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                g * g / (h + lambda));
}

// ---------------------------------------------------------------------------
// Per-node CART

Tree grow_cart(const Matrix& X, std::span<const int> y, std::span<const double> weights,
               const CartOptions& options, Rng& rng) {
  const std::size_t d = X.cols();
  if (X.rows() != y.size() || y.size() != weights.size())
    throw ArgumentError("grow_cart: X, y and weights disagree in length");
  const std::size_t m_try = options.features_per_split == 0 ? d : std::min(options.features_per_split, d);

  struct Pending {
    std::size_t node;
    std::size_t depth;
    std::vector<std::uint32_t> rows;
  };

  Tree tree;
  tree.nodes.emplace_back();
  std::vector<Pending> stack;
  {
    std::vector<std::uint32_t> root;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (weights[i] > 0.0) root.push_back(static_cast<std::uint32_t>(i));
    stack.push_back({0, 0, std::move(root)});
  }

  std::vector<std::size_t> features(d);
  std::iota(features.begin(), features.end(), std::size_t{0});
  std::vector<std::size_t> candidates;
  std::vector<std::pair<double, std::uint32_t>> column;

  while (!stack.empty()) {
    Pending cur = std::move(stack.back());
    stack.pop_back();

    double w = 0.0, w_pos = 0.0;
    for (auto i : cur.rows) {
      w += weights[i];
      w_pos += weights[i] * y[i];
    }
    TreeNode& leaf = tree.nodes[cur.node];
    leaf.value = 2.0 * w_pos > w ? 1.0 : 0.0;

    const bool pure = w_pos == 0.0 || w_pos == w;
    const bool depth_ok = !options.max_depth || cur.depth < *options.max_depth;
    if (pure || !depth_ok || cur.rows.size() < 2) continue;

    if (m_try == d) {
      candidates = features;
    } else {
      for (std::size_t j = 0; j < m_try; ++j) {
        const auto pick = j + static_cast<std::size_t>(rng.below(d - j));
        std::swap(features[j], features[pick]);
      }
      candidates.assign(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(m_try));
      std::sort(candidates.begin(), candidates.end());
    }

    double best_score = -std::numeric_limits<double>::infinity();
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    for (std::size_t f : candidates) {
      column.clear();
      for (auto i : cur.rows) column.emplace_back(X(i, f), i);
      std::sort(column.begin(), column.end());
      double wl = 0.0, wl_pos = 0.0;
      for (std::size_t j = 0; j < column.size(); ++j) {
        if (j > 0 && column[j].first > column[j - 1].first) {
          const double score = gini_score(wl, wl_pos) + gini_score(w - wl, w_pos - wl_pos);
          if (score > best_score) {
            best_score = score;
            best_feature = static_cast<std::int32_t>(f);
            best_threshold = split_point(column[j - 1].first, column[j].first);
          }
        }
        const auto i = column[j].second;
        wl += weights[i];
        wl_pos += weights[i] * y[i];
      }
    }
    if (best_feature < 0) continue;

    std::vector<std::uint32_t> left, right;
    for (auto i : cur.rows)
      (X(i, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right).push_back(i);

    const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& split = tree.nodes[cur.node];
    split.feature = best_feature;
    split.threshold = best_threshold;
    split.left = left_id;
    split.right = left_id + 1;
    // Right is pushed first so the left subtree is expanded first.
    stack.push_back({static_cast<std::size_t>(left_id + 1), cur.depth + 1, std::move(right)});
    stack.push_back({static_cast<std::size_t>(left_id), cur.depth + 1, std::move(left)});
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Level-wise grower

PresortedColumns::PresortedColumns(const Matrix& X) : rows_(X.rows()), order_(X.rows() * X.cols()) {
  std::vector<std::uint32_t> idx(rows_);
  for (std::size_t f = 0; f < X.cols(); ++f) {
    std::iota(idx.begin(), idx.end(), std::uint32_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) { return X(a, f) < X(b, f); });
    std::copy(idx.begin(), idx.end(), order_.begin() + static_cast<std::ptrdiff_t>(f * rows_));
  }
}

namespace {

struct Stats {
  double t = 0.0;  // sum of targets
  double h = 0.0;  // sum of hessians
  double w = 0.0;  // row count
};

double side_score(const Stats& s, const LevelwiseOptions& opt) {
  switch (opt.criterion) {
    case SplitCriterion::gini:
      return gini_score(s.w, s.t);
    case SplitCriterion::variance:
      return s.t * s.t / s.w;
    case SplitCriterion::second_order:
      return s.t * s.t / (s.h + opt.reg_lambda);
  }
  return 0.0;
}

double leaf_value(const Stats& s, const LevelwiseOptions& opt) {
  switch (opt.criterion) {
    case SplitCriterion::gini:
      return 2.0 * s.t > s.w ? 1.0 : 0.0;
    case SplitCriterion::variance:
      return s.h > 1e-150 ? s.t / s.h : 0.0;
    case SplitCriterion::second_order:
      return s.h + opt.reg_lambda > 0.0 ? s.t / (s.h + opt.reg_lambda) : 0.0;
  }
  return 0.0;
}

}  // namespace

Tree grow_levelwise(const Matrix& X, const PresortedColumns& sorted, std::span<const double> target,
                    std::span<const double> hessian, const LevelwiseOptions& opt) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  if (target.size() != n || (opt.criterion != SplitCriterion::gini && hessian.size() != n))
    throw ArgumentError("grow_levelwise: target/hessian length mismatch");

  Tree tree;
  tree.nodes.emplace_back();
  std::vector<std::int32_t> node_of(n, 0);
  std::vector<std::size_t> open{0};
  std::size_t depth = 0;

  struct Scan {
    Stats acc;
    double last = 0.0;
    double best_score = -std::numeric_limits<double>::infinity();
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
  };

  while (!open.empty()) {
    // Node totals, summed in row order.
    std::vector<std::int32_t> slot_of(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < open.size(); ++s) slot_of[open[s]] = static_cast<std::int32_t>(s);
    std::vector<Stats> total(open.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (node_of[i] < 0) continue;
      Stats& s = total[static_cast<std::size_t>(slot_of[static_cast<std::size_t>(node_of[i])])];
      s.t += target[i];
      if (opt.criterion != SplitCriterion::gini) s.h += hessian[i];
      s.w += 1.0;
    }

    std::vector<bool> eligible(open.size());
    bool any = false;
    const bool depth_ok = !opt.max_depth || depth < *opt.max_depth;
    for (std::size_t s = 0; s < open.size(); ++s) {
      bool ok = depth_ok && total[s].w >= 2.0;
      if (opt.criterion == SplitCriterion::gini) ok = ok && total[s].t > 0.0 && total[s].t < total[s].w;
      eligible[s] = ok;
      any |= ok;
    }

    std::vector<Scan> scan(open.size());
    if (any) {
      for (std::size_t f = 0; f < d; ++f) {
        for (auto& sc : scan) sc.acc = Stats{};
        for (std::uint32_t i : sorted.order(f)) {
          const std::int32_t node = node_of[i];
          if (node < 0) continue;
          const auto s = static_cast<std::size_t>(slot_of[static_cast<std::size_t>(node)]);
          if (!eligible[s]) continue;
          Scan& sc = scan[s];
          const double v = X(i, f);
          if (sc.acc.w > 0.0 && v > sc.last) {
            const Stats& tot = total[s];
            const Stats right{tot.t - sc.acc.t, tot.h - sc.acc.h, tot.w - sc.acc.w};
            const double score = side_score(sc.acc, opt) + side_score(right, opt);
            if (score > sc.best_score) {
              sc.best_score = score;
              sc.best_feature = static_cast<std::int32_t>(f);
              sc.best_threshold = split_point(sc.last, v);
            }
          }
          sc.acc.t += target[i];
          if (opt.criterion != SplitCriterion::gini) sc.acc.h += hessian[i];
          sc.acc.w += 1.0;
          sc.last = v;
        }
      }
    }

    std::vector<std::size_t> next;
    std::vector<std::int32_t> left_child(open.size(), -1);
    for (std::size_t s = 0; s < open.size(); ++s) {
      const std::size_t id = open[s];
      tree.nodes[id].value = leaf_value(total[s], opt);
      if (!eligible[s] || scan[s].best_feature < 0) continue;
      bool split = true;
      const double parent = side_score(total[s], opt);
      if (opt.criterion == SplitCriterion::variance) split = scan[s].best_score - parent > 0.0;
      if (opt.criterion == SplitCriterion::second_order)
        split = 0.5 * (scan[s].best_score - parent) > opt.min_split_gain;
      if (!split) continue;

      const auto l = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[id];
      node.feature = scan[s].best_feature;
      node.threshold = scan[s].best_threshold;
      node.left = l;
      node.right = l + 1;
      left_child[s] = l;
      next.push_back(static_cast<std::size_t>(l));
      next.push_back(static_cast<std::size_t>(l + 1));
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (node_of[i] < 0) continue;
      const auto s = static_cast<std::size_t>(slot_of[static_cast<std::size_t>(node_of[i])]);
      if (left_child[s] < 0) {
        node_of[i] = -1;
        continue;
      }
      const TreeNode& node = tree.nodes[open[s]];
      node_of[i] = X(i, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
    }
    open = std::move(next);
    ++depth;
  }
  return tree;
}

}  // namespace twoheads
