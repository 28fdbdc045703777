#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twoheads/matrix.hpp"

namespace twoheads {

// One-way ANOVA F statistic. Returns +infinity when the within-group sum of
// squares is zero but the between-group sum is not, and 0 when both are.
// Throws ArgumentError unless there are >= 2 non-empty groups and more
// observations than groups.
double anova_f(std::span<const std::vector<double>> groups);

struct SelectorModel {
  std::vector<double> scores;         // one F value per feature, may be +inf
  std::size_t k = 0;                  // effective (clamped) count
  std::vector<std::size_t> selected;  // ascending
  std::size_t fitted_on = 0;          // training rows seen
  std::optional<std::string> warning;

  bool operator==(const SelectorModel&) const = default;
};

// Feature indices ordered by descending score; +inf first, ties to the
// lower index.
std::vector<std::size_t> rank_features(std::span<const double> scores);

// Scores every column of X against binary labels and keeps the top k.
// Throws StratificationError if y lacks a label, ArgumentError for k == 0 or
// a size mismatch. k > n_features is clamped and noted in `warning`.
SelectorModel fit_selector(const Matrix& X, std::span<const int> y, std::size_t k);

// X restricted to model.selected, ascending column order.
Matrix transform(const Matrix& X, const SelectorModel& model);

std::string to_json(const SelectorModel& model);
SelectorModel selector_from_json(const std::string& text);

}  // namespace twoheads
