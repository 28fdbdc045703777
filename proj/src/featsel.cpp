#include "twoheads/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "twoheads/error.hpp"

namespace twoheads {

double anova_f(std::span<const std::vector<double>> groups) {
  const std::size_t g = groups.size();
  if (g < 2) throw ArgumentError("anova_f: need at least 2 groups");
  std::size_t total = 0;
  for (const auto& grp : groups) {
    if (grp.empty()) throw ArgumentError("anova_f: empty group");
    total += grp.size();
  }
  if (total <= g) throw ArgumentError("anova_f: need more observations than groups");

  // A group of identical values has that value as its exact mean and zero
  // spread; summing and dividing could otherwise leave rounding residue.
  std::vector<double> mean(g);
  double ss_within = 0.0;
  double grand = 0.0;
  for (std::size_t j = 0; j < g; ++j) {
    const auto& grp = groups[j];
    const bool constant = std::all_of(grp.begin(), grp.end(), [&](double v) { return v == grp[0]; });
    double sum = 0.0;
    for (double v : grp) sum += v;
    grand += sum;
    if (constant) {
      mean[j] = grp[0];
      continue;
    }
    mean[j] = sum / static_cast<double>(grp.size());
    for (double v : grp) ss_within += (v - mean[j]) * (v - mean[j]);
  }
  grand /= static_cast<double>(total);

  bool all_equal_means = true;
  for (std::size_t j = 1; j < g; ++j) all_equal_means &= mean[j] == mean[0];
  double ss_between = 0.0;
  if (!all_equal_means)
    for (std::size_t j = 0; j < g; ++j)
      ss_between += static_cast<double>(groups[j].size()) * (mean[j] - grand) * (mean[j] - grand);

  if (ss_within == 0.0) return ss_between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  const double ms_between = ss_between / static_cast<double>(g - 1);
  const double ms_within = ss_within / static_cast<double>(total - g);
  return ms_between / ms_within;
}

std::vector<std::size_t> rank_features(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

SelectorModel fit_selector(const Matrix& X, std::span<const int> y, std::size_t k) {
  if (X.rows() != y.size()) throw ArgumentError("fit_selector: row count does not match label count");
  if (k == 0) throw ArgumentError("fit_selector: k must be >= 1");
  std::size_t n1 = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw ArgumentError("fit_selector: labels must be 0/1");
    n1 += static_cast<std::size_t>(v);
  }
  if (n1 == 0 || n1 == y.size()) throw StratificationError("fit_selector: only one label present");

  SelectorModel model;
  model.fitted_on = X.rows();
  model.scores.resize(X.cols());
  std::vector<std::vector<double>> groups(2);
  for (std::size_t f = 0; f < X.cols(); ++f) {
    groups[0].clear();
    groups[1].clear();
    for (std::size_t r = 0; r < X.rows(); ++r) groups[y[r]].push_back(X(r, f));
    model.scores[f] = anova_f(groups);
  }
  model.k = k;
  if (k > X.cols()) {
    model.k = X.cols();
    model.warning = "k=" + std::to_string(k) + " exceeds " + std::to_string(X.cols()) +
                    " features; clamped";
  }
  const auto order = rank_features(model.scores);
  model.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(model.k));
  std::sort(model.selected.begin(), model.selected.end());
  return model;
}

Matrix transform(const Matrix& X, const SelectorModel& model) {
  if (X.cols() != model.scores.size())
    throw ArgumentError("transform: matrix has " + std::to_string(X.cols()) + " columns, selector expects " +
                        std::to_string(model.scores.size()));
  return X.select_cols(model.selected);
}

namespace {

nlohmann::json score_json(double s) {
  if (std::isinf(s)) return "inf";
  return s;
}

}  // namespace

std::string to_json(const SelectorModel& model) {
  nlohmann::json j;
  j["scores"] = nlohmann::json::array();
  for (double s : model.scores) j["scores"].push_back(score_json(s));
  j["k"] = model.k;
  j["selected"] = model.selected;
  j["fitted_on"] = model.fitted_on;
  j["warning"] = model.warning ? nlohmann::json(*model.warning) : nlohmann::json(nullptr);
  return j.dump();
}

SelectorModel selector_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  SelectorModel m;
  for (const auto& s : j.at("scores"))
    m.scores.push_back(s.is_string() ? std::numeric_limits<double>::infinity() : s.get<double>());
  m.k = j.at("k").get<std::size_t>();
  m.selected = j.at("selected").get<std::vector<std::size_t>>();
  m.fitted_on = j.at("fitted_on").get<std::size_t>();
  if (!j.at("warning").is_null()) m.warning = j.at("warning").get<std::string>();
  return m;
}

}  // namespace twoheads
