#include "twoheads/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "twoheads/error.hpp"
#include "twoheads/rng.hpp"

namespace twoheads {

namespace {

struct KindName {
  ClassifierKind kind;
  std::string_view name;
  std::string_view alias;
};

constexpr std::array<KindName, 8> kNames = {{
    {ClassifierKind::gaussian_nb, "gaussian_nb", "gnb"},
    {ClassifierKind::knn, "knn", "knn"},
    {ClassifierKind::linear_svm, "linear_svm", "svm"},
    {ClassifierKind::rbf_svm, "rbf_svm", "rbf"},
    {ClassifierKind::adaboost, "adaboost", "ada"},
    {ClassifierKind::random_forest, "random_forest", "rf"},
    {ClassifierKind::gradient_boost, "gradient_boost", "gb"},
    {ClassifierKind::second_order_boost, "second_order_boost", "xgb"},
}};

void check_training_data(const Matrix& X, std::span<const int> y, const char* who) {
  if (X.rows() != y.size())
    throw ArgumentError(std::string(who) + ": " + std::to_string(X.rows()) + " rows but " +
                        std::to_string(y.size()) + " labels");
  if (X.rows() == 0 || X.cols() == 0) throw ArgumentError(std::string(who) + ": empty training matrix");
  bool seen[2] = {false, false};
  for (int v : y) {
    if (v != 0 && v != 1) throw ArgumentError(std::string(who) + ": labels must be 0/1");
    seen[v] = true;
  }
  if (!seen[0] || !seen[1]) throw ArgumentError(std::string(who) + ": training labels contain a single class");
  for (double v : X.data())
    if (!std::isfinite(v)) throw ArgumentError(std::string(who) + ": non-finite feature value");
}

void check_query(const TrainedModel& model, const Matrix& X) {
  if (X.cols() != model.n_features)
    throw ArgumentError("predict: query has " + std::to_string(X.cols()) + " columns, model expects " +
                        std::to_string(model.n_features));
}

TrainedModel make_model(ClassifierKind kind, const Hyperparams& hp, std::size_t d) {
  hp.validate();
  TrainedModel m;
  m.kind = kind;
  m.hp = hp;
  m.n_features = d;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double sigmoid(double f) { return 1.0 / (1.0 + std::exp(-f)); }

double rbf(double gamma, std::span<const double> a, std::span<const double> b) {
  return std::exp(-gamma * squared_distance(a, b)) + 1.0;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  for (const auto& n : kNames)
    if (n.kind == kind) return n.name;
  return "unknown";
}

std::optional<ClassifierKind> parse_classifier(std::string_view name) {
  for (const auto& n : kNames)
    if (n.name == name || n.alias == name) return n.kind;
  return std::nullopt;
}

void Hyperparams::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  auto rate = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!(gaussian_nb.var_smoothing >= 0.0)) throw ConfigError("gaussian_nb.var_smoothing must be >= 0");
  if (knn.k < 1) throw ConfigError("knn.k must be >= 1");
  if (!positive(linear_svm.lambda) || linear_svm.epochs < 1)
    throw ConfigError("linear_svm: lambda must be > 0 and epochs >= 1");
  if (!positive(rbf_svm.lambda) || rbf_svm.epochs < 1 || (rbf_svm.gamma && !positive(*rbf_svm.gamma)))
    throw ConfigError("rbf_svm: lambda, gamma must be > 0 and epochs >= 1");
  if (adaboost.rounds < 1) throw ConfigError("adaboost.rounds must be >= 1");
  if (random_forest.trees < 1 || (random_forest.max_depth && *random_forest.max_depth < 1) ||
      (random_forest.features_per_split && *random_forest.features_per_split < 1))
    throw ConfigError("random_forest: counts must be >= 1");
  if (gradient_boost.trees < 1 || gradient_boost.depth < 1 || !rate(gradient_boost.learning_rate))
    throw ConfigError("gradient_boost: counts must be >= 1 and learning_rate in (0, 1]");
  if (second_order_boost.trees < 1 || second_order_boost.depth < 1 ||
      !rate(second_order_boost.learning_rate) || !(second_order_boost.reg_lambda >= 0.0) ||
      !(second_order_boost.min_split_gain >= 0.0))
    throw ConfigError("second_order_boost: invalid hyperparameters");
}

// ---------------------------------------------------------------------------

Standardizer Standardizer::fit(const Matrix& X) {
  Standardizer s;
  const std::size_t n = X.rows(), d = X.cols();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += X(r, c);
  for (double& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = X(r, c) - s.mean[c];
      var[c] += dv * dv;
    }
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(var[c] / static_cast<double>(n));
    s.scale[c] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& X) const {
  Matrix out(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t c = 0; c < X.cols(); ++c) out(r, c) = (X(r, c) - mean[c]) / scale[c];
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

TrainedModel fit_gaussian_nb(const Matrix& X, std::span<const int> y, const Hyperparams& hp) {
  check_training_data(X, y, "fit_gaussian_nb");
  const std::size_t n = X.rows(), d = X.cols();
  TrainedModel model = make_model(ClassifierKind::gaussian_nb, hp, d);

  GaussianNbParams p;
  p.mean = Matrix(2, d);
  p.variance = Matrix(2, d);
  std::array<double, 2> count{};
  for (std::size_t r = 0; r < n; ++r) {
    count[y[r]] += 1.0;
    for (std::size_t c = 0; c < d; ++c) p.mean(y[r], c) += X(r, c);
  }
  for (int k = 0; k < 2; ++k)
    for (std::size_t c = 0; c < d; ++c) p.mean(k, c) /= count[k];
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = X(r, c) - p.mean(y[r], c);
      p.variance(y[r], c) += dv * dv;
    }

  // Smoothing scales with the largest overall column variance.
  double max_var = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double m = 0.0, v = 0.0;
    for (std::size_t r = 0; r < n; ++r) m += X(r, c);
    m /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) v += (X(r, c) - m) * (X(r, c) - m);
    max_var = std::max(max_var, v / static_cast<double>(n));
  }
  double epsilon = hp.gaussian_nb.var_smoothing * max_var;
  if (epsilon <= 0.0) epsilon = std::max(hp.gaussian_nb.var_smoothing, 1e-12);

  for (int k = 0; k < 2; ++k) {
    p.log_prior[k] = std::log(count[k] / static_cast<double>(n));
    for (std::size_t c = 0; c < d; ++c) p.variance(k, c) = p.variance(k, c) / count[k] + epsilon;
  }
  model.params = std::move(p);
  return model;
}

// ---------------------------------------------------------------------------
// k nearest neighbours

TrainedModel fit_knn(const Matrix& X, std::span<const int> y, const Hyperparams& hp) {
  check_training_data(X, y, "fit_knn");
  TrainedModel model = make_model(ClassifierKind::knn, hp, X.cols());
  model.scaler = Standardizer::fit(X);
  KnnParams p;
  p.k = hp.knn.k;
  p.train = model.scaler->apply(X);
  p.labels.assign(y.begin(), y.end());
  model.params = std::move(p);
  return model;
}

// ---------------------------------------------------------------------------
// Linear SVM, Pegasos stochastic subgradient on the hinge loss.

TrainedModel fit_linear_svm(const Matrix& X, std::span<const int> y, const Hyperparams& hp,
                            std::uint64_t seed) {
  check_training_data(X, y, "fit_linear_svm");
  const std::size_t n = X.rows(), d = X.cols();
  TrainedModel model = make_model(ClassifierKind::linear_svm, hp, d);
  model.scaler = Standardizer::fit(X);
  const Matrix Z = model.scaler->apply(X);

  const double lambda = hp.linear_svm.lambda;
  LinearParams p;
  p.weights.assign(d, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < hp.linear_svm.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double yi = y[i] == 1 ? 1.0 : -1.0;
      const auto x = Z.row(i);
      const double margin = yi * (dot(p.weights, x) + p.bias);
      const double shrink = 1.0 - eta * lambda;
      for (double& w : p.weights) w *= shrink;
      p.bias *= shrink;
      if (margin < 1.0) {
        for (std::size_t c = 0; c < d; ++c) p.weights[c] += eta * yi * x[c];
        p.bias += eta * yi;
      }
    }
  }
  model.params = std::move(p);
  return model;
}

// ---------------------------------------------------------------------------
// RBF SVM, kernelized Pegasos.

TrainedModel fit_rbf_svm(const Matrix& X, std::span<const int> y, const Hyperparams& hp, std::uint64_t seed) {
  check_training_data(X, y, "fit_rbf_svm");
  const std::size_t n = X.rows(), d = X.cols();
  TrainedModel model = make_model(ClassifierKind::rbf_svm, hp, d);
  model.scaler = Standardizer::fit(X);
  const Matrix Z = model.scaler->apply(X);

  double gamma;
  if (hp.rbf_svm.gamma) {
    gamma = *hp.rbf_svm.gamma;
  } else {
    double mean_var = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      double m = 0.0, v = 0.0;
      for (std::size_t r = 0; r < n; ++r) m += Z(r, c);
      m /= static_cast<double>(n);
      for (std::size_t r = 0; r < n; ++r) v += (Z(r, c) - m) * (Z(r, c) - m);
      mean_var += v / static_cast<double>(n);
    }
    mean_var /= static_cast<double>(d);
    gamma = 1.0 / (static_cast<double>(d) * (mean_var > 0.0 ? mean_var : 1.0));
  }

  Matrix K(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    K(i, i) = 2.0;
    for (std::size_t j = 0; j < i; ++j) K(i, j) = K(j, i) = rbf(gamma, Z.row(i), Z.row(j));
  }

  const double lambda = hp.rbf_svm.lambda;
  std::vector<double> sign(n);
  for (std::size_t i = 0; i < n; ++i) sign[i] = y[i] == 1 ? 1.0 : -1.0;
  // field[i] = sum_j alpha_j y_j K(i, j), kept current as alphas change.
  std::vector<double> field(n, 0.0);
  std::vector<std::uint64_t> alpha(n, 0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < hp.rbf_svm.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      ++t;
      const double f = field[i] / (lambda * static_cast<double>(t));
      if (sign[i] * f < 1.0) {
        ++alpha[i];
        const auto ki = K.row(i);
        for (std::size_t j = 0; j < n; ++j) field[j] += sign[i] * ki[j];
      }
    }
  }

  KernelParams p;
  p.gamma = gamma;
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < n; ++i)
    if (alpha[i] > 0) support.push_back(i);
  p.support = Z.select_rows(support);
  const double scale = 1.0 / (lambda * static_cast<double>(t));
  for (auto i : support) p.coef.push_back(static_cast<double>(alpha[i]) * sign[i] * scale);
  model.params = std::move(p);
  return model;
}

// ---------------------------------------------------------------------------
// AdaBoost over decision stumps.

namespace {

StumpFit fit_stump_presorted(const Matrix& X, const PresortedColumns& sorted, std::span<const int> y,
                             std::span<const double> w) {
  double total = 0.0, total_pos = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    total += w[i];
    if (y[i] == 1) total_pos += w[i];
  }
  // Fallback when no feature has two distinct values: a constant vote.
  StumpFit best;
  best.stump.feature = 0;
  best.stump.threshold = X(0, 0) - 1.0;
  for (std::size_t r = 1; r < X.rows(); ++r) best.stump.threshold = std::min(best.stump.threshold, X(r, 0) - 1.0);
  best.stump.polarity = total_pos >= total - total_pos ? 1 : -1;
  best.weighted_error = std::min(total_pos, total - total_pos);
  bool found = false;

  for (std::size_t f = 0; f < X.cols(); ++f) {
    const auto order = sorted.order(f);
    double left_pos = 0.0, left_neg = 0.0;
    for (std::size_t j = 0; j < order.size(); ++j) {
      const std::uint32_t i = order[j];
      if (j > 0) {
        const double prev = X(order[j - 1], f);
        const double cur = X(i, f);
        if (cur > prev) {
          // Polarity +1: right votes 1. Errors are left positives and right negatives.
          // Differences of running sums leave rounding residue; snap it to an exact zero.
          const double snap = 1e-12 * total;
          const double right_neg = (total - total_pos) - left_neg;
          double err_pos = left_pos + right_neg;
          double err_neg = total - err_pos;
          if (err_pos < snap) err_pos = 0.0;
          if (err_neg < snap) err_neg = 0.0;
          const double err = std::min(err_pos, err_neg);
          if (!found || err < best.weighted_error) {
            found = true;
            best.weighted_error = err;
            best.stump.feature = f;
            best.stump.threshold = split_point(prev, cur);
            best.stump.polarity = err_pos <= err_neg ? 1 : -1;
          }
        }
      }
      (y[i] == 1 ? left_pos : left_neg) += w[i];
    }
  }
  if (total > 0.0) best.weighted_error /= total;
  return best;
}

}  // namespace

StumpFit fit_stump(const Matrix& X, std::span<const int> y, std::span<const double> weights) {
  if (X.rows() != y.size() || y.size() != weights.size() || X.rows() == 0)
    throw ArgumentError("fit_stump: size mismatch");
  return fit_stump_presorted(X, PresortedColumns(X), y, weights);
}

void adaboost_reweight(std::span<double> weights, std::span<const int> y, std::span<const int> votes,
                       double alpha) {
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double yi = y[i] == 1 ? 1.0 : -1.0;
    weights[i] *= std::exp(-alpha * yi * votes[i]);
    sum += weights[i];
  }
  for (double& w : weights) w /= sum;
}

TrainedModel fit_adaboost(const Matrix& X, std::span<const int> y, const Hyperparams& hp) {
  check_training_data(X, y, "fit_adaboost");
  const std::size_t n = X.rows();
  TrainedModel model = make_model(ClassifierKind::adaboost, hp, X.cols());
  const PresortedColumns sorted(X);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<int> votes(n);
  AdaBoostParams p;
  constexpr double kMinError = 1e-10;
  for (std::size_t round = 0; round < hp.adaboost.rounds; ++round) {
    const StumpFit fitted = fit_stump_presorted(X, sorted, y, w);
    const double eps = fitted.weighted_error;
    if (eps >= 0.5) {
      if (p.stumps.empty()) {
        Stump s = fitted.stump;
        s.alpha = 0.0;
        p.stumps.push_back(s);
      }
      break;
    }
    Stump s = fitted.stump;
    const double e = std::max(eps, kMinError);
    s.alpha = 0.5 * std::log((1.0 - e) / e);
    p.stumps.push_back(s);
    if (eps == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) votes[i] = s.vote(X.row(i));
    adaboost_reweight(w, y, votes, s.alpha);
  }
  model.params = std::move(p);
  return model;
}

// ---------------------------------------------------------------------------
// Random forest

TrainedModel fit_random_forest(const Matrix& X, std::span<const int> y, const Hyperparams& hp,
                               std::uint64_t seed) {
  check_training_data(X, y, "fit_random_forest");
  const std::size_t n = X.rows(), d = X.cols();
  TrainedModel model = make_model(ClassifierKind::random_forest, hp, d);
  const auto& rf = hp.random_forest;
  CartOptions opt;
  opt.max_depth = rf.max_depth;
  opt.features_per_split =
      rf.features_per_split ? *rf.features_per_split
                            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  ForestParams p;
  p.trees.reserve(rf.trees);
  std::vector<double> weights(n);
  for (std::size_t t = 0; t < rf.trees; ++t) {
    Rng rng(derive_seed(seed, t));
    if (rf.bootstrap) {
      std::fill(weights.begin(), weights.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) weights[rng.below(n)] += 1.0;
    } else {
      std::fill(weights.begin(), weights.end(), 1.0);
    }
    p.trees.push_back(grow_cart(X, y, weights, opt, rng));
  }
  model.params = std::move(p);
  return model;
}

// ---------------------------------------------------------------------------
// Boosting on the logistic loss

namespace {

BoostParams fit_boosting(const Matrix& X, std::span<const int> y, std::size_t rounds, double learning_rate,
                         const LevelwiseOptions& options) {
  const std::size_t n = X.rows();
  const double positive = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const double p0 = positive / static_cast<double>(n);
  BoostParams p;
  p.base_score = std::log(p0 / (1.0 - p0));
  p.learning_rate = learning_rate;

  const PresortedColumns sorted(X);
  std::vector<double> F(n, p.base_score), residual(n), hessian(n);
  for (std::size_t m = 0; m < rounds; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double prob = sigmoid(F[i]);
      residual[i] = static_cast<double>(y[i]) - prob;
      hessian[i] = prob * (1.0 - prob);
    }
    Tree tree = grow_levelwise(X, sorted, residual, hessian, options);
    for (std::size_t i = 0; i < n; ++i) F[i] += learning_rate * tree.predict(X.row(i));
    p.trees.push_back(std::move(tree));
  }
  return p;
}

}  // namespace

TrainedModel fit_gradient_boost(const Matrix& X, std::span<const int> y, const Hyperparams& hp) {
  check_training_data(X, y, "fit_gradient_boost");
  TrainedModel model = make_model(ClassifierKind::gradient_boost, hp, X.cols());
  LevelwiseOptions opt;
  opt.criterion = SplitCriterion::variance;
  opt.max_depth = hp.gradient_boost.depth;
  model.params = fit_boosting(X, y, hp.gradient_boost.trees, hp.gradient_boost.learning_rate, opt);
  return model;
}

TrainedModel fit_second_order_boost(const Matrix& X, std::span<const int> y, const Hyperparams& hp) {
  check_training_data(X, y, "fit_second_order_boost");
  TrainedModel model = make_model(ClassifierKind::second_order_boost, hp, X.cols());
  const auto& so = hp.second_order_boost;
  LevelwiseOptions opt;
  opt.criterion = SplitCriterion::second_order;
  opt.max_depth = so.depth;
  opt.reg_lambda = so.reg_lambda;
  opt.min_split_gain = so.min_split_gain;
  model.params = fit_boosting(X, y, so.trees, so.learning_rate, opt);
  return model;
}

TrainedModel fit(ClassifierKind kind, const Matrix& X, std::span<const int> y, const Hyperparams& hp,
                 std::uint64_t seed) {
  switch (kind) {
    case ClassifierKind::gaussian_nb:
      return fit_gaussian_nb(X, y, hp);
    case ClassifierKind::knn:
      return fit_knn(X, y, hp);
    case ClassifierKind::linear_svm:
      return fit_linear_svm(X, y, hp, seed);
    case ClassifierKind::rbf_svm:
      return fit_rbf_svm(X, y, hp, seed);
    case ClassifierKind::adaboost:
      return fit_adaboost(X, y, hp);
    case ClassifierKind::random_forest:
      return fit_random_forest(X, y, hp, seed);
    case ClassifierKind::gradient_boost:
      return fit_gradient_boost(X, y, hp);
    case ClassifierKind::second_order_boost:
      return fit_second_order_boost(X, y, hp);
  }
  throw ArgumentError("fit: unknown classifier kind");
}

// ---------------------------------------------------------------------------
// Prediction

double boost_raw_score(const BoostParams& params, std::span<const double> x, std::size_t n_trees) {
  double f = params.base_score;
  const std::size_t m = std::min(n_trees, params.trees.size());
  for (std::size_t t = 0; t < m; ++t) f += params.learning_rate * params.trees[t].predict(x);
  return f;
}

std::vector<double> decision_function(const TrainedModel& model, const Matrix& X) {
  check_query(model, X);
  const Matrix Z = model.scaler ? model.scaler->apply(X) : X;
  std::vector<double> out(Z.rows());
  if (const auto* lin = std::get_if<LinearParams>(&model.params)) {
    for (std::size_t r = 0; r < Z.rows(); ++r) out[r] = dot(lin->weights, Z.row(r)) + lin->bias;
  } else if (const auto* ker = std::get_if<KernelParams>(&model.params)) {
    for (std::size_t r = 0; r < Z.rows(); ++r) {
      double f = 0.0;
      for (std::size_t j = 0; j < ker->coef.size(); ++j) f += ker->coef[j] * rbf(ker->gamma, ker->support.row(j), Z.row(r));
      out[r] = f;
    }
  } else if (const auto* ada = std::get_if<AdaBoostParams>(&model.params)) {
    for (std::size_t r = 0; r < Z.rows(); ++r) {
      double f = 0.0;
      for (const auto& s : ada->stumps) f += s.alpha * s.vote(Z.row(r));
      out[r] = f;
    }
  } else if (const auto* boost = std::get_if<BoostParams>(&model.params)) {
    for (std::size_t r = 0; r < Z.rows(); ++r) out[r] = boost_raw_score(*boost, Z.row(r), boost->trees.size());
  } else {
    throw ArgumentError("decision_function: not defined for " + std::string(to_string(model.kind)));
  }
  return out;
}

std::vector<int> predict(const TrainedModel& model, const Matrix& X) {
  check_query(model, X);
  std::vector<int> out(X.rows());
  if (const auto* nb = std::get_if<GaussianNbParams>(&model.params)) {
    std::array<double, 2> norm{};
    for (int k = 0; k < 2; ++k) {
      norm[k] = nb->log_prior[k];
      for (std::size_t c = 0; c < X.cols(); ++c)
        norm[k] -= 0.5 * std::log(2.0 * std::numbers::pi * nb->variance(k, c));
    }
    for (std::size_t r = 0; r < X.rows(); ++r) {
      std::array<double, 2> jll = norm;
      for (int k = 0; k < 2; ++k)
        for (std::size_t c = 0; c < X.cols(); ++c) {
          const double dv = X(r, c) - nb->mean(k, c);
          jll[k] -= 0.5 * dv * dv / nb->variance(k, c);
        }
      out[r] = jll[1] > jll[0] ? 1 : 0;
    }
    return out;
  }
  if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
    const Matrix Z = model.scaler->apply(X);
    const std::size_t n = knn->train.rows();
    const std::size_t k = std::min(knn->k, n);
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t r = 0; r < Z.rows(); ++r) {
      for (std::size_t j = 0; j < n; ++j) dist[j] = {squared_distance(Z.row(r), knn->train.row(j)), j};
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
      std::size_t ones = 0;
      for (std::size_t j = 0; j < k; ++j) ones += static_cast<std::size_t>(knn->labels[dist[j].second]);
      out[r] = 2 * ones > k ? 1 : 0;
    }
    return out;
  }
  if (const auto* forest = std::get_if<ForestParams>(&model.params)) {
    for (std::size_t r = 0; r < X.rows(); ++r) {
      std::size_t ones = 0;
      for (const auto& tree : forest->trees) ones += tree.predict(X.row(r)) > 0.5 ? 1 : 0;
      out[r] = 2 * ones > forest->trees.size() ? 1 : 0;
    }
    return out;
  }
  const auto f = decision_function(model, X);
  for (std::size_t r = 0; r < f.size(); ++r) out[r] = f[r] > 0.0 ? 1 : 0;
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size() || truth.empty())
    throw ArgumentError("accuracy: need equal, non-zero lengths");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace twoheads
