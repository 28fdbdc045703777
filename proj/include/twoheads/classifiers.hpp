#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "twoheads/matrix.hpp"
#include "twoheads/trees.hpp"

namespace twoheads {

enum class ClassifierKind {
  gaussian_nb,
  knn,
  linear_svm,
  rbf_svm,
  adaboost,
  random_forest,
  gradient_boost,
  second_order_boost,
};

inline constexpr std::array<ClassifierKind, 8> kAllClassifiers = {
    ClassifierKind::gaussian_nb,   ClassifierKind::linear_svm,     ClassifierKind::knn,
    ClassifierKind::rbf_svm,       ClassifierKind::adaboost,       ClassifierKind::random_forest,
    ClassifierKind::gradient_boost, ClassifierKind::second_order_boost,
};

std::string_view to_string(ClassifierKind kind);
// Canonical names plus the short aliases gnb, svm, rbf, ada, rf, gb, xgb.
std::optional<ClassifierKind> parse_classifier(std::string_view name);

struct Hyperparams {
  struct GaussianNb {
    double var_smoothing = 1e-9;  // times the largest column variance
    bool operator==(const GaussianNb&) const = default;
  } gaussian_nb;
  struct Knn {
    std::size_t k = 5;
    bool operator==(const Knn&) const = default;
  } knn;
  struct LinearSvm {
    double lambda = 1e-4;
    std::size_t epochs = 100;
    bool operator==(const LinearSvm&) const = default;
  } linear_svm;
  struct RbfSvm {
    double lambda = 1e-4;
    std::size_t epochs = 100;
    std::optional<double> gamma;  // default 1 / (d * mean feature variance)
    bool operator==(const RbfSvm&) const = default;
  } rbf_svm;
  struct AdaBoost {
    std::size_t rounds = 100;
    bool operator==(const AdaBoost&) const = default;
  } adaboost;
  struct RandomForest {
    std::size_t trees = 100;
    std::optional<std::size_t> max_depth;           // unlimited
    std::optional<std::size_t> features_per_split;  // ceil(sqrt(d))
    bool bootstrap = true;
    bool operator==(const RandomForest&) const = default;
  } random_forest;
  struct GradientBoost {
    std::size_t trees = 100;
    std::size_t depth = 3;
    double learning_rate = 0.1;
    bool operator==(const GradientBoost&) const = default;
  } gradient_boost;
  struct SecondOrderBoost {
    std::size_t trees = 100;
    std::size_t depth = 3;
    double learning_rate = 0.1;
    double reg_lambda = 1.0;
    double min_split_gain = 0.0;
    bool operator==(const SecondOrderBoost&) const = default;
  } second_order_boost;

  // Throws ConfigError.
  void validate() const;
  bool operator==(const Hyperparams&) const = default;
};

// Per-feature affine map fitted on training rows: (x - mean) / scale, with
// scale 1 for constant columns.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& X);
  Matrix apply(const Matrix& X) const;
  bool operator==(const Standardizer&) const = default;
};

struct GaussianNbParams {
  std::array<double, 2> log_prior{};
  Matrix mean;      // 2 x d
  Matrix variance;  // 2 x d, smoothed
  bool operator==(const GaussianNbParams&) const = default;
};

struct KnnParams {
  std::size_t k = 5;
  Matrix train;  // standardized
  std::vector<int> labels;
  bool operator==(const KnnParams&) const = default;
};

struct LinearParams {
  std::vector<double> weights;
  double bias = 0.0;
  bool operator==(const LinearParams&) const = default;
};

// f(x) = sum_j coef[j] * (K(sv_j, x) + 1), K(u, v) = exp(-gamma |u - v|^2).
// The +1 plays the role of a (regularized) bias.
struct KernelParams {
  double gamma = 1.0;
  Matrix support;
  std::vector<double> coef;
  bool operator==(const KernelParams&) const = default;
};

// Votes +1 (label 1) when polarity * (x[feature] - threshold) > 0.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;
  double alpha = 0.0;
  int vote(std::span<const double> x) const {
    return polarity * (x[feature] - threshold) > 0.0 ? 1 : -1;
  }
  bool operator==(const Stump&) const = default;
};

struct AdaBoostParams {
  std::vector<Stump> stumps;
  bool operator==(const AdaBoostParams&) const = default;
};

struct ForestParams {
  std::vector<Tree> trees;  // leaves hold labels
  bool operator==(const ForestParams&) const = default;
};

// F(x) = base_score + learning_rate * sum_m tree_m(x); label 1 iff F > 0.
struct BoostParams {
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<Tree> trees;
  bool operator==(const BoostParams&) const = default;
};

struct TrainedModel {
  ClassifierKind kind = ClassifierKind::gaussian_nb;
  Hyperparams hp;
  std::size_t n_features = 0;
  std::optional<Standardizer> scaler;
  std::variant<GaussianNbParams, KnnParams, LinearParams, KernelParams, AdaBoostParams, ForestParams,
               BoostParams>
      params;
};

TrainedModel fit_gaussian_nb(const Matrix& X, std::span<const int> y, const Hyperparams& hp);
TrainedModel fit_knn(const Matrix& X, std::span<const int> y, const Hyperparams& hp);
TrainedModel fit_linear_svm(const Matrix& X, std::span<const int> y, const Hyperparams& hp,
                            std::uint64_t seed);
TrainedModel fit_rbf_svm(const Matrix& X, std::span<const int> y, const Hyperparams& hp, std::uint64_t seed);
TrainedModel fit_adaboost(const Matrix& X, std::span<const int> y, const Hyperparams& hp);
TrainedModel fit_random_forest(const Matrix& X, std::span<const int> y, const Hyperparams& hp,
                               std::uint64_t seed);
TrainedModel fit_gradient_boost(const Matrix& X, std::span<const int> y, const Hyperparams& hp);
TrainedModel fit_second_order_boost(const Matrix& X, std::span<const int> y, const Hyperparams& hp);

// Dispatches on kind; deterministic families ignore the seed.
TrainedModel fit(ClassifierKind kind, const Matrix& X, std::span<const int> y, const Hyperparams& hp,
                 std::uint64_t seed);

std::vector<int> predict(const TrainedModel& model, const Matrix& X);

// Real-valued score whose sign gives the label (label 1 iff > 0). Defined
// for linear_svm, rbf_svm, adaboost and both boosters; throws ArgumentError
// otherwise.
std::vector<double> decision_function(const TrainedModel& model, const Matrix& X);

// Boosted raw score using only the first `n_trees` trees.
double boost_raw_score(const BoostParams& params, std::span<const double> x, std::size_t n_trees);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

// AdaBoost building blocks, exposed for inspection.
struct StumpFit {
  Stump stump;
  double weighted_error = 0.0;
};
StumpFit fit_stump(const Matrix& X, std::span<const int> y, std::span<const double> weights);
// Multiplies each weight by exp(-alpha * y * h) (y, h in {-1, +1}) and
// renormalizes to sum 1.
void adaboost_reweight(std::span<double> weights, std::span<const int> y, std::span<const int> votes,
                       double alpha);

// Structured JSON with the kind tag, hyperparameters and parameter arrays
// at round-trip precision.
std::string to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

}  // namespace twoheads
