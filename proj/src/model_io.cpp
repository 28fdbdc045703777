#include <string>

#include "twoheads/error.hpp"
#include "twoheads/json_io.hpp"

namespace twoheads {

using nlohmann::json;

namespace {

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null())
    out.reset();
  else
    out = j.at(key).get<T>();
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json matrix_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

Matrix matrix_from(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.rows() * m.cols()) throw FormatError("model json: matrix size mismatch");
  std::copy(data.begin(), data.end(), m.data().begin());
  return m;
}

json tree_json(const Tree& t) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       value = json::array();
  for (const auto& n : t.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return json{{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

Tree tree_from(const json& j) {
  Tree t;
  const auto feature = j.at("feature").get<std::vector<std::int32_t>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<std::int32_t>>();
  const auto right = j.at("right").get<std::vector<std::int32_t>>();
  const auto value = j.at("value").get<std::vector<double>>();
  t.nodes.resize(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i)
    t.nodes[i] = TreeNode{feature[i], threshold.at(i), left.at(i), right.at(i), value.at(i)};
  return t;
}

json trees_json(const std::vector<Tree>& trees) {
  json out = json::array();
  for (const auto& t : trees) out.push_back(tree_json(t));
  return out;
}

std::vector<Tree> trees_from(const json& j) {
  std::vector<Tree> out;
  for (const auto& t : j) out.push_back(tree_from(t));
  return out;
}

}  // namespace

json hyperparams_to_json(const Hyperparams& hp) {
  return json{
      {"gaussian_nb", {{"var_smoothing", hp.gaussian_nb.var_smoothing}}},
      {"knn", {{"k", hp.knn.k}}},
      {"linear_svm", {{"lambda", hp.linear_svm.lambda}, {"epochs", hp.linear_svm.epochs}}},
      {"rbf_svm",
       {{"lambda", hp.rbf_svm.lambda}, {"epochs", hp.rbf_svm.epochs}, {"gamma", optional_json(hp.rbf_svm.gamma)}}},
      {"adaboost", {{"rounds", hp.adaboost.rounds}}},
      {"random_forest",
       {{"trees", hp.random_forest.trees},
        {"max_depth", optional_json(hp.random_forest.max_depth)},
        {"features_per_split", optional_json(hp.random_forest.features_per_split)},
        {"bootstrap", hp.random_forest.bootstrap}}},
      {"gradient_boost",
       {{"trees", hp.gradient_boost.trees},
        {"depth", hp.gradient_boost.depth},
        {"learning_rate", hp.gradient_boost.learning_rate}}},
      {"second_order_boost",
       {{"trees", hp.second_order_boost.trees},
        {"depth", hp.second_order_boost.depth},
        {"learning_rate", hp.second_order_boost.learning_rate},
        {"reg_lambda", hp.second_order_boost.reg_lambda},
        {"min_split_gain", hp.second_order_boost.min_split_gain}}},
  };
}

Hyperparams hyperparams_from_json(const json& j) {
  Hyperparams hp;
  if (j.contains("gaussian_nb")) read(j["gaussian_nb"], "var_smoothing", hp.gaussian_nb.var_smoothing);
  if (j.contains("knn")) read(j["knn"], "k", hp.knn.k);
  if (j.contains("linear_svm")) {
    read(j["linear_svm"], "lambda", hp.linear_svm.lambda);
    read(j["linear_svm"], "epochs", hp.linear_svm.epochs);
  }
  if (j.contains("rbf_svm")) {
    read(j["rbf_svm"], "lambda", hp.rbf_svm.lambda);
    read(j["rbf_svm"], "epochs", hp.rbf_svm.epochs);
    read_optional(j["rbf_svm"], "gamma", hp.rbf_svm.gamma);
  }
  if (j.contains("adaboost")) read(j["adaboost"], "rounds", hp.adaboost.rounds);
  if (j.contains("random_forest")) {
    const auto& rf = j["random_forest"];
    read(rf, "trees", hp.random_forest.trees);
    read_optional(rf, "max_depth", hp.random_forest.max_depth);
    read_optional(rf, "features_per_split", hp.random_forest.features_per_split);
    read(rf, "bootstrap", hp.random_forest.bootstrap);
  }
  if (j.contains("gradient_boost")) {
    const auto& gb = j["gradient_boost"];
    read(gb, "trees", hp.gradient_boost.trees);
    read(gb, "depth", hp.gradient_boost.depth);
    read(gb, "learning_rate", hp.gradient_boost.learning_rate);
  }
  if (j.contains("second_order_boost")) {
    const auto& so = j["second_order_boost"];
    read(so, "trees", hp.second_order_boost.trees);
    read(so, "depth", hp.second_order_boost.depth);
    read(so, "learning_rate", hp.second_order_boost.learning_rate);
    read(so, "reg_lambda", hp.second_order_boost.reg_lambda);
    read(so, "min_split_gain", hp.second_order_boost.min_split_gain);
  }
  hp.validate();
  return hp;
}

json model_to_json(const TrainedModel& model) {
  json j;
  j["kind"] = std::string(to_string(model.kind));
  j["hyperparams"] = hyperparams_to_json(model.hp);
  j["n_features"] = model.n_features;
  if (model.scaler)
    j["scaler"] = json{{"mean", model.scaler->mean}, {"scale", model.scaler->scale}};
  else
    j["scaler"] = nullptr;

  json p;
  if (const auto* nb = std::get_if<GaussianNbParams>(&model.params)) {
    p = json{{"log_prior", nb->log_prior}, {"mean", matrix_json(nb->mean)}, {"variance", matrix_json(nb->variance)}};
  } else if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
    p = json{{"k", knn->k}, {"train", matrix_json(knn->train)}, {"labels", knn->labels}};
  } else if (const auto* lin = std::get_if<LinearParams>(&model.params)) {
    p = json{{"weights", lin->weights}, {"bias", lin->bias}};
  } else if (const auto* ker = std::get_if<KernelParams>(&model.params)) {
    p = json{{"gamma", ker->gamma}, {"support", matrix_json(ker->support)}, {"coef", ker->coef}};
  } else if (const auto* ada = std::get_if<AdaBoostParams>(&model.params)) {
    json stumps = json::array();
    for (const auto& s : ada->stumps)
      stumps.push_back({{"feature", s.feature}, {"threshold", s.threshold}, {"polarity", s.polarity}, {"alpha", s.alpha}});
    p = json{{"stumps", stumps}};
  } else if (const auto* forest = std::get_if<ForestParams>(&model.params)) {
    p = json{{"trees", trees_json(forest->trees)}};
  } else if (const auto* boost = std::get_if<BoostParams>(&model.params)) {
    p = json{{"base_score", boost->base_score},
             {"learning_rate", boost->learning_rate},
             {"trees", trees_json(boost->trees)}};
  }
  j["params"] = p;
  return j;
}

TrainedModel model_from_json(const json& j) {
  TrainedModel m;
  const auto name = j.at("kind").get<std::string>();
  const auto kind = parse_classifier(name);
  if (!kind) throw FormatError("model json: unknown kind " + name);
  m.kind = *kind;
  m.hp = hyperparams_from_json(j.at("hyperparams"));
  m.n_features = j.at("n_features").get<std::size_t>();
  if (!j.at("scaler").is_null())
    m.scaler = Standardizer{j["scaler"].at("mean").get<std::vector<double>>(),
                            j["scaler"].at("scale").get<std::vector<double>>()};
  const json& p = j.at("params");
  switch (m.kind) {
    case ClassifierKind::gaussian_nb:
      m.params = GaussianNbParams{p.at("log_prior").get<std::array<double, 2>>(), matrix_from(p.at("mean")),
                                  matrix_from(p.at("variance"))};
      break;
    case ClassifierKind::knn:
      m.params = KnnParams{p.at("k").get<std::size_t>(), matrix_from(p.at("train")),
                           p.at("labels").get<std::vector<int>>()};
      break;
    case ClassifierKind::linear_svm:
      m.params = LinearParams{p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>()};
      break;
    case ClassifierKind::rbf_svm:
      m.params = KernelParams{p.at("gamma").get<double>(), matrix_from(p.at("support")),
                              p.at("coef").get<std::vector<double>>()};
      break;
    case ClassifierKind::adaboost: {
      AdaBoostParams ada;
      for (const auto& s : p.at("stumps"))
        ada.stumps.push_back(Stump{s.at("feature").get<std::size_t>(), s.at("threshold").get<double>(),
                                   s.at("polarity").get<int>(), s.at("alpha").get<double>()});
      m.params = std::move(ada);
      break;
    }
    case ClassifierKind::random_forest:
      m.params = ForestParams{trees_from(p.at("trees"))};
      break;
    case ClassifierKind::gradient_boost:
    case ClassifierKind::second_order_boost:
      m.params = BoostParams{p.at("base_score").get<double>(), p.at("learning_rate").get<double>(),
                             trees_from(p.at("trees"))};
      break;
  }
  return m;
}

std::string to_json(const TrainedModel& model) { return model_to_json(model).dump(); }

TrainedModel model_from_json(const std::string& text) { return model_from_json(json::parse(text)); }

}  // namespace twoheads
