#pragma once

#include <json.hpp>

#include "twoheads/classifiers.hpp"

namespace twoheads {

nlohmann::json hyperparams_to_json(const Hyperparams& hp);
// Missing keys keep their defaults, so partial override files work.
Hyperparams hyperparams_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

}  // namespace twoheads
