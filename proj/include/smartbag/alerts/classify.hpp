#pragma once

#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "smartbag/nn/model_io.hpp"

namespace smartbag::alerts {

/// The 13 model features of a telemetry record in canonical order.
/// Throws gateway::RecordError naming the first missing field.
Eigen::VectorXd record_features(const nlohmann::json& record);

struct Classification {
  std::size_t class_index = 0;
  std::string activity;
  Eigen::VectorXd probabilities;
};

/// Throws std::invalid_argument if the model does not take 13 features.
Classification classify_record(const nn::PackagedModel& model, const nlohmann::json& record);

}  // namespace smartbag::alerts
