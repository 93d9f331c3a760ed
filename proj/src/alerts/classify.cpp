#include "smartbag/alerts/classify.hpp"

#include <array>
#include <stdexcept>

#include "smartbag/data/dataset.hpp"
#include "smartbag/gateway/record.hpp"

namespace smartbag::alerts {
namespace {

// Record location of each feature, in canonical feature order.
constexpr std::array<std::string_view, data::kFeatureCount> kFeaturePaths{
    "imu.ax",    "imu.ay",     "imu.az",  "imu.yaw",   "imu.pitch", "imu.roll", "load.left",
    "load.right", "gas.mq2",   "gas.mq135", "env.temp", "env.hum",   "water"};

}  // namespace

Eigen::VectorXd record_features(const nlohmann::json& record) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(data::kFeatureCount));
  for (std::size_t i = 0; i < kFeaturePaths.size(); ++i)
    x[static_cast<Eigen::Index>(i)] = gateway::record_number(record, kFeaturePaths[i]);
  return x;
}

Classification classify_record(const nn::PackagedModel& model, const nlohmann::json& record) {
  if (model.spec().input_width() != data::kFeatureCount)
    throw std::invalid_argument("classify: model input width is not 13");
  auto prediction = nn::predict(model.params, record_features(record));
  return {prediction.class_index, model.vocabulary.name(prediction.class_index),
          std::move(prediction.probabilities)};
}

}  // namespace smartbag::alerts
