#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "smartbag/proto/frame.hpp"

namespace smartbag::gateway {

using json = nlohmann::json;

/// A telemetry document is missing a field or has one of the wrong type.
class RecordError : public std::runtime_error {
 public:
  explicit RecordError(std::string field)
      : std::runtime_error("telemetry record: bad or missing field '" + field + "'"),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// {"deviceId","seq","ts","recvTs","gps":{lat,lon,alt,speed,heading},
//  "imu":{ax,ay,az,yaw,pitch,roll},"load":{left,right},"gas":{mq2,mq135},
//  "env":{temp,hum},"water","sos"}
json to_record(const proto::SensorFrame& frame, std::int64_t recv_ts);

/// Inverse of to_record, ignoring recvTs and any extra keys such as "activity".
proto::SensorFrame from_record(const json& record);

/// Numeric field at a dotted path like "gps.lat". Throws RecordError.
double record_number(const json& record, std::string_view dotted);

}  // namespace smartbag::gateway
