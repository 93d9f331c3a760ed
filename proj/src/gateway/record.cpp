#include "smartbag/gateway/record.hpp"

#include <limits>

namespace smartbag::gateway {

json to_record(const proto::SensorFrame& f, std::int64_t recv_ts) {
  return {
      {"deviceId", f.device_id},
      {"seq", f.seq},
      {"ts", f.ts},
      {"recvTs", recv_ts},
      {"gps", {{"lat", f.gps.lat}, {"lon", f.gps.lon}, {"alt", f.gps.alt}, {"speed", f.gps.speed},
               {"heading", f.gps.heading}}},
      {"imu", {{"ax", f.imu.ax}, {"ay", f.imu.ay}, {"az", f.imu.az}, {"yaw", f.imu.yaw},
               {"pitch", f.imu.pitch}, {"roll", f.imu.roll}}},
      {"load", {{"left", f.load_left}, {"right", f.load_right}}},
      {"gas", {{"mq2", f.mq2}, {"mq135", f.mq135}}},
      {"env", {{"temp", f.temp}, {"hum", f.humidity}}},
      {"water", f.water},
      {"sos", f.sos},
  };
}

namespace {

const json& lookup(const json& record, std::string_view dotted) {
  const json* node = &record;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const auto key = std::string(dotted.substr(start, dot - start));
    if (!node->is_object()) throw RecordError(std::string(dotted));
    auto it = node->find(key);
    if (it == node->end()) throw RecordError(std::string(dotted));
    node = &*it;
    if (dot == std::string_view::npos) return *node;
    start = dot + 1;
  }
}

template <typename Int>
Int record_integer(const json& record, std::string_view dotted) {
  const json& v = lookup(record, dotted);
  if (!v.is_number_integer()) throw RecordError(std::string(dotted));
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) throw RecordError(std::string(dotted));
    return static_cast<Int>(u);
  }
  const auto s = v.get<std::int64_t>();
  if (s < static_cast<std::int64_t>(std::numeric_limits<Int>::min()) ||
      (s > 0 && static_cast<std::uint64_t>(s) > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())))
    throw RecordError(std::string(dotted));
  return static_cast<Int>(s);
}

}  // namespace

double record_number(const json& record, std::string_view dotted) {
  const json& v = lookup(record, dotted);
  if (!v.is_number()) throw RecordError(std::string(dotted));
  return v.get<double>();
}

proto::SensorFrame from_record(const json& r) {
  proto::SensorFrame f;
  const json& id = lookup(r, "deviceId");
  if (!id.is_string()) throw RecordError("deviceId");
  f.device_id = id.get<std::string>();
  f.seq = record_integer<std::uint32_t>(r, "seq");
  f.ts = record_integer<std::int64_t>(r, "ts");
  f.gps = {record_number(r, "gps.lat"), record_number(r, "gps.lon"), record_number(r, "gps.alt"),
           record_number(r, "gps.speed"), record_number(r, "gps.heading")};
  f.imu = {record_number(r, "imu.ax"),  record_number(r, "imu.ay"),    record_number(r, "imu.az"),
           record_number(r, "imu.yaw"), record_number(r, "imu.pitch"), record_number(r, "imu.roll")};
  f.load_left = record_number(r, "load.left");
  f.load_right = record_number(r, "load.right");
  f.mq2 = record_number(r, "gas.mq2");
  f.mq135 = record_number(r, "gas.mq135");
  f.temp = record_number(r, "env.temp");
  f.humidity = record_number(r, "env.hum");
  f.water = record_integer<int>(r, "water");
  f.sos = record_integer<int>(r, "sos");
  return f;
}

}  // namespace smartbag::gateway
