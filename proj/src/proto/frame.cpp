#include "smartbag/proto/frame.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace smartbag::proto {
namespace {

constexpr char kHex[] = "0123456789ABCDEF";

bool valid_device_id(std::string_view id) {
  if (id.empty() || id.size() > 16) return false;
  for (unsigned char c : id)
    if (!std::isalnum(c)) return false;
  return true;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  if (s.empty() || s.front() == '+') return std::nullopt;
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) return std::nullopt;
  }
  return v;
}

}  // namespace

std::string_view to_string(FrameError::Kind kind) {
  switch (kind) {
    case FrameError::Kind::BadStart: return "BadStart";
    case FrameError::Kind::BadFieldCount: return "BadFieldCount";
    case FrameError::Kind::BadNumber: return "BadNumber";
    case FrameError::Kind::RangeViolation: return "RangeViolation";
    case FrameError::Kind::BadChecksum: return "BadChecksum";
  }
  return "Unknown";
}

std::string checksum(std::string_view payload) {
  unsigned char x = 0;
  for (unsigned char c : payload) x ^= c;
  return {kHex[x >> 4], kHex[x & 0x0F]};
}

std::string format_real(double v) {
  if (v == 0.0) return "0";
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 6);
  return {buf.data(), end};
}

std::string_view invalid_field(const SensorFrame& f) {
  if (!valid_device_id(f.device_id)) return "device_id";
  if (f.ts < 0) return "ts";
  const std::array<std::pair<std::string_view, double>, 18> reals{{
      {"lat", f.gps.lat}, {"lon", f.gps.lon}, {"alt", f.gps.alt}, {"speed", f.gps.speed},
      {"heading", f.gps.heading}, {"ax", f.imu.ax}, {"ay", f.imu.ay}, {"az", f.imu.az},
      {"yaw", f.imu.yaw}, {"pitch", f.imu.pitch}, {"roll", f.imu.roll},
      {"load_left", f.load_left}, {"load_right", f.load_right}, {"mq2", f.mq2},
      {"mq135", f.mq135}, {"temp", f.temp}, {"humidity", f.humidity}, {"water", 0.0}}};
  for (const auto& [name, v] : reals)
    if (!std::isfinite(v)) return name;
  if (f.gps.lat < -90.0 || f.gps.lat > 90.0) return "lat";
  if (f.gps.lon < -180.0 || f.gps.lon > 180.0) return "lon";
  if (f.humidity < 0.0 || f.humidity > 100.0) return "humidity";
  if (f.water != 0 && f.water != 1) return "water";
  if (f.sos != 0 && f.sos != 1) return "sos";
  return {};
}

std::string encode_frame(const SensorFrame& f) {
  if (auto bad = invalid_field(f); !bad.empty())
    throw std::invalid_argument("encode_frame: invalid field " + std::string(bad));

  std::string p = "BAG," + f.device_id + ',' + std::to_string(f.seq) + ',' + std::to_string(f.ts);
  for (double v : {f.gps.lat, f.gps.lon, f.gps.alt, f.gps.speed, f.gps.heading, f.imu.ax, f.imu.ay,
                   f.imu.az, f.imu.yaw, f.imu.pitch, f.imu.roll, f.load_left, f.load_right, f.mq2,
                   f.mq135, f.temp, f.humidity}) {
    p += ',';
    p += format_real(v);
  }
  p += ',' + std::to_string(f.water) + ',' + std::to_string(f.sos);
  return '$' + p + '*' + checksum(p) + '\n';
}

ParseResult parse_frame(std::string_view line) {
  using Kind = FrameError::Kind;
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (line.empty() || line.front() != '$') return FrameError{Kind::BadStart, {}};

  const auto star = line.find('*');
  if (star == std::string_view::npos) return FrameError{Kind::BadStart, {}};
  const std::string_view payload = line.substr(1, star - 1);
  const std::string_view token = line.substr(star + 1);

  std::vector<std::string_view> fields;
  for (std::size_t start = 0;;) {
    const auto comma = payload.find(',', start);
    fields.push_back(payload.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.front() != "BAG") return FrameError{Kind::BadStart, {}};
  if (fields.size() != kPayloadFieldCount) return FrameError{Kind::BadFieldCount, {}};
  if (token != checksum(payload)) return FrameError{Kind::BadChecksum, {}};

  SensorFrame f;
  f.device_id = std::string(fields[1]);
  if (!valid_device_id(f.device_id)) return FrameError{Kind::RangeViolation, "device_id"};

  auto seq = parse_number<std::uint32_t>(fields[2]);
  if (!seq) return FrameError{Kind::BadNumber, "seq"};
  f.seq = *seq;
  auto ts = parse_number<std::int64_t>(fields[3]);
  if (!ts) return FrameError{Kind::BadNumber, "ts"};
  f.ts = *ts;

  double* reals[] = {&f.gps.lat, &f.gps.lon, &f.gps.alt, &f.gps.speed, &f.gps.heading,
                     &f.imu.ax, &f.imu.ay, &f.imu.az, &f.imu.yaw, &f.imu.pitch, &f.imu.roll,
                     &f.load_left, &f.load_right, &f.mq2, &f.mq135, &f.temp, &f.humidity};
  std::size_t i = 4;
  for (double* target : reals) {
    auto v = parse_number<double>(fields[i]);
    if (!v) return FrameError{Kind::BadNumber, std::string(kFrameFields[i - 1])};
    *target = *v;
    ++i;
  }
  for (int* target : {&f.water, &f.sos}) {
    auto v = parse_number<int>(fields[i]);
    if (!v) return FrameError{Kind::BadNumber, std::string(kFrameFields[i - 1])};
    *target = *v;
    ++i;
  }

  if (auto bad = invalid_field(f); !bad.empty()) return FrameError{Kind::RangeViolation, std::string(bad)};
  return f;
}

}  // namespace smartbag::proto
