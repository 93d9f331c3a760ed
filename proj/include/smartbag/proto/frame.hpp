#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace smartbag::proto {

/// One timestamped reading of every bag channel.
struct SensorFrame {
  std::string device_id;
  std::uint32_t seq = 0;
  std::int64_t ts = 0;  // unix epoch milliseconds

  struct Gps {
    double lat = 0, lon = 0, alt = 0, speed = 0, heading = 0;
    bool operator==(const Gps&) const = default;
  } gps;

  struct Imu {
    double ax = 0, ay = 0, az = 0;       // g
    double yaw = 0, pitch = 0, roll = 0;  // deg/s
    bool operator==(const Imu&) const = default;
  } imu;

  double load_left = 0, load_right = 0;
  double mq2 = 0, mq135 = 0;
  double temp = 0;
  double humidity = 0;
  int water = 0;
  int sos = 0;

  bool operator==(const SensorFrame&) const = default;
};

/// Field names in wire order after the `BAG` tag, used in error reports.
inline constexpr std::string_view kFrameFields[] = {
    "device_id", "seq",   "ts",    "lat",       "lon",        "alt",  "speed", "heading",
    "ax",        "ay",    "az",    "yaw",       "pitch",      "roll", "load_left",
    "load_right", "mq2",  "mq135", "temp",      "humidity",   "water", "sos"};

/// Payload fields including the leading `BAG` tag.
inline constexpr std::size_t kPayloadFieldCount = 23;

struct FrameError {
  enum class Kind { BadStart, BadFieldCount, BadNumber, RangeViolation, BadChecksum };
  Kind kind;
  std::string field;  // empty unless BadNumber / RangeViolation

  bool operator==(const FrameError&) const = default;
};

std::string_view to_string(FrameError::Kind kind);

using ParseResult = std::variant<SensorFrame, FrameError>;

/// XOR of all bytes, as two uppercase hex digits.
std::string checksum(std::string_view payload);

/// Returns the field that violates a frame invariant, or an empty view.
std::string_view invalid_field(const SensorFrame& frame);

/// `$BAG,...*CK\n`. Throws std::invalid_argument for an invalid frame.
std::string encode_frame(const SensorFrame& frame);

/// Accepts one line with or without its trailing `\n`. Never throws.
ParseResult parse_frame(std::string_view line);

/// Shortest decimal of `v` rounded to 6 significant digits.
std::string format_real(double v);

}  // namespace smartbag::proto
