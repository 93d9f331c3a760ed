#pragma once

#include <cmath>
#include <random>
#include <string>

#include "smartbag/proto/frame.hpp"

namespace testgen {

/// A decimal with at most 6 significant digits, as the nearest double.
inline double short_decimal(std::mt19937_64& rng, long max_mantissa, int max_scale) {
  std::uniform_int_distribution<long> mantissa(-max_mantissa, max_mantissa);
  std::uniform_int_distribution<int> scale(0, max_scale);
  return static_cast<double>(mantissa(rng)) / std::pow(10.0, scale(rng));
}

inline smartbag::proto::SensorFrame random_frame(std::mt19937_64& rng) {
  static const char alnum[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  std::uniform_int_distribution<int> len(1, 16), ch(0, 61), bit(0, 1);
  std::uniform_int_distribution<std::uint32_t> seq;
  std::uniform_int_distribution<std::int64_t> ts(0, 4'000'000'000'000);
  std::uniform_int_distribution<long> lat(-900000, 900000), lon(-180000, 180000), hum(0, 100000);

  smartbag::proto::SensorFrame f;
  for (int i = len(rng); i > 0; --i) f.device_id += alnum[ch(rng)];
  f.seq = seq(rng);
  f.ts = ts(rng);
  f.gps.lat = static_cast<double>(lat(rng)) / 1e4;
  f.gps.lon = static_cast<double>(lon(rng)) / 1e3;
  f.gps.alt = short_decimal(rng, 999999, 3);
  f.gps.speed = short_decimal(rng, 99999, 3);
  f.gps.heading = short_decimal(rng, 35999, 2);
  f.imu.ax = short_decimal(rng, 999999, 8);
  f.imu.ay = short_decimal(rng, 999999, 8);
  f.imu.az = short_decimal(rng, 999999, 8);
  f.imu.yaw = short_decimal(rng, 999999, 4);
  f.imu.pitch = short_decimal(rng, 999999, 4);
  f.imu.roll = short_decimal(rng, 999999, 4);
  f.load_left = short_decimal(rng, 999999, 2);
  f.load_right = short_decimal(rng, 999999, 2);
  f.mq2 = short_decimal(rng, 999999, 2);
  f.mq135 = short_decimal(rng, 999999, 2);
  f.temp = short_decimal(rng, 99999, 3);
  f.humidity = static_cast<double>(hum(rng)) / 1e3;
  f.water = bit(rng);
  f.sos = bit(rng);
  return f;
}

/// Random bytes, random edits of a valid line, or a truncated valid line.
inline std::string fuzz_line(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> mode(0, 3), byte(0, 255);
  std::string line = smartbag::proto::encode_frame(random_frame(rng));
  std::uniform_int_distribution<std::size_t> pos(0, line.size() - 1);
  switch (mode(rng)) {
    case 0: {
      std::string junk(pos(rng), '\0');
      for (auto& c : junk) c = static_cast<char>(byte(rng));
      return junk;
    }
    case 1:
      for (int i = 0; i < 4; ++i) line[pos(rng)] = static_cast<char>(byte(rng));
      return line;
    case 2:
      return line.substr(0, pos(rng));
    default: {
      const char specials[] = {',', '*', '$', '\n', '-', '.', 'e', '\0'};
      std::uniform_int_distribution<int> which(0, 7);
      line.insert(pos(rng), 1, specials[which(rng)]);
      return line;
    }
  }
}

}  // namespace testgen
