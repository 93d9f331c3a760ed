#include "smartbag/gateway/source.hpp"

#include <fcntl.h>
#include <poll.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace smartbag::gateway {

LineSource::LineSource(int fd, Clock* pacing, bool owns_fd) : fd_(fd), pacing_(pacing), owns_fd_(owns_fd) {}

LineSource LineSource::open_file(const std::string& path, Clock* pacing) {
  const int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
  return LineSource(fd, pacing, true);
}

LineSource::LineSource(LineSource&& other) noexcept
    : fd_(other.fd_),
      pacing_(other.pacing_),
      owns_fd_(other.owns_fd_),
      eof_(other.eof_),
      pending_(std::move(other.pending_)),
      first_ts_(other.first_ts_),
      first_clock_(other.first_clock_) {
  other.owns_fd_ = false;
}

LineSource::~LineSource() {
  if (owns_fd_) ::close(fd_);
}

std::optional<std::string> LineSource::read_line(std::stop_token stop) {
  while (true) {
    if (auto nl = pending_.find('\n'); nl != std::string::npos) {
      std::string line = pending_.substr(0, nl + 1);
      pending_.erase(0, nl + 1);
      return line;
    }
    if (eof_) {
      if (pending_.empty()) return std::nullopt;
      return std::exchange(pending_, {});
    }
    if (stop.stop_requested()) return std::nullopt;

    pollfd p{fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, 100);
    if (ready < 0) {
      if (errno == EINTR) continue;
      eof_ = true;
      continue;
    }
    if (ready == 0) continue;

    char buf[4096];
    const auto n = ::read(fd_, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      eof_ = true;
    } else if (n == 0) {
      eof_ = true;
    } else {
      pending_.append(buf, static_cast<std::size_t>(n));
    }
  }
}

std::optional<std::string> LineSource::next_line(std::stop_token stop) {
  auto line = read_line(stop);
  if (!line || !pacing_) return line;

  // Frames that do not parse are handed over at once; the gateway counts them.
  auto parsed = proto::parse_frame(*line);
  if (auto* frame = std::get_if<proto::SensorFrame>(&parsed)) {
    if (!first_ts_) {
      first_ts_ = frame->ts;
      first_clock_ = pacing_->now_ms();
    } else if (!pacing_->sleep_until(first_clock_ + (frame->ts - *first_ts_), stop)) {
      return std::nullopt;
    }
  }
  return line;
}

proto::SensorFrame frame_from_features(const Eigen::VectorXd& x, std::string device_id, std::uint32_t seq,
                                       std::int64_t ts) {
  if (x.size() != static_cast<Eigen::Index>(data::kFeatureCount))
    throw std::invalid_argument("frame_from_features: expected 13 features");
  proto::SensorFrame f;
  f.device_id = std::move(device_id);
  f.seq = seq;
  f.ts = ts;
  f.imu = {x[data::kAx], x[data::kAy], x[data::kAz], x[data::kYaw], x[data::kPitch], x[data::kRoll]};
  f.load_left = x[data::kLoadLeft];
  f.load_right = x[data::kLoadRight];
  f.mq2 = x[data::kMq2];
  f.mq135 = x[data::kMq135];
  f.temp = x[data::kTemp];
  f.humidity = std::clamp(x[data::kHumidity], 0.0, 100.0);
  f.water = x[data::kWater] >= 0.5 ? 1 : 0;
  return f;
}

FrameSimulator::FrameSimulator(SimulatorOptions options, std::vector<data::ClassProfile> profiles)
    : options_(std::move(options)),
      profiles_(std::move(profiles)),
      rng_(options_.seed),
      lat_(options_.lat),
      lon_(options_.lon) {
  if (profiles_.empty()) throw std::invalid_argument("simulator: no class profiles");
  for (const auto& p : profiles_) p.validate();
  if (options_.segment_frames == 0) throw std::invalid_argument("simulator: segment length must be >= 1");
  if (options_.interval_ms <= 0) throw std::invalid_argument("simulator: interval must be > 0");
}

proto::SensorFrame FrameSimulator::next(std::int64_t ts) {
  if (index_ % options_.segment_frames == 0) {
    std::uniform_int_distribution<std::size_t> pick(0, profiles_.size() - 1);
    current_class_ = pick(rng_);
  }
  const auto& profile = profiles_[current_class_];
  auto frame = frame_from_features(data::sample_features(profile, rng_), options_.device_id, index_, ts);

  std::normal_distribution<double> drift(0.0, 1e-4);
  lat_ = std::clamp(lat_ + drift(rng_), -90.0, 90.0);
  lon_ = std::clamp(lon_ + drift(rng_), -180.0, 180.0);
  std::uniform_real_distribution<double> heading(0.0, 360.0);
  frame.gps = {lat_, lon_, options_.alt, std::abs(frame.imu.ax) * 3.0, heading(rng_)};

  std::bernoulli_distribution sos(profile.sos_probability);
  const bool drawn = sos(rng_);
  if (options_.sos_at)
    frame.sos = index_ == *options_.sos_at ? 1 : 0;
  else
    frame.sos = drawn ? 1 : 0;

  ++index_;
  return frame;
}

SimulatorSource::SimulatorSource(FrameSimulator simulator, Clock& clock, std::int64_t interval_ms,
                                 std::optional<std::uint64_t> limit)
    : simulator_(std::move(simulator)), clock_(clock), interval_ms_(interval_ms), limit_(limit) {
  if (interval_ms <= 0) throw std::invalid_argument("simulator source: interval must be > 0");
}

std::optional<std::string> SimulatorSource::next_line(std::stop_token stop) {
  if (limit_ && emitted_ >= *limit_) return std::nullopt;
  if (!next_due_) next_due_ = clock_.now_ms();
  if (!clock_.sleep_until(*next_due_, stop)) return std::nullopt;
  const auto ts = *next_due_;
  *next_due_ += interval_ms_;
  ++emitted_;
  return proto::encode_frame(simulator_.next(ts));
}

}  // namespace smartbag::gateway
