#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stop_token>
#include <string>
#include <vector>

#include "smartbag/data/dataset.hpp"
#include "smartbag/gateway/clock.hpp"
#include "smartbag/proto/frame.hpp"

namespace smartbag::gateway {

/// Produces raw protocol lines. nullopt means the source is exhausted or was stopped.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::optional<std::string> next_line(std::stop_token stop) = 0;
};

/// Reads lines from a file descriptor (trace file or stdin) without blocking
/// past a stop request. With a pacing clock, each frame is released when the
/// clock has advanced by its ts offset from the first frame.
class LineSource : public FrameSource {
 public:
  explicit LineSource(int fd, Clock* pacing = nullptr, bool owns_fd = false);
  static LineSource open_file(const std::string& path, Clock* pacing = nullptr);
  ~LineSource() override;
  LineSource(LineSource&& other) noexcept;
  LineSource(const LineSource&) = delete;
  LineSource& operator=(const LineSource&) = delete;
  LineSource& operator=(LineSource&&) = delete;

  std::optional<std::string> next_line(std::stop_token stop) override;

 private:
  std::optional<std::string> read_line(std::stop_token stop);

  int fd_;
  Clock* pacing_;
  bool owns_fd_;
  bool eof_ = false;
  std::string pending_;
  std::optional<std::int64_t> first_ts_;
  std::int64_t first_clock_ = 0;
};

struct SimulatorOptions {
  std::string device_id = "BAG1";
  std::uint64_t seed = 1;
  std::int64_t start_ts = 0;
  std::int64_t interval_ms = 1000;
  /// Frames per activity segment before a new class is drawn.
  std::uint32_t segment_frames = 10;
  /// When set, exactly this frame index carries sos=1 and profile SOS draws are off.
  std::optional<std::uint32_t> sos_at;
  double lat = 12.9716, lon = 77.5946, alt = 920.0;
};

/// Deterministic synthetic bag: activity segments drawn from the class
/// profiles, a slow GPS drift, and SOS presses per profile probability.
class FrameSimulator {
 public:
  explicit FrameSimulator(SimulatorOptions options,
                          std::vector<data::ClassProfile> profiles = data::default_profiles());

  /// The frame with the next sequence number, stamped `ts`.
  proto::SensorFrame next(std::int64_t ts);
  /// The frame with the next sequence number, stamped on the regular interval.
  proto::SensorFrame next() { return next(options_.start_ts + options_.interval_ms * index_); }
  /// Class index of the most recent frame.
  std::size_t current_class() const { return current_class_; }

 private:
  SimulatorOptions options_;
  std::vector<data::ClassProfile> profiles_;
  std::mt19937_64 rng_;
  std::uint32_t index_ = 0;
  std::size_t current_class_ = 0;
  double lat_, lon_;
};

/// Builds a frame from a canonical 13-feature vector, coercing humidity into
/// [0, 100] and water to {0, 1}.
proto::SensorFrame frame_from_features(const Eigen::VectorXd& features, std::string device_id,
                                       std::uint32_t seq, std::int64_t ts);

/// Emits one simulated frame per interval of `clock`.
class SimulatorSource : public FrameSource {
 public:
  SimulatorSource(FrameSimulator simulator, Clock& clock, std::int64_t interval_ms,
                  std::optional<std::uint64_t> limit = std::nullopt);
  std::optional<std::string> next_line(std::stop_token stop) override;

 private:
  FrameSimulator simulator_;
  Clock& clock_;
  std::int64_t interval_ms_;
  std::optional<std::uint64_t> limit_;
  std::uint64_t emitted_ = 0;
  std::optional<std::int64_t> next_due_;
};

}  // namespace smartbag::gateway
