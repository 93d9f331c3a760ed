#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <stop_token>

namespace smartbag::gateway {

/// Millisecond time source for the service loops. Tests inject a manual or
/// scaled clock so pacing is deterministic or fast.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
  /// Blocks until now_ms() >= deadline. Returns false if `stop` fired first.
  virtual bool sleep_until(std::int64_t deadline_ms, std::stop_token stop) = 0;
};

/// Wall time (unix epoch millis).
class SystemClock : public Clock {
 public:
  std::int64_t now_ms() override;
  bool sleep_until(std::int64_t deadline_ms, std::stop_token stop) override;
};

/// Starts at the current wall time and runs `speed` times faster.
class ScaledClock : public Clock {
 public:
  explicit ScaledClock(double speed);
  std::int64_t now_ms() override;
  bool sleep_until(std::int64_t deadline_ms, std::stop_token stop) override;
  double speed() const { return speed_; }

 private:
  double speed_;
  std::int64_t origin_ms_;
  std::chrono::steady_clock::time_point origin_;
};

/// Moves only when told to. Sleepers wake once advanced past their deadline.
class ManualClock : public Clock {
 public:
  explicit ManualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
  std::int64_t now_ms() override;
  bool sleep_until(std::int64_t deadline_ms, std::stop_token stop) override;
  void set(std::int64_t t_ms);
  void advance(std::int64_t delta_ms);

 private:
  std::mutex mutex_;
  std::condition_variable_any changed_;
  std::int64_t now_;
};

}  // namespace smartbag::gateway
