#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>

#include "smartbag/gateway/clock.hpp"
#include "smartbag/gateway/record.hpp"
#include "smartbag/gateway/source.hpp"
#include "smartbag/store/client.hpp"

namespace smartbag::gateway {

struct GatewayConfig {
  /// Empty adopts the device id of the first valid frame.
  std::string device_id;
  std::int64_t period_ms = 2000;
  std::size_t capacity = 1024;
  /// Poll bags/<device>/commands after each push.
  bool poll_commands = true;

  void validate() const;
};

/// Bounded FIFO that drops its oldest record when full. The only state shared
/// between frame intake and the push loop.
class RecordBuffer {
 public:
  struct Item {
    std::uint64_t serial;
    json record;
  };

  explicit RecordBuffer(std::size_t capacity);

  /// Returns true if the oldest record had to be dropped.
  bool push(json record);
  std::optional<Item> front() const;
  /// Removes the front only if it is still the item with `serial`.
  void pop(std::uint64_t serial);
  /// The newest record not yet confirmed in latest, if any.
  std::optional<Item> newest_unpublished() const;
  void mark_published(std::uint64_t serial);

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  std::uint64_t dropped() const;

 private:
  mutable std::mutex mutex_;
  std::size_t capacity_;
  std::deque<Item> items_;
  std::optional<Item> newest_;
  std::uint64_t published_ = 0;
  std::uint64_t next_serial_ = 1;
  std::uint64_t dropped_ = 0;
};

struct GatewayStats {
  std::uint64_t received = 0;
  std::uint64_t malformed = 0;
  std::uint64_t dropped = 0;
  std::uint64_t latest_pushes = 0;
  std::uint64_t history_pushes = 0;
  std::uint64_t store_failures = 0;
  std::uint64_t alarms = 0;
  std::size_t buffered = 0;
};

/// An alarm command the gateway picked up and acknowledged.
struct AlarmNotice {
  std::string device_id;
  std::int64_t issued_ts = 0;
  std::int64_t acked_ts = 0;
};

/// Frame intake plus the periodic push, without threads or sleeping, so a
/// caller can drive it from any clock.
class GatewayCore {
 public:
  GatewayCore(GatewayConfig config, store::StoreClient& store,
              std::function<void(const AlarmNotice&)> on_alarm = {});

  /// Parses one protocol line and buffers it. Safe to call concurrently with tick().
  bool ingest(std::string_view line, std::int64_t now_ms);
  /// One push period: PATCH latest if a newer record exists, drain history in
  /// order until the first failure, then poll the command path.
  void tick(std::int64_t now_ms);

  GatewayStats stats() const;
  const RecordBuffer& buffer() const { return buffer_; }
  std::string device_id() const;
  std::int64_t period_ms() const { return config_.period_ms; }

 private:
  void poll_commands(std::int64_t now_ms);
  std::optional<store::StorePath> device_path(std::string_view leaf) const;

  GatewayConfig config_;
  store::StoreClient& store_;
  std::function<void(const AlarmNotice&)> on_alarm_;
  RecordBuffer buffer_;
  mutable std::mutex device_mutex_;
  std::string device_;
  std::atomic<std::uint64_t> received_{0}, malformed_{0};
  std::uint64_t latest_pushes_ = 0, history_pushes_ = 0, failures_ = 0, alarms_ = 0;
  mutable std::mutex stats_mutex_;
};

struct RunOptions {
  /// Return once the source is exhausted and everything buffered was delivered.
  bool exit_when_drained = false;
  /// Called after every tick with the tick time.
  std::function<void(std::int64_t)> on_tick;
};

/// Runs intake and the push loop on `clock` until `stop` (or drain, if asked).
/// Ticks fall at start + k * period. On stop, one last best-effort flush.
void run_gateway(GatewayCore& core, FrameSource& source, Clock& clock, std::stop_token stop,
                 RunOptions options = {});

}  // namespace smartbag::gateway
