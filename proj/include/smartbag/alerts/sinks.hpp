#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "smartbag/alerts/rules.hpp"

namespace smartbag::alerts {

/// Receives events, possibly from several threads at once.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void deliver(const AlertEvent& event) = 0;
};

/// Appends one JSON object per line and flushes each line.
class LogFileSink : public EventSink {
 public:
  explicit LogFileSink(const std::string& path);
  void deliver(const AlertEvent& event) override;

 private:
  std::mutex mutex_;
  std::ofstream out_;
  std::string path_;
};

/// Every event read back from a notification log, skipping unparsable lines.
std::vector<AlertEvent> read_notification_log(const std::string& path);

/// Posts each event as JSON. A failed post is retried up to `max_retries`
/// times; a final failure is logged and dropped.
class WebhookSink : public EventSink {
 public:
  /// Returns true on a 2xx delivery.
  using PostFn = std::function<bool(const std::string& body)>;

  WebhookSink(PostFn post, int max_retries = 3, std::int64_t retry_delay_ms = 200);
  /// Posts to an http URL such as http://127.0.0.1:9000/hook.
  static PostFn http_post(const std::string& url, int timeout_ms = 2000);

  void deliver(const AlertEvent& event) override;
  std::uint64_t failures() const;

 private:
  mutable std::mutex mutex_;
  PostFn post_;
  int max_retries_;
  std::int64_t retry_delay_ms_;
  std::uint64_t failures_ = 0;
};

/// Keeps events in memory.
class MemorySink : public EventSink {
 public:
  void deliver(const AlertEvent& event) override;
  std::vector<AlertEvent> events() const;

 private:
  mutable std::mutex mutex_;
  std::vector<AlertEvent> events_;
};

}  // namespace smartbag::alerts
