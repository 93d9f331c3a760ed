#include "smartbag/alerts/sinks.hpp"

#include <chrono>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace smartbag::alerts {

LogFileSink::LogFileSink(const std::string& path) : out_(path, std::ios::app), path_(path) {
  if (!out_) throw std::runtime_error("cannot open notification log " + path);
}

void LogFileSink::deliver(const AlertEvent& event) {
  const auto line = to_line(event);
  std::lock_guard lock(mutex_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) spdlog::error("notification log {}: write failed", path_);
}

std::vector<AlertEvent> read_notification_log(const std::string& path) {
  std::ifstream in(path);
  std::vector<AlertEvent> out;
  std::string line;
  while (std::getline(in, line)) {
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    try {
      out.push_back(event_from_json(j));
    } catch (const std::exception&) {
    }
  }
  return out;
}

WebhookSink::WebhookSink(PostFn post, int max_retries, std::int64_t retry_delay_ms)
    : post_(std::move(post)), max_retries_(max_retries), retry_delay_ms_(retry_delay_ms) {
  if (!post_) throw std::invalid_argument("webhook: no post function");
  if (max_retries < 0) throw std::invalid_argument("webhook: retries must be >= 0");
}

WebhookSink::PostFn WebhookSink::http_post(const std::string& url, int timeout_ms) {
  // Split http://host:port/path into the origin and the request path.
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string target = path_start == std::string::npos ? "/" : url.substr(path_start);
  return [origin, target, timeout_ms](const std::string& body) {
    httplib::Client cli(origin);
    cli.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    cli.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    auto res = cli.Post(target, body, "application/json");
    return res && res->status >= 200 && res->status < 300;
  };
}

void WebhookSink::deliver(const AlertEvent& event) {
  const auto body = to_line(event);
  for (int attempt = 0; attempt <= max_retries_; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(retry_delay_ms_ * attempt));
    bool ok = false;
    try {
      ok = post_(body);
    } catch (const std::exception& e) {
      spdlog::warn("webhook: {}", e.what());
    }
    if (ok) return;
  }
  std::lock_guard lock(mutex_);
  ++failures_;
  spdlog::error("webhook: giving up on {} event for {} after {} retries", to_string(event.kind), event.device,
                max_retries_);
}

std::uint64_t WebhookSink::failures() const {
  std::lock_guard lock(mutex_);
  return failures_;
}

void MemorySink::deliver(const AlertEvent& event) {
  std::lock_guard lock(mutex_);
  events_.push_back(event);
}

std::vector<AlertEvent> MemorySink::events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

}  // namespace smartbag::alerts
