#include "smartbag/gateway/gateway.hpp"

#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

namespace smartbag::gateway {

void GatewayConfig::validate() const {
  if (period_ms <= 0) throw std::invalid_argument("gateway: period must be > 0");
  if (capacity < 1) throw std::invalid_argument("gateway: buffer capacity must be >= 1");
  if (!device_id.empty() && !store::StorePath::parse(device_id))
    throw std::invalid_argument("gateway: device id is not a valid path segment");
}

RecordBuffer::RecordBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("record buffer: capacity must be >= 1");
}

bool RecordBuffer::push(json record) {
  std::lock_guard lock(mutex_);
  Item item{next_serial_++, std::move(record)};
  newest_ = item;
  bool dropped = false;
  if (items_.size() == capacity_) {
    items_.pop_front();
    ++dropped_;
    dropped = true;
  }
  items_.push_back(std::move(item));
  return dropped;
}

std::optional<RecordBuffer::Item> RecordBuffer::front() const {
  std::lock_guard lock(mutex_);
  if (items_.empty()) return std::nullopt;
  return items_.front();
}

void RecordBuffer::pop(std::uint64_t serial) {
  std::lock_guard lock(mutex_);
  if (!items_.empty() && items_.front().serial == serial) items_.pop_front();
}

std::optional<RecordBuffer::Item> RecordBuffer::newest_unpublished() const {
  std::lock_guard lock(mutex_);
  if (!newest_ || newest_->serial <= published_) return std::nullopt;
  return newest_;
}

void RecordBuffer::mark_published(std::uint64_t serial) {
  std::lock_guard lock(mutex_);
  published_ = std::max(published_, serial);
}

std::size_t RecordBuffer::size() const {
  std::lock_guard lock(mutex_);
  return items_.size();
}

std::uint64_t RecordBuffer::dropped() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

GatewayCore::GatewayCore(GatewayConfig config, store::StoreClient& store,
                         std::function<void(const AlarmNotice&)> on_alarm)
    : config_(std::move(config)),
      store_(store),
      on_alarm_(std::move(on_alarm)),
      buffer_((config_.validate(), config_.capacity)),
      device_(config_.device_id) {}

std::string GatewayCore::device_id() const {
  std::lock_guard lock(device_mutex_);
  return device_;
}

std::optional<store::StorePath> GatewayCore::device_path(std::string_view leaf) const {
  const auto device = device_id();
  if (device.empty()) return std::nullopt;
  return store::StorePath::parse("bags/" + device + "/" + std::string(leaf));
}

bool GatewayCore::ingest(std::string_view line, std::int64_t now_ms) {
  auto parsed = proto::parse_frame(line);
  if (auto* err = std::get_if<proto::FrameError>(&parsed)) {
    ++malformed_;
    spdlog::debug("gateway: skipped frame ({}{}{})", proto::to_string(err->kind),
                  err->field.empty() ? "" : " ", err->field);
    return false;
  }
  const auto& frame = std::get<proto::SensorFrame>(parsed);
  {
    std::lock_guard lock(device_mutex_);
    if (device_.empty()) device_ = frame.device_id;
    if (frame.device_id != device_) {
      ++malformed_;
      spdlog::warn("gateway: skipped frame from foreign device {}", frame.device_id);
      return false;
    }
  }
  ++received_;
  if (buffer_.push(to_record(frame, now_ms)))
    spdlog::warn("gateway: buffer full, dropped oldest record ({} dropped so far)", buffer_.dropped());
  return true;
}

void GatewayCore::tick(std::int64_t now_ms) {
  const auto latest = device_path("latest");
  const auto history = device_path("history");
  if (!latest || !history) return;

  try {
    if (auto newest = buffer_.newest_unpublished()) {
      store_.patch(*latest, newest->record);
      buffer_.mark_published(newest->serial);
      std::lock_guard lock(stats_mutex_);
      ++latest_pushes_;
    }
    while (auto item = buffer_.front()) {
      store_.post(*history, item->record);
      buffer_.pop(item->serial);
      std::lock_guard lock(stats_mutex_);
      ++history_pushes_;
    }
  } catch (const store::StoreUnavailable& e) {
    std::lock_guard lock(stats_mutex_);
    ++failures_;
    spdlog::warn("gateway: store unavailable, {} records buffered: {}", buffer_.size(), e.what());
    return;
  } catch (const store::StoreError& e) {
    // The store rejected the record itself; retrying cannot help.
    if (auto item = buffer_.front()) buffer_.pop(item->serial);
    std::lock_guard lock(stats_mutex_);
    ++failures_;
    spdlog::error("gateway: store rejected record: {}", e.what());
    return;
  }
  if (config_.poll_commands) poll_commands(now_ms);
}

void GatewayCore::poll_commands(std::int64_t now_ms) {
  const auto path = device_path("commands");
  try {
    auto doc = store_.get(*path);
    if (!doc || !doc->is_object()) return;
    auto alarm = doc->find("alarm");
    if (alarm == doc->end() || !alarm->is_number_integer() || alarm->get<std::int64_t>() != 1) return;

    AlarmNotice notice{device_id(), doc->value("issuedTs", std::int64_t{0}), now_ms};
    store_.patch(*path, {{"alarm", 0}, {"state", "DELIVERED"}, {"ackTs", now_ms}});
    {
      std::lock_guard lock(stats_mutex_);
      ++alarms_;
    }
    spdlog::info("gateway: ALARM_TRIGGERED on {} (issued {})", notice.device_id, notice.issued_ts);
    if (on_alarm_) on_alarm_(notice);
  } catch (const std::exception& e) {
    spdlog::warn("gateway: command poll failed: {}", e.what());
  }
}

GatewayStats GatewayCore::stats() const {
  GatewayStats s;
  s.received = received_;
  s.malformed = malformed_;
  s.dropped = buffer_.dropped();
  s.buffered = buffer_.size();
  std::lock_guard lock(stats_mutex_);
  s.latest_pushes = latest_pushes_;
  s.history_pushes = history_pushes_;
  s.store_failures = failures_;
  s.alarms = alarms_;
  return s;
}

void run_gateway(GatewayCore& core, FrameSource& source, Clock& clock, std::stop_token stop,
                 RunOptions options) {
  std::stop_source intake_stop;
  std::stop_callback forward(stop, [&] { intake_stop.request_stop(); });
  std::atomic<bool> exhausted{false};

  std::jthread intake([&](std::stop_token) {
    while (auto line = source.next_line(intake_stop.get_token())) core.ingest(*line, clock.now_ms());
    exhausted = true;
  });

  std::int64_t next = clock.now_ms() + core.period_ms();
  while (clock.sleep_until(next, stop)) {
    core.tick(next);
    if (options.on_tick) options.on_tick(next);
    next += core.period_ms();
    if (options.exit_when_drained && exhausted && core.buffer().size() == 0 &&
        !core.buffer().newest_unpublished())
      break;
  }

  intake_stop.request_stop();
  intake.join();
  // Best-effort flush of whatever is still buffered.
  core.tick(clock.now_ms());
  const auto s = core.stats();
  spdlog::info("gateway: stopped; received {}, malformed {}, dropped {}, buffered {}", s.received,
               s.malformed, s.dropped, s.buffered);
}

}  // namespace smartbag::gateway
