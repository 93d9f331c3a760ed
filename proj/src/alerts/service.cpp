#include "smartbag/alerts/service.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <spdlog/spdlog.h>

#include "smartbag/alerts/alarm.hpp"
#include "smartbag/gateway/record.hpp"

namespace smartbag::alerts {

Cursor::Cursor(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_);
  if (!in) return;
  auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    spdlog::warn("alerts: ignoring unreadable cursor file {}", path_);
    return;
  }
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.value().is_string()) ids_[it.key()] = it.value().get<std::string>();
}

std::optional<std::string> Cursor::get(const std::string& device) const {
  auto it = ids_.find(device);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void Cursor::set(const std::string& device, const std::string& push_id) {
  ids_[device] = push_id;
  save();
}

void Cursor::save() const {
  if (path_.empty()) return;
  const std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << json(ids_).dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("cannot write cursor file " + tmp);
  }
  std::filesystem::rename(tmp, path_);
}

AlertService::AlertService(AlertServiceConfig config, nn::PackagedModel model, store::StoreClient& store,
                           std::vector<EventSink*> sinks)
    : config_(std::move(config)),
      model_(std::move(model)),
      store_(store),
      sinks_(std::move(sinks)),
      cursor_(config_.cursor_path) {
  config_.validate();
  if (model_.spec().input_width() != data::kFeatureCount)
    throw std::invalid_argument("alerts: model input width is not 13");
}

void AlertService::deliver(const AlertEvent& event) {
  ++stats_.events;
  spdlog::info("alert: {} {} {} {}", to_string(event.severity), to_string(event.kind), event.device,
               event.message);
  for (auto* sink : sinks_) sink->deliver(event);
}

std::size_t AlertService::poll_once(std::int64_t now_ms) {
  std::size_t processed = 0;
  try {
    for (const auto& device : config_.devices) {
      const auto history = *store::StorePath::parse("bags/" + device + "/history");
      while (true) {
        const auto entries = store_.history(history, cursor_.get(device), config_.batch_limit);
        for (const auto& entry : entries) {
          std::optional<std::string> activity;
          std::vector<AlertEvent> events;
          try {
            auto result = classify_record(model_, entry.doc);
            activity = result.activity;
            auto entry_path = history.child(entry.id);
            store_.patch(entry_path, {{"activity", *activity}});
            events = eval_rules(entry.doc, activity, config_.rules, dedup_);
          } catch (const gateway::RecordError& e) {
            ++stats_.malformed;
            spdlog::warn("alerts: skipping malformed record {}/{}: {}", device, entry.id, e.what());
          } catch (const store::StoreError& e) {
            ++stats_.malformed;
            spdlog::warn("alerts: store rejected activity for {}/{}: {}", device, entry.id, e.what());
          }
          for (const auto& event : events) deliver(event);
          cursor_.set(device, entry.id);
          ++stats_.processed;
          ++processed;
        }
        if (entries.size() < config_.batch_limit) break;
      }
      if (auto expired = expire_alarm(store_, device, now_ms, config_.alarm_ttl_ms)) deliver(*expired);
    }
  } catch (const store::StoreUnavailable&) {
    ++stats_.store_failures;
    throw;
  }
  return processed;
}

void run_alertsvc(AlertService& service, gateway::Clock& clock, std::stop_token stop) {
  const auto interval = service.config().poll_interval_ms;
  const auto backoff_max = service.config().backoff_max_ms;
  std::int64_t wait = interval;
  std::int64_t next = clock.now_ms();
  while (clock.sleep_until(next, stop)) {
    try {
      service.poll_once(clock.now_ms());
      wait = interval;
    } catch (const store::StoreUnavailable& e) {
      wait = std::min(wait * 2, backoff_max);
      spdlog::warn("alerts: store unavailable, retrying in {} ms: {}", wait, e.what());
    }
    next = clock.now_ms() + wait;
  }
}

}  // namespace smartbag::alerts
