#include "smartbag/alerts/alarm.hpp"

#include <stdexcept>

namespace smartbag::alerts {
namespace {

store::StorePath commands_path(const std::string& device_id) {
  auto path = store::StorePath::parse("bags/" + device_id + "/commands");
  if (!path) throw std::invalid_argument("invalid device id: " + device_id);
  return *path;
}

bool outstanding(const json& doc) {
  auto it = doc.find("alarm");
  return it != doc.end() && it->is_number_integer() && it->get<std::int64_t>() == 1;
}

}  // namespace

std::optional<AlarmCommand> read_alarm(store::StoreClient& store, const std::string& device_id) {
  auto doc = store.get(commands_path(device_id));
  if (!doc || !doc->is_object() || !doc->contains("issuedTs")) return std::nullopt;
  return AlarmCommand{device_id, doc->value("issuedTs", std::int64_t{0}),
                      outstanding(*doc) ? AlarmCommand::State::Requested : AlarmCommand::State::Delivered};
}

AlarmCommand trigger_alarm(store::StoreClient& store, const std::string& device_id, std::int64_t now_ms) {
  const auto path = commands_path(device_id);
  if (auto doc = store.get(path); doc && doc->is_object() && outstanding(*doc))
    return {device_id, doc->value("issuedTs", std::int64_t{0}), AlarmCommand::State::Requested};
  store.patch(path, {{"alarm", 1},
                     {"issuedTs", now_ms},
                     {"state", "REQUESTED"},
                     {"ackTs", nullptr},
                     {"timedOut", nullptr}});
  return {device_id, now_ms, AlarmCommand::State::Requested};
}

std::optional<AlertEvent> expire_alarm(store::StoreClient& store, const std::string& device_id,
                                       std::int64_t now_ms, std::int64_t ttl_ms) {
  const auto path = commands_path(device_id);
  auto doc = store.get(path);
  if (!doc || !doc->is_object() || !outstanding(*doc)) return std::nullopt;
  const auto issued = doc->value("issuedTs", std::int64_t{0});
  if (now_ms - issued < ttl_ms) return std::nullopt;
  store.patch(path, {{"alarm", 0}, {"timedOut", true}});
  return AlertEvent{AlertKind::AlarmTriggered, Severity::Warn, device_id, issued,
                    "alarm not acknowledged within " + std::to_string(ttl_ms) + " ms", std::nullopt};
}

AlertEvent alarm_triggered_event(const std::string& device_id, std::int64_t issued_ts, std::int64_t acked_ts) {
  return {AlertKind::AlarmTriggered, Severity::Info, device_id, acked_ts,
          "alarm sounding (issued " + std::to_string(issued_ts) + ")", std::nullopt};
}

}  // namespace smartbag::alerts
