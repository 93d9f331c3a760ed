#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "smartbag/alerts/rules.hpp"
#include "smartbag/store/client.hpp"

namespace smartbag::alerts {

struct AlarmCommand {
  enum class State { Requested, Delivered };
  std::string device_id;
  std::int64_t issued_ts = 0;
  State state = State::Requested;
};

/// Writes {"alarm":1,"issuedTs":now,"state":"REQUESTED"} to bags/<device>/commands.
/// If a command is already outstanding it is returned unchanged. Store errors propagate.
AlarmCommand trigger_alarm(store::StoreClient& store, const std::string& device_id, std::int64_t now_ms);

/// Current command state, if any command was ever issued.
std::optional<AlarmCommand> read_alarm(store::StoreClient& store, const std::string& device_id);

/// Clears an outstanding command older than `ttl_ms` (marking it timedOut) and
/// returns the WARN event for it.
std::optional<AlertEvent> expire_alarm(store::StoreClient& store, const std::string& device_id,
                                       std::int64_t now_ms, std::int64_t ttl_ms);

/// The event the gateway emits when it acknowledges a command.
AlertEvent alarm_triggered_event(const std::string& device_id, std::int64_t issued_ts, std::int64_t acked_ts);

}  // namespace smartbag::alerts
