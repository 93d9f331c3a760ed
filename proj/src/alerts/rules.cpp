#include "smartbag/alerts/rules.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

#include "smartbag/gateway/record.hpp"
#include "smartbag/proto/frame.hpp"

namespace smartbag::alerts {
namespace {

constexpr std::array<std::string_view, 5> kKindNames{"SOS", "GAS", "WATER", "ACTIVITY", "ALARM_TRIGGERED"};
constexpr std::array<std::string_view, 3> kSeverityNames{"INFO", "WARN", "EMERGENCY"};

}  // namespace

std::string_view to_string(AlertKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }
std::string_view to_string(Severity severity) { return kSeverityNames[static_cast<std::size_t>(severity)]; }

std::optional<AlertKind> parse_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == text) return static_cast<AlertKind>(i);
  return std::nullopt;
}

std::optional<Severity> parse_severity(std::string_view text) {
  for (std::size_t i = 0; i < kSeverityNames.size(); ++i)
    if (kSeverityNames[i] == text) return static_cast<Severity>(i);
  return std::nullopt;
}

json to_json(const AlertEvent& e) {
  return {{"ts", e.ts},
          {"device", e.device},
          {"kind", to_string(e.kind)},
          {"severity", to_string(e.severity)},
          {"activity", e.activity ? json(*e.activity) : json(nullptr)},
          {"message", e.message}};
}

std::string to_line(const AlertEvent& e) {
  nlohmann::ordered_json out;
  out["ts"] = e.ts;
  out["device"] = e.device;
  out["kind"] = to_string(e.kind);
  out["severity"] = to_string(e.severity);
  out["activity"] = e.activity ? nlohmann::ordered_json(*e.activity) : nlohmann::ordered_json(nullptr);
  out["message"] = e.message;
  return out.dump();
}

AlertEvent event_from_json(const json& j) {
  auto kind = parse_kind(j.at("kind").get<std::string>());
  auto severity = parse_severity(j.at("severity").get<std::string>());
  if (!kind || !severity) throw std::invalid_argument("alert event: unknown kind or severity");
  AlertEvent e{*kind, *severity, j.at("device").get<std::string>(), j.at("ts").get<std::int64_t>(),
               j.at("message").get<std::string>(), std::nullopt};
  if (!j.at("activity").is_null()) e.activity = j.at("activity").get<std::string>();
  return e;
}

void AlertRuleSet::validate() const {
  if (!(mq2_max > 0) || !(mq135_max > 0)) throw std::invalid_argument("alert rules: gas thresholds must be > 0");
  if (dedup_window_ms < 0) throw std::invalid_argument("alert rules: dedup window must be >= 0");
}

bool DedupState::admit(const std::string& device, AlertKind kind, std::int64_t ts, std::int64_t window_ms) {
  auto key = std::make_pair(device, kind);
  auto it = last_.find(key);
  if (it != last_.end() && ts - it->second < window_ms) return false;
  last_[key] = ts;
  return true;
}

std::vector<AlertEvent> eval_rules(const json& record, const std::optional<std::string>& activity,
                                   const AlertRuleSet& rules, DedupState& dedup) {
  const auto frame = gateway::from_record(record);
  std::vector<AlertEvent> events;
  auto emit = [&](AlertKind kind, Severity severity, std::string message) {
    if (dedup.admit(frame.device_id, kind, frame.ts, rules.dedup_window_ms))
      events.push_back({kind, severity, frame.device_id, frame.ts, std::move(message), activity});
  };

  if (rules.sos_alert && frame.sos == 1)
    emit(AlertKind::Sos, Severity::Emergency, "SOS button pressed");

  if (frame.mq2 > rules.mq2_max || frame.mq135 > rules.mq135_max) {
    std::ostringstream msg;
    msg << "gas level high: mq2 " << proto::format_real(frame.mq2) << " (max "
        << proto::format_real(rules.mq2_max) << "), mq135 " << proto::format_real(frame.mq135) << " (max "
        << proto::format_real(rules.mq135_max) << ")";
    emit(AlertKind::Gas, Severity::Warn, msg.str());
  }

  if (rules.water_alert && frame.water == 1) emit(AlertKind::Water, Severity::Warn, "water detected in bag");

  if (activity && rules.alert_classes.count(*activity))
    emit(AlertKind::Activity, Severity::Emergency, "activity " + *activity + " detected");

  return events;
}

}  // namespace smartbag::alerts
