#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace smartbag::alerts {

using json = nlohmann::json;

// Declaration order is emission order.
enum class AlertKind { Sos, Gas, Water, Activity, AlarmTriggered };
enum class Severity { Info, Warn, Emergency };

std::string_view to_string(AlertKind kind);
std::string_view to_string(Severity severity);
std::optional<AlertKind> parse_kind(std::string_view text);
std::optional<Severity> parse_severity(std::string_view text);

struct AlertEvent {
  AlertKind kind;
  Severity severity;
  std::string device;
  /// Source record ts (or the command time for alarm events).
  std::int64_t ts = 0;
  std::string message;
  std::optional<std::string> activity;

  bool operator==(const AlertEvent&) const = default;
};

/// {"ts","device","kind","severity","activity","message"}; activity is null when absent.
json to_json(const AlertEvent& event);
/// The same object as compact text with keys in the order above.
std::string to_line(const AlertEvent& event);
AlertEvent event_from_json(const json& j);

struct AlertRuleSet {
  double mq2_max = 300.0;
  double mq135_max = 200.0;
  bool water_alert = true;
  bool sos_alert = true;
  std::set<std::string> alert_classes{"Falling"};
  std::int64_t dedup_window_ms = 30000;

  /// Throws std::invalid_argument unless thresholds > 0 and window >= 0.
  void validate() const;
};

/// Last emitted ts per (device, kind). An event is suppressed while its ts is
/// less than one window past the last emitted one.
class DedupState {
 public:
  bool admit(const std::string& device, AlertKind kind, std::int64_t ts, std::int64_t window_ms);

 private:
  std::map<std::pair<std::string, AlertKind>, std::int64_t> last_;
};

/// SOS, GAS, WATER, ACTIVITY in that order. Gas thresholds are strict.
/// Throws gateway::RecordError when the record lacks a field a rule reads.
std::vector<AlertEvent> eval_rules(const json& record, const std::optional<std::string>& activity,
                                   const AlertRuleSet& rules, DedupState& dedup);

}  // namespace smartbag::alerts
