#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "smartbag/alerts/rules.hpp"

namespace smartbag::alerts {

struct AlertServiceConfig {
  std::string store_url = "http://127.0.0.1:8080";
  std::string token;
  std::string model_path = "model.bagm";
  std::vector<std::string> devices{"BAG1"};
  std::int64_t poll_interval_ms = 1000;
  std::size_t batch_limit = 100;
  /// Empty keeps the cursor in memory only.
  std::string cursor_path = "alerts.cursor";
  std::string notify_log = "notifications.log";
  std::string webhook_url;
  int webhook_retries = 3;
  std::int64_t alarm_ttl_ms = 60000;
  std::int64_t backoff_max_ms = 30000;
  AlertRuleSet rules;

  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `key = value` lines; `#` starts a comment. Keys:
///   store_url token model devices poll_interval_ms batch_limit cursor
///   notify_log webhook webhook_retries alarm_ttl_ms backoff_max_ms
///   mq2_max mq135_max water_alert sos_alert alert_classes dedup_window_ms
/// Lists are comma separated. Unknown keys and an invalid result are errors.
std::map<std::string, std::string> parse_key_values(std::istream& in);
void apply_config(AlertServiceConfig& config, const std::map<std::string, std::string>& values);
AlertServiceConfig load_alert_config(const std::string& path);

}  // namespace smartbag::alerts
