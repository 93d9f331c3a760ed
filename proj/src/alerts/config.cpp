#include "smartbag/alerts/config.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "smartbag/store/path.hpp"

namespace smartbag::alerts {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    auto item = trim(std::string_view(value).substr(start, comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || end != value.data() + value.size())
    throw ConfigError("config: " + key + " must be a number, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: " + key + " must be true or false, got '" + value + "'");
}

}  // namespace

void AlertServiceConfig::validate() const {
  if (poll_interval_ms <= 0) throw ConfigError("config: poll_interval_ms must be > 0");
  if (batch_limit < 1) throw ConfigError("config: batch_limit must be >= 1");
  if (devices.empty()) throw ConfigError("config: at least one device is required");
  for (const auto& d : devices)
    if (!store::StorePath::parse(d) || d.find('/') != std::string::npos)
      throw ConfigError("config: invalid device id '" + d + "'");
  if (webhook_retries < 0) throw ConfigError("config: webhook_retries must be >= 0");
  if (alarm_ttl_ms <= 0) throw ConfigError("config: alarm_ttl_ms must be > 0");
  if (backoff_max_ms < poll_interval_ms) throw ConfigError("config: backoff_max_ms must be >= poll_interval_ms");
  try {
    rules.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    auto key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return out;
}

void apply_config(AlertServiceConfig& c, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    if (key == "store_url") c.store_url = value;
    else if (key == "token") c.token = value;
    else if (key == "model") c.model_path = value;
    else if (key == "devices") c.devices = split_list(value);
    else if (key == "poll_interval_ms") c.poll_interval_ms = parse_number<std::int64_t>(key, value);
    else if (key == "batch_limit") c.batch_limit = parse_number<std::size_t>(key, value);
    else if (key == "cursor") c.cursor_path = value;
    else if (key == "notify_log") c.notify_log = value;
    else if (key == "webhook") c.webhook_url = value;
    else if (key == "webhook_retries") c.webhook_retries = parse_number<int>(key, value);
    else if (key == "alarm_ttl_ms") c.alarm_ttl_ms = parse_number<std::int64_t>(key, value);
    else if (key == "backoff_max_ms") c.backoff_max_ms = parse_number<std::int64_t>(key, value);
    else if (key == "mq2_max") c.rules.mq2_max = parse_number<double>(key, value);
    else if (key == "mq135_max") c.rules.mq135_max = parse_number<double>(key, value);
    else if (key == "water_alert") c.rules.water_alert = parse_bool(key, value);
    else if (key == "sos_alert") c.rules.sos_alert = parse_bool(key, value);
    else if (key == "alert_classes") {
      auto names = split_list(value);
      c.rules.alert_classes = {names.begin(), names.end()};
    } else if (key == "dedup_window_ms") c.rules.dedup_window_ms = parse_number<std::int64_t>(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  c.validate();
}

AlertServiceConfig load_alert_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  AlertServiceConfig config;
  apply_config(config, parse_key_values(in));
  return config;
}

}  // namespace smartbag::alerts
