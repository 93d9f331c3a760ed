#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "smartbag/alerts/classify.hpp"
#include "smartbag/alerts/config.hpp"
#include "smartbag/alerts/rules.hpp"
#include "smartbag/alerts/sinks.hpp"
#include "smartbag/gateway/clock.hpp"
#include "smartbag/nn/model_io.hpp"
#include "smartbag/store/client.hpp"

namespace smartbag::alerts {

struct AlertStats {
  std::uint64_t processed = 0;
  std::uint64_t malformed = 0;
  std::uint64_t events = 0;
  std::uint64_t store_failures = 0;
};

/// Last processed push id per device, saved by write-then-rename.
class Cursor {
 public:
  explicit Cursor(std::string path = {});
  std::optional<std::string> get(const std::string& device) const;
  void set(const std::string& device, const std::string& push_id);

 private:
  void save() const;

  std::string path_;
  std::map<std::string, std::string> ids_;
};

/// One alert-service instance: model, rules, cursor and sinks. poll_once is
/// the unit of work; run_alertsvc wraps it in a paced loop.
class AlertService {
 public:
  AlertService(AlertServiceConfig config, nn::PackagedModel model, store::StoreClient& store,
               std::vector<EventSink*> sinks);

  /// Processes every new history entry of every device, oldest first, then
  /// checks alarm TTLs. Each entry is classified, its `activity` written back,
  /// rules evaluated, events delivered, and only then the cursor advanced.
  /// Returns the number of entries processed. Throws store::StoreUnavailable.
  std::size_t poll_once(std::int64_t now_ms);

  AlertStats stats() const { return stats_; }
  const Cursor& cursor() const { return cursor_; }
  const AlertServiceConfig& config() const { return config_; }

 private:
  void deliver(const AlertEvent& event);

  AlertServiceConfig config_;
  nn::PackagedModel model_;
  store::StoreClient& store_;
  std::vector<EventSink*> sinks_;
  Cursor cursor_;
  DedupState dedup_;
  AlertStats stats_;
};

/// Polls every interval; on store failure backs off by doubling up to backoff_max_ms.
void run_alertsvc(AlertService& service, gateway::Clock& clock, std::stop_token stop);

}  // namespace smartbag::alerts
