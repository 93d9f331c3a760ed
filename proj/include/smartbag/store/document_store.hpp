#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "smartbag/store/path.hpp"

namespace smartbag::store {

using json = nlohmann::json;

class StoreError : public std::runtime_error {
 public:
  enum class Kind { BadRequest, NotFound, Io };
  StoreError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Sortable push id: 13-digit server millis, '-', 6-digit per-millis counter.
struct PushId {
  std::int64_t millis = 0;
  std::uint32_t counter = 0;

  std::string str() const;
  static std::optional<PushId> parse(std::string_view text);
  auto operator<=>(const PushId&) const = default;
};

struct HistoryEntry {
  std::string id;
  std::int64_t recv_ts = 0;
  json doc;

  bool operator==(const HistoryEntry&) const = default;
};

/// The whole logical store. Values, so a copy is a snapshot.
struct StoreState {
  std::map<std::string, json> documents;
  std::map<std::string, std::vector<HistoryEntry>> histories;

  bool operator==(const StoreState&) const = default;
};

/// Recursive merge: objects merge key by key, anything else replaces; null deletes.
void merge_into(json& target, const json& patch);

/// A patch addressed at `<list>/<pushId>` merges into that history entry.
json apply_patch(StoreState& state, const StorePath& path, const json& doc);
void apply_append(StoreState& state, const StorePath& path, HistoryEntry entry);

// Log records: u32 LE payload length | payload | u32 LE CRC-32 of payload.
// Payload: u8 op | u16 LE path length | path | op-specific tail | JSON text.
// Patch ('P') has no tail; append ('A') has u16 LE id length | id | i64 LE recv_ts.
struct LogRecord {
  enum class Op : std::uint8_t { Patch = 'P', Append = 'A' };
  Op op;
  std::string path;
  std::string id;
  std::int64_t recv_ts = 0;
  json doc;
};

std::vector<std::uint8_t> encode_record(const LogRecord& record);

struct ReplayResult {
  StoreState state;
  std::size_t records = 0;
  /// Byte length of the applied prefix.
  std::size_t valid_bytes = 0;
  bool truncated_tail = false;
  bool corrupt = false;
  std::optional<PushId> last_id;
};

/// Applies every complete record in order. A trailing partial record is dropped;
/// a record with a bad CRC stops replay at that point.
ReplayResult replay_log(std::istream& log);

struct StoreOptions {
  /// Empty for a purely in-memory store.
  std::string log_path;
  /// fdatasync after every record before acknowledging.
  bool sync = true;
  std::function<std::int64_t()> clock;
};

/// Path-addressed JSON documents plus append-only history lists, backed by a
/// write-ahead log replayed on construction. Writers serialize; readers share.
class DocumentStore {
 public:
  explicit DocumentStore(StoreOptions options = {});
  ~DocumentStore();
  DocumentStore(const DocumentStore&) = delete;
  DocumentStore& operator=(const DocumentStore&) = delete;

  /// Merges `doc` (must be an object) into the document at `path`; returns the result.
  json patch(const StorePath& path, const json& doc);
  std::string append_history(const StorePath& path, const json& doc);

  /// Oldest first, strictly after `since`, at most `limit`. Unknown path gives an empty list.
  std::vector<HistoryEntry> get_history(const StorePath& path, const std::optional<std::string>& since,
                                        std::size_t limit) const;
  std::optional<json> get(const StorePath& path) const;
  bool has_history(const StorePath& path) const;

  StoreState snapshot() const;
  const ReplayResult& recovery() const { return recovery_; }

 private:
  void log(const LogRecord& record);
  PushId next_id();

  StoreOptions options_;
  mutable std::shared_mutex mutex_;
  StoreState state_;
  ReplayResult recovery_;
  std::optional<PushId> last_id_;
  int fd_ = -1;
};

}  // namespace smartbag::store
