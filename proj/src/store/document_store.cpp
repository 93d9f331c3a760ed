#include "smartbag/store/document_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <mutex>

#include <spdlog/spdlog.h>

namespace smartbag::store {
namespace {

std::int64_t system_millis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// The history entry a path addresses, if it is `<list>/<pushId>`.
const HistoryEntry* find_entry(const StoreState& state, const StorePath& path) {
  auto parent = path.parent();
  if (!parent) return nullptr;
  auto list = state.histories.find(parent->str());
  if (list == state.histories.end()) return nullptr;
  auto it = std::lower_bound(list->second.begin(), list->second.end(), path.leaf(),
                             [](const HistoryEntry& e, const std::string& id) { return e.id < id; });
  if (it == list->second.end() || it->id != path.leaf()) return nullptr;
  return &*it;
}

}  // namespace

void merge_into(json& target, const json& patch) {
  if (!patch.is_object()) {
    target = patch;
    return;
  }
  if (!target.is_object()) target = json::object();
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it.value().is_null())
      target.erase(it.key());
    else
      merge_into(target[it.key()], it.value());
  }
}

json apply_patch(StoreState& state, const StorePath& path, const json& doc) {
  if (!doc.is_object()) throw StoreError(StoreError::Kind::BadRequest, "patch body must be a JSON object");
  if (auto* entry = find_entry(state, path)) {
    auto& mutable_entry = const_cast<HistoryEntry&>(*entry);
    merge_into(mutable_entry.doc, doc);
    return mutable_entry.doc;
  }
  auto& target = state.documents[path.str()];
  merge_into(target, doc);
  return target;
}

void apply_append(StoreState& state, const StorePath& path, HistoryEntry entry) {
  if (!entry.doc.is_object()) throw StoreError(StoreError::Kind::BadRequest, "history body must be a JSON object");
  auto& list = state.histories[path.str()];
  if (!list.empty() && !(list.back().id < entry.id))
    throw StoreError(StoreError::Kind::BadRequest, "history ids must increase");
  list.push_back(std::move(entry));
}

DocumentStore::DocumentStore(StoreOptions options) : options_(std::move(options)) {
  if (!options_.clock) options_.clock = system_millis;
  if (options_.log_path.empty()) return;

  {
    std::ifstream in(options_.log_path, std::ios::binary);
    if (in) recovery_ = replay_log(in);
  }
  state_ = std::move(recovery_.state);
  recovery_.state = {};
  last_id_ = recovery_.last_id;

  if (recovery_.corrupt || recovery_.truncated_tail) {
    if (recovery_.corrupt) {
      std::ifstream in(options_.log_path, std::ios::binary);
      in.seekg(static_cast<std::streamoff>(recovery_.valid_bytes));
      std::ofstream keep(options_.log_path + ".corrupt", std::ios::binary | std::ios::trunc);
      keep << in.rdbuf();
    }
    if (::truncate(options_.log_path.c_str(), static_cast<off_t>(recovery_.valid_bytes)) != 0)
      throw StoreError(StoreError::Kind::Io, "cannot truncate log: " + std::string(std::strerror(errno)));
  }
  if (recovery_.records > 0)
    spdlog::info("store: replayed {} records from {}", recovery_.records, options_.log_path);

  fd_ = ::open(options_.log_path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0)
    throw StoreError(StoreError::Kind::Io,
                     "cannot open log " + options_.log_path + ": " + std::strerror(errno));
}

DocumentStore::~DocumentStore() {
  if (fd_ >= 0) ::close(fd_);
}

void DocumentStore::log(const LogRecord& record) {
  if (fd_ < 0) return;
  const auto bytes = encode_record(record);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto n = ::write(fd_, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StoreError(StoreError::Kind::Io, std::string("log write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
  if (options_.sync && ::fdatasync(fd_) != 0)
    throw StoreError(StoreError::Kind::Io, std::string("log sync failed: ") + std::strerror(errno));
}

PushId DocumentStore::next_id() {
  const std::int64_t now = options_.clock();
  PushId id{now, 0};
  // Clock regressions fall back to the counter.
  if (last_id_ && now <= last_id_->millis) id = {last_id_->millis, last_id_->counter + 1};
  if (id.counter > 999999) id = {id.millis + 1, 0};
  last_id_ = id;
  return id;
}

json DocumentStore::patch(const StorePath& path, const json& doc) {
  if (!doc.is_object()) throw StoreError(StoreError::Kind::BadRequest, "patch body must be a JSON object");
  std::unique_lock lock(mutex_);
  log({LogRecord::Op::Patch, path.str(), {}, 0, doc});
  return apply_patch(state_, path, doc);
}

std::string DocumentStore::append_history(const StorePath& path, const json& doc) {
  if (!doc.is_object()) throw StoreError(StoreError::Kind::BadRequest, "history body must be a JSON object");
  std::unique_lock lock(mutex_);
  const std::string id = next_id().str();
  const std::int64_t recv = options_.clock();
  log({LogRecord::Op::Append, path.str(), id, recv, doc});
  apply_append(state_, path, {id, recv, doc});
  return id;
}

std::vector<HistoryEntry> DocumentStore::get_history(const StorePath& path,
                                                     const std::optional<std::string>& since,
                                                     std::size_t limit) const {
  std::shared_lock lock(mutex_);
  auto it = state_.histories.find(path.str());
  if (it == state_.histories.end()) return {};
  const auto& list = it->second;
  auto first = list.begin();
  if (since)
    first = std::upper_bound(list.begin(), list.end(), *since,
                             [](const std::string& id, const HistoryEntry& e) { return id < e.id; });
  const auto available = static_cast<std::size_t>(list.end() - first);
  return {first, first + static_cast<std::ptrdiff_t>(std::min(limit, available))};
}

std::optional<json> DocumentStore::get(const StorePath& path) const {
  std::shared_lock lock(mutex_);
  if (auto* entry = find_entry(state_, path)) return entry->doc;
  auto it = state_.documents.find(path.str());
  if (it == state_.documents.end()) return std::nullopt;
  return it->second;
}

bool DocumentStore::has_history(const StorePath& path) const {
  std::shared_lock lock(mutex_);
  return state_.histories.count(path.str()) > 0;
}

StoreState DocumentStore::snapshot() const {
  std::shared_lock lock(mutex_);
  return state_;
}

}  // namespace smartbag::store
