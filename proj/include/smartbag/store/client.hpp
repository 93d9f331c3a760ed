#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smartbag/store/document_store.hpp"

namespace smartbag::store {

/// Transport failure or server-side error; the caller may retry.
class StoreUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// What the gateway and alert service need from the store. Implementations
/// throw StoreUnavailable when the store cannot be reached and StoreError
/// when it rejects a request.
class StoreClient {
 public:
  virtual ~StoreClient() = default;

  virtual std::optional<json> get(const StorePath& path) = 0;
  virtual json patch(const StorePath& path, const json& doc) = 0;
  /// Returns the assigned push id.
  virtual std::string post(const StorePath& path, const json& doc) = 0;
  virtual std::vector<HistoryEntry> history(const StorePath& path,
                                            const std::optional<std::string>& since,
                                            std::size_t limit) = 0;
};

/// Speaks the REST dialect of StoreServer. `base_url` like http://127.0.0.1:8080.
class HttpStoreClient : public StoreClient {
 public:
  explicit HttpStoreClient(std::string base_url, std::string token = {}, int timeout_ms = 2000);

  std::optional<json> get(const StorePath& path) override;
  json patch(const StorePath& path, const json& doc) override;
  std::string post(const StorePath& path, const json& doc) override;
  std::vector<HistoryEntry> history(const StorePath& path, const std::optional<std::string>& since,
                                    std::size_t limit) override;

 private:
  std::string base_url_;
  std::string token_;
  int timeout_ms_;
};

/// In-process client over a DocumentStore.
class LocalStoreClient : public StoreClient {
 public:
  explicit LocalStoreClient(DocumentStore& store) : store_(store) {}

  std::optional<json> get(const StorePath& path) override { return store_.get(path); }
  json patch(const StorePath& path, const json& doc) override { return store_.patch(path, doc); }
  std::string post(const StorePath& path, const json& doc) override {
    return store_.append_history(path, doc);
  }
  std::vector<HistoryEntry> history(const StorePath& path, const std::optional<std::string>& since,
                                    std::size_t limit) override {
    return store_.get_history(path, since, limit);
  }

 private:
  DocumentStore& store_;
};

json history_to_json(const std::vector<HistoryEntry>& entries);
std::vector<HistoryEntry> history_from_json(const json& list);

}  // namespace smartbag::store
