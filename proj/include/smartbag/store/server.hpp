#pragma once

#include <memory>
#include <string>

#include "smartbag/store/document_store.hpp"

namespace smartbag::store {

struct ServerOptions {
  std::string host = "127.0.0.1";
  /// 0 picks a free port.
  int port = 8080;
  /// When non-empty, requests must carry `Authorization: Bearer <token>`.
  std::string token;
};

/// REST front end over a DocumentStore:
///   GET    /<path>.json                      document, or history list for list paths
///   GET    /<path>.json?since=<id>&limit=<n>  history entries [{id, recvTs, doc}]
///   PATCH  /<path>.json                      merge, returns the merged document
///   POST   /<path>.json                      append, returns {"name": <pushId>}
class StoreServer {
 public:
  StoreServer(DocumentStore& store, ServerOptions options);
  ~StoreServer();
  StoreServer(const StoreServer&) = delete;
  StoreServer& operator=(const StoreServer&) = delete;

  /// Returns false if the address cannot be bound (port in use).
  bool bind();
  /// Port actually bound; valid after bind().
  int port() const { return port_; }
  /// Serves until stop(). Requires a successful bind().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ServerOptions options_;
  int port_ = -1;
};

}  // namespace smartbag::store
