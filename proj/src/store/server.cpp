#include "smartbag/store/server.hpp"

#include <sys/socket.h>

#include <charconv>
#include <limits>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "smartbag/store/client.hpp"

namespace smartbag::store {
namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, json{{"error", message}});
}

// A list path holds history entries, or is named like one.
bool is_list_path(const DocumentStore& store, const StorePath& path) {
  return path.leaf() == "history" || store.has_history(path);
}

}  // namespace

struct StoreServer::Impl {
  httplib::Server http;
};

StoreServer::StoreServer(DocumentStore& store, ServerOptions options)
    : impl_(std::make_unique<Impl>()), options_(std::move(options)) {
  auto& http = impl_->http;

  // No SO_REUSEPORT: a second server on the same port must fail to bind.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  http.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (options_.token.empty()) return httplib::Server::HandlerResponse::Unhandled;
    if (req.get_header_value("Authorization") == "Bearer " + options_.token)
      return httplib::Server::HandlerResponse::Unhandled;
    reply_error(res, 401, "missing or wrong bearer token");
    return httplib::Server::HandlerResponse::Handled;
  });

  auto resolve = [](const httplib::Request& req, httplib::Response& res) -> std::optional<StorePath> {
    auto path = StorePath::from_rest(req.path);
    if (!path) reply_error(res, 400, "malformed path: " + req.path);
    return path;
  };

  auto parse_body = [](const httplib::Request& req, httplib::Response& res) -> std::optional<json> {
    json doc = json::parse(req.body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      reply_error(res, 400, "body must be a JSON object");
      return std::nullopt;
    }
    return doc;
  };

  http.Get(R"(/.*)", [&store, resolve](const httplib::Request& req, httplib::Response& res) {
    auto path = resolve(req, res);
    if (!path) return;
    if (!is_list_path(store, *path)) {
      if (auto doc = store.get(*path))
        reply(res, 200, *doc);
      else
        reply_error(res, 404, "not found");
      return;
    }
    std::optional<std::string> since;
    if (req.has_param("since")) since = req.get_param_value("since");
    std::size_t limit = std::numeric_limits<std::size_t>::max();
    if (req.has_param("limit")) {
      const auto text = req.get_param_value("limit");
      auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), limit);
      if (ec != std::errc{} || end != text.data() + text.size()) {
        reply_error(res, 400, "limit must be a non-negative integer");
        return;
      }
    }
    reply(res, 200, history_to_json(store.get_history(*path, since, limit)));
  });

  http.Patch(R"(/.*)", [&store, resolve, parse_body](const httplib::Request& req, httplib::Response& res) {
    auto path = resolve(req, res);
    if (!path) return;
    auto doc = parse_body(req, res);
    if (!doc) return;
    try {
      reply(res, 200, store.patch(*path, *doc));
    } catch (const StoreError& e) {
      reply_error(res, e.kind() == StoreError::Kind::BadRequest ? 400 : 500, e.what());
    }
  });

  http.Post(R"(/.*)", [&store, resolve, parse_body](const httplib::Request& req, httplib::Response& res) {
    auto path = resolve(req, res);
    if (!path) return;
    auto doc = parse_body(req, res);
    if (!doc) return;
    try {
      reply(res, 200, json{{"name", store.append_history(*path, *doc)}});
    } catch (const StoreError& e) {
      reply_error(res, e.kind() == StoreError::Kind::BadRequest ? 400 : 500, e.what());
    }
  });

  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    } catch (...) {
      reply_error(res, 500, "internal error");
    }
  });
}

StoreServer::~StoreServer() { stop(); }

bool StoreServer::bind() {
  auto& http = impl_->http;
  if (options_.port == 0) {
    port_ = http.bind_to_any_port(options_.host);
    return port_ > 0;
  }
  if (!http.bind_to_port(options_.host, options_.port)) return false;
  port_ = options_.port;
  return true;
}

void StoreServer::serve() {
  spdlog::info("store: serving on {}:{}", options_.host, port_);
  impl_->http.listen_after_bind();
}

void StoreServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace smartbag::store
