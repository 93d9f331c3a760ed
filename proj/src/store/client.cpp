#include "smartbag/store/client.hpp"

#include <httplib.h>

namespace smartbag::store {
namespace {

const char* kJson = "application/json";

std::string rest_path(const StorePath& path) { return "/" + path.str() + ".json"; }

json decode(const httplib::Result& res, const std::string& what) {
  if (!res) throw StoreUnavailable(what + ": " + httplib::to_string(res.error()));
  if (res->status >= 500) throw StoreUnavailable(what + ": HTTP " + std::to_string(res->status));
  json body = json::parse(res->body, nullptr, false);
  if (res->status == 404) throw StoreError(StoreError::Kind::NotFound, what + ": not found");
  if (res->status >= 400) {
    std::string message = body.is_object() && body.contains("error") && body["error"].is_string()
                              ? body["error"].get<std::string>()
                              : "HTTP " + std::to_string(res->status);
    throw StoreError(StoreError::Kind::BadRequest, what + ": " + message);
  }
  if (body.is_discarded()) throw StoreUnavailable(what + ": malformed response body");
  return body;
}

}  // namespace

json history_to_json(const std::vector<HistoryEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries) out.push_back({{"id", e.id}, {"recvTs", e.recv_ts}, {"doc", e.doc}});
  return out;
}

std::vector<HistoryEntry> history_from_json(const json& list) {
  if (!list.is_array()) throw StoreUnavailable("history response is not a list");
  std::vector<HistoryEntry> out;
  out.reserve(list.size());
  for (const auto& item : list) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string() || !item.contains("doc"))
      throw StoreUnavailable("malformed history entry");
    out.push_back({item["id"].get<std::string>(), item.value("recvTs", std::int64_t{0}), item["doc"]});
  }
  return out;
}

HttpStoreClient::HttpStoreClient(std::string base_url, std::string token, int timeout_ms)
    : base_url_(std::move(base_url)), token_(std::move(token)), timeout_ms_(timeout_ms) {}

namespace {

httplib::Client connect(const std::string& base, const std::string& token, int timeout_ms) {
  httplib::Client cli(base);
  const auto sec = timeout_ms / 1000;
  const auto usec = (timeout_ms % 1000) * 1000;
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);
  if (!token.empty()) cli.set_bearer_token_auth(token);
  return cli;
}

}  // namespace

std::optional<json> HttpStoreClient::get(const StorePath& path) {
  auto cli = connect(base_url_, token_, timeout_ms_);
  auto res = cli.Get(rest_path(path));
  if (res && res->status == 404) return std::nullopt;
  return decode(res, "GET " + path.str());
}

json HttpStoreClient::patch(const StorePath& path, const json& doc) {
  auto cli = connect(base_url_, token_, timeout_ms_);
  return decode(cli.Patch(rest_path(path), doc.dump(), kJson), "PATCH " + path.str());
}

std::string HttpStoreClient::post(const StorePath& path, const json& doc) {
  auto cli = connect(base_url_, token_, timeout_ms_);
  json body = decode(cli.Post(rest_path(path), doc.dump(), kJson), "POST " + path.str());
  if (!body.is_object() || !body.contains("name") || !body["name"].is_string())
    throw StoreUnavailable("POST " + path.str() + ": response has no name");
  return body["name"].get<std::string>();
}

std::vector<HistoryEntry> HttpStoreClient::history(const StorePath& path,
                                                   const std::optional<std::string>& since,
                                                   std::size_t limit) {
  auto cli = connect(base_url_, token_, timeout_ms_);
  httplib::Params params{{"limit", std::to_string(limit)}};
  if (since) params.emplace("since", *since);
  auto res = cli.Get(rest_path(path), params, httplib::Headers{});
  return history_from_json(decode(res, "GET " + path.str()));
}

}  // namespace smartbag::store
