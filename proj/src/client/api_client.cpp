#include "audiolib/client/api_client.hpp"

#include <httplib.h>

namespace audiolib::client {

using nlohmann::json;

std::string HttpReply::header(const std::string& name) const {
  auto it = headers.find(name);
  return it == headers.end() ? std::string() : it->second;
}

json HttpReply::json() const { return nlohmann::json::parse(body, nullptr, false); }

Error error_from_reply(const HttpReply& reply) {
  auto j = reply.json();
  if (j.is_object() && j.contains("error") && j["error"].is_string()) {
    ErrorCode code{};
    if (parse_error_code(j["error"].get<std::string>(), code)) return Error{code, j.value("message", std::string())};
  }
  return Error{ErrorCode::Internal, "HTTP " + std::to_string(reply.status) + ": " + reply.body.substr(0, 200)};
}

std::string url_encode(const std::string& s) { return httplib::detail::encode_query_param(s); }

ApiClient::ApiClient(std::string base_url, std::string token)
    : base_url_(std::move(base_url)), token_(std::move(token)), http_(std::make_unique<httplib::Client>(base_url_)) {
  http_->set_connection_timeout(5, 0);
  http_->set_read_timeout(60, 0);
  http_->set_write_timeout(60, 0);
  http_->set_keep_alive(true);
}

ApiClient::~ApiClient() = default;
ApiClient::ApiClient(ApiClient&&) noexcept = default;
ApiClient& ApiClient::operator=(ApiClient&&) noexcept = default;

Result<HttpReply> ApiClient::send(const std::string& method, const std::string& path_and_query,
                                  const std::string& body, const std::string& content_type,
                                  const std::map<std::string, std::string>& headers) {
  if (!http_->is_valid()) return Error{ErrorCode::ConnectFailed, "invalid server url " + base_url_};
  if (observer_) observer_(method, path_and_query.substr(0, path_and_query.find('?')));

  httplib::Request req;
  req.method = method;
  req.path = path_and_query;
  for (const auto& [k, v] : headers) req.headers.emplace(k, v);
  if (!token_.empty()) req.headers.emplace("Authorization", "Bearer " + token_);
  if (!body.empty() || method == "POST" || method == "PUT" || method == "PATCH") {
    req.body = body;
    req.headers.emplace("Content-Type", content_type);
  }
  auto res = http_->send(req);
  if (!res) {
    return Error{ErrorCode::ConnectFailed, base_url_ + ": " + httplib::to_string(res.error())};
  }
  HttpReply reply;
  reply.status = res->status;
  reply.body = std::move(res->body);
  for (auto& [k, v] : res->headers) reply.headers.emplace(k, v);
  return reply;
}

Result<json> ApiClient::call(const std::string& method, const std::string& path_and_query,
                             const std::optional<json>& body) {
  auto reply = send(method, path_and_query, body ? body->dump() : std::string());
  if (!reply) return reply.error();
  if (reply->status < 200 || reply->status >= 300) return error_from_reply(*reply);
  if (reply->body.empty()) return json::object();
  auto j = reply->json();
  if (j.is_discarded()) return Error{ErrorCode::Internal, "reply is not JSON"};
  return j;
}

Result<HttpReply> ApiClient::send_multipart(const std::string& path, const std::map<std::string, std::string>& fields,
                                            const std::optional<std::string>& trial_file_bytes) {
  if (observer_) observer_("POST", path);
  httplib::MultipartFormDataItems items;
  for (const auto& [k, v] : fields) items.push_back({k, v, "", ""});
  if (trial_file_bytes) items.push_back({"trial", *trial_file_bytes, "trial.mp3", "audio/mpeg"});
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  auto res = http_->Post(path, headers, items);
  if (!res) return Error{ErrorCode::ConnectFailed, base_url_ + ": " + httplib::to_string(res.error())};
  HttpReply reply;
  reply.status = res->status;
  reply.body = std::move(res->body);
  for (auto& [k, v] : res->headers) reply.headers.emplace(k, v);
  return reply;
}

Result<json> ApiClient::post_multipart(const std::string& path, const std::map<std::string, std::string>& fields,
                                       const std::optional<std::string>& trial_file_bytes) {
  auto reply = send_multipart(path, fields, trial_file_bytes);
  if (!reply) return reply.error();
  if (reply->status < 200 || reply->status >= 300) return error_from_reply(*reply);
  auto j = reply->json();
  if (j.is_discarded()) return Error{ErrorCode::Internal, "reply is not JSON"};
  return j;
}

}  // namespace audiolib::client
