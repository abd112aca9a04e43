#pragma once

// Thin JSON-over-HTTP client for the service. One instance holds one
// connection and is not meant to be shared between threads.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "audiolib/result.hpp"

namespace httplib {
class Client;
}

namespace audiolib::client {

struct HttpReply {
  int status = 0;
  std::string body;
  std::multimap<std::string, std::string> headers;

  std::string header(const std::string& name) const;
  nlohmann::json json() const;
};

/// Observer called once per request with the method and path (no query).
using RequestObserver = std::function<void(const std::string& method, const std::string& path)>;

class ApiClient {
 public:
  explicit ApiClient(std::string base_url, std::string token = {});
  ~ApiClient();
  ApiClient(ApiClient&&) noexcept;
  ApiClient& operator=(ApiClient&&) noexcept;

  const std::string& base_url() const noexcept { return base_url_; }
  const std::string& token() const noexcept { return token_; }
  void set_token(std::string token) { token_ = std::move(token); }
  void set_observer(RequestObserver observer) { observer_ = std::move(observer); }
  const RequestObserver& observer() const noexcept { return observer_; }

  /// Raw exchange. Transport failures are ConnectFailed; any HTTP status is
  /// a successful reply.
  Result<HttpReply> send(const std::string& method, const std::string& path_and_query, const std::string& body = {},
                         const std::string& content_type = "application/json",
                         const std::map<std::string, std::string>& headers = {});

  /// JSON exchange. Non-2xx replies become the Error named in the body.
  Result<nlohmann::json> call(const std::string& method, const std::string& path_and_query,
                              const std::optional<nlohmann::json>& body = std::nullopt);

  /// Multipart POST (membership application with a trial recording).
  Result<HttpReply> send_multipart(const std::string& path, const std::map<std::string, std::string>& fields,
                                   const std::optional<std::string>& trial_file_bytes);
  Result<nlohmann::json> post_multipart(const std::string& path, const std::map<std::string, std::string>& fields,
                                        const std::optional<std::string>& trial_file_bytes);

 private:
  std::string base_url_;
  std::string token_;
  std::unique_ptr<httplib::Client> http_;
  RequestObserver observer_;
};

/// Error carried by a non-2xx reply ({"error": ..., "message": ...}).
Error error_from_reply(const HttpReply& reply);

std::string url_encode(const std::string& s);

}  // namespace audiolib::client
