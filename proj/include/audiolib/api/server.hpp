#pragma once

#include <memory>
#include <set>
#include <string>
#include <thread>

#include "audiolib/api/service.hpp"

namespace httplib {
class Server;
}

namespace audiolib::api {

struct ServerOptions {
  /// Endpoint ids (see endpoint_table) left unregistered; they answer 404.
  std::set<std::string> disabled_endpoints;
};

/// HTTP front end over a Service. Runs its accept loop on a background
/// thread between start() and stop().
class HttpServer {
 public:
  explicit HttpServer(Service& service, ServerOptions options = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds (port 0 picks a free one) and starts serving. Returns the port.
  Result<int> start(const std::string& host, int port);
  /// Serves on the calling thread until stop() is called from elsewhere.
  Status run(const std::string& host, int port);
  void stop();
  int port() const noexcept { return port_; }

 private:
  void install_routes();

  Service& service_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

/// HTTP status used for each error code.
int http_status(ErrorCode code) noexcept;

}  // namespace audiolib::api
