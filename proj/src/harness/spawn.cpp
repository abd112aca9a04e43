#include "audiolib/harness/spawn.hpp"

#include <random>

namespace audiolib::harness {

Result<std::unique_ptr<SpawnedServer>> SpawnedServer::start(SpawnOptions options) {
  std::unique_ptr<SpawnedServer> s(new SpawnedServer());
  if (options.data_dir.empty()) {
    std::random_device rd;
    options.data_dir = std::filesystem::temp_directory_path() /
                       ("audiolib-scenarios-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    s->owns_dir_ = true;
  }
  s->options_ = options;

  api::ServiceConfig config;
  config.data_dir = options.data_dir;
  config.password_iterations = options.password_iterations;
  s->outbox_ = config.effective_outbox();
  auto service = api::Service::open(config);
  if (!service) return service.error();
  s->service_ = std::move(service).value();
  auto admin = s->service_->engine().bootstrap_admin(options.admin_username, options.admin_password,
                                                     options.admin_username + "@localhost");
  if (!admin) return admin.error();

  s->http_ = std::make_unique<api::HttpServer>(*s->service_, api::ServerOptions{options.disabled_endpoints});
  auto port = s->http_->start("127.0.0.1", 0);
  if (!port) return port.error();
  s->port_ = *port;
  return s;
}

SpawnedServer::~SpawnedServer() {
  if (http_) http_->stop();
  http_.reset();
  service_.reset();
  if (owns_dir_) {
    std::error_code ec;
    std::filesystem::remove_all(options_.data_dir, ec);
  }
}

std::string SpawnedServer::url() const { return "http://127.0.0.1:" + std::to_string(port_); }

}  // namespace audiolib::harness
