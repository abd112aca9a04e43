#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "audiolib/api/server.hpp"

namespace {
audiolib::api::HttpServer* running = nullptr;
void on_signal(int) {
  if (running) running->stop();
}
}  // namespace

int main(int argc, char** argv) {
  using namespace audiolib;
  CLI::App app{"Audio library server", "audiolib-server"};
  std::string config_file, admin_user, admin_password, admin_email = "admin@localhost";
  app.add_option("--config", config_file, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--admin-user", admin_user, "Create this admin account on startup if missing");
  app.add_option("--admin-password", admin_password, "Password for --admin-user");
  app.add_option("--admin-email", admin_email, "E-mail for --admin-user");
  CLI11_PARSE(app, argc, argv);

  api::ServiceConfig config;
  if (!config_file.empty()) {
    if (auto s = api::apply_config_file(config, config_file); !s) {
      std::cerr << "config: " << s.error().describe() << "\n";
      return 2;
    }
  }
  if (auto s = api::apply_environment(config, api::getenv_lookup); !s) {
    std::cerr << "environment: " << s.error().describe() << "\n";
    return 2;
  }

  auto service = api::Service::open(config);
  if (!service) {
    std::cerr << "cannot open data directory: " << service.error().describe() << "\n";
    return 1;
  }
  if (!admin_user.empty()) {
    auto admin = (*service)->engine().bootstrap_admin(admin_user, admin_password, admin_email);
    if (!admin) {
      std::cerr << "admin bootstrap: " << admin.error().describe() << "\n";
      return 1;
    }
  }

  api::HttpServer server(**service);
  running = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << config.listen_address << ":" << config.listen_port << "\n";
  auto status = server.run(config.listen_address, config.listen_port);
  running = nullptr;
  if (!status) {
    std::cerr << status.error().describe() << "\n";
    return 1;
  }
  return 0;
}
