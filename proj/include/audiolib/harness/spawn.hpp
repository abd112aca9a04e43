#pragma once

// An in-process server over a throwaway data directory, for running the
// scenarios without a separately started instance.

#include <filesystem>
#include <memory>
#include <set>
#include <string>

#include "audiolib/api/server.hpp"
#include "audiolib/api/service.hpp"

namespace audiolib::harness {

struct SpawnOptions {
  std::filesystem::path data_dir;  // a fresh temporary directory when empty
  std::string admin_username = "admin";
  std::string admin_password = "admin-password-1";
  int password_iterations = 10'000;
  std::set<std::string> disabled_endpoints;
};

class SpawnedServer {
 public:
  static Result<std::unique_ptr<SpawnedServer>> start(SpawnOptions options);
  ~SpawnedServer();

  SpawnedServer(const SpawnedServer&) = delete;
  SpawnedServer& operator=(const SpawnedServer&) = delete;

  std::string url() const;
  const std::filesystem::path& outbox() const noexcept { return outbox_; }
  const SpawnOptions& options() const noexcept { return options_; }
  api::Service& service() noexcept { return *service_; }

 private:
  SpawnedServer() = default;

  SpawnOptions options_;
  bool owns_dir_ = false;
  std::filesystem::path outbox_;
  std::unique_ptr<api::Service> service_;
  std::unique_ptr<api::HttpServer> http_;
  int port_ = 0;
};

}  // namespace audiolib::harness
