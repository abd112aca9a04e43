#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "audiolib/result.hpp"

namespace audiolib::api {

struct ServiceConfig {
  std::string listen_address = "127.0.0.1";
  int listen_port = 8080;
  std::filesystem::path data_dir = "var";
  std::int64_t max_upload_bytes = 512LL * 1024 * 1024;
  int session_ttl_hours = 24;
  std::filesystem::path outbox_path;  // defaults to <data_dir>/outbox/notifications.log
  std::filesystem::path static_dir;   // served under "/" when set
  int password_iterations = 100'000;
  int worker_threads = 64;

  std::filesystem::path records_path() const { return data_dir / "data" / "records.db"; }
  std::filesystem::path blob_root() const { return data_dir / "blobs"; }
  std::filesystem::path effective_outbox() const {
    return outbox_path.empty() ? data_dir / "outbox" / "notifications.log" : outbox_path;
  }
};

/// Applies key=value pairs ('#' comments, blank lines ignored). Unknown keys
/// and unparsable values are errors.
Status apply_config_text(ServiceConfig& config, const std::string& text);
Status apply_config_file(ServiceConfig& config, const std::filesystem::path& path);

/// LISTEN_PORT, DATA_DIR, MAX_UPLOAD_BYTES, ... from the given lookup
/// (normally getenv).
using EnvLookup = std::optional<std::string> (*)(const char* name);
Status apply_environment(ServiceConfig& config, EnvLookup lookup);
std::optional<std::string> getenv_lookup(const char* name);

}  // namespace audiolib::api
