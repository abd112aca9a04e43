#pragma once

// Terminal client: login, whoami, assignments, upload, queue, decide,
// demand-list. The tool's main() only forwards to run_cli so tests can
// drive every command in-process.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "audiolib/client/upload.hpp"

namespace audiolib::client {

enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitUsage = 2, kExitNetwork = 3 };

struct CliContext {
  std::ostream& out;
  std::ostream& err;
  std::istream* in = nullptr;  // password prompt source when --password is absent
  /// Overrides the per-user default profile location.
  std::optional<std::filesystem::path> profile_path;
  UploadHooks upload_hooks;
};

/// $AUDIOLIB_PROFILE, else $XDG_CONFIG_HOME/audiolib/profile.json, else
/// ~/.config/audiolib/profile.json.
std::filesystem::path default_profile_path();

struct Profile {
  std::string server;
  std::string token;
  std::string username;
  std::string role;
  std::string account_id;
};

std::optional<Profile> read_profile(const std::filesystem::path& path);
/// Written with owner-only permissions.
Status write_profile(const std::filesystem::path& path, const Profile& profile);

int run_cli(const std::vector<std::string>& args, CliContext& ctx);

}  // namespace audiolib::client
