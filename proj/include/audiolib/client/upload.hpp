#pragma once

// Client side of the resumable upload protocol: digest the file, open (or
// find again) a session, send the missing ranges with a few requests in
// flight, commit with the digest and register the part.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

#include "audiolib/client/api_client.hpp"
#include "audiolib/domain.hpp"

namespace audiolib::client {

inline constexpr std::size_t kDefaultChunkSize = 1024 * 1024;
inline constexpr int kMaxChunksInFlight = 4;

struct UploadPlan {
  BookCode book;
  std::string part_name;
  std::filesystem::path file;
  std::size_t chunk_size = kDefaultChunkSize;
  int in_flight = kMaxChunksInFlight;
  /// Maps (server, book, digest, size) to the open session so a rerun
  /// resumes instead of starting over. Empty disables resuming.
  std::filesystem::path state_file;
};

struct UploadHooks {
  /// Called before each chunk is sent; returning false stops the upload
  /// as if the process had died at that point.
  std::function<bool(std::int64_t offset, std::int64_t length)> before_chunk;
  /// Called after the session is known and before any chunk is sent.
  std::function<void(const std::string& session_id)> on_session;
};

struct UploadOutcome {
  PartCode part;
  std::string session_id;
  std::string digest;
  bool resumed = false;
  std::int64_t bytes_sent = 0;
  std::optional<double> duration_seconds;
};

/// SHA-256 hex and size of a file, streamed.
Result<std::pair<std::string, std::int64_t>> digest_file(const std::filesystem::path& file);

/// Runs the whole upload and registration. An interruption through
/// before_chunk is reported as ConnectFailed("interrupted").
Result<UploadOutcome> upload_part(ApiClient& api, const UploadPlan& plan, const UploadHooks& hooks = {});

}  // namespace audiolib::client
