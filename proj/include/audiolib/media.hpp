#pragma once

// Blob storage and the resumable upload protocol.
//
// Layout under the blob root:
//   staging/{session}.part   bytes received so far
//   staging/{session}.json   session manifest (owner, declared size and
//                            digest, received ranges, state)
//   committed/{session}.mp3  verified upload, not yet attached to a part
//   books/{book}/parts/{part}.mp3
//   trials/{application}.mp3

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "audiolib/domain.hpp"
#include "audiolib/intervals.hpp"
#include "audiolib/mp3.hpp"
#include "audiolib/result.hpp"

namespace audiolib::media {

inline constexpr std::int64_t kDefaultMaxUploadBytes = 512LL * 1024 * 1024;
inline constexpr std::int64_t kMaxChunkBytes = 8LL * 1024 * 1024;

enum class UploadState { Open, Complete, Aborted };
std::string_view to_string(UploadState s) noexcept;

struct BlobRef {
  std::string key;
  std::int64_t size = 0;
  std::string digest;  // SHA-256 hex
};

struct UploadSessionInfo {
  std::string id;
  AccountId owner;
  std::int64_t declared_size = 0;
  std::string declared_checksum;
  std::vector<ByteRange> received;
  std::int64_t received_bytes = 0;
  UploadState state = UploadState::Open;
  std::optional<BlobRef> blob;
  std::optional<double> duration_seconds;
};

struct ChunkReceipt {
  std::int64_t received_bytes = 0;
  bool complete = false;
  double fraction = 0.0;
};

struct CommitReceipt {
  BlobRef blob;
  std::optional<mp3::AudioProbe> probe;  // empty when the blob is not MP3
};

/// Read-only memory map of a whole file.
class MappedFile {
 public:
  static Result<MappedFile> open(const std::filesystem::path& path);
  MappedFile(MappedFile&& other) noexcept;
  MappedFile& operator=(MappedFile&& other) noexcept;
  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;
  ~MappedFile();

  std::span<const std::uint8_t> bytes() const noexcept { return {data_, size_}; }

 private:
  MappedFile() = default;
  const std::uint8_t* data_ = nullptr;
  std::size_t size_ = 0;
};

/// Probes a stored blob.
Result<mp3::AudioProbe> probe_file(const std::filesystem::path& path);

class MediaStore {
 public:
  MediaStore(std::filesystem::path root, std::int64_t max_upload_bytes = kDefaultMaxUploadBytes);
  ~MediaStore();
  MediaStore(const MediaStore&) = delete;
  MediaStore& operator=(const MediaStore&) = delete;

  const std::filesystem::path& root() const noexcept { return root_; }
  std::int64_t max_upload_bytes() const noexcept { return max_upload_bytes_; }

  Result<std::string> begin_upload(const AccountId& owner, std::int64_t declared_size,
                                   std::string_view declared_checksum);

  /// Writes data at offset. Re-sending bytes identical to what is already
  /// stored is accepted; different bytes over a received range are refused.
  Result<ChunkReceipt> put_chunk(const std::string& session_id, std::int64_t offset,
                                 std::span<const std::byte> data);

  /// Verifies coverage and digest and seals the blob.
  Result<CommitReceipt> finish_upload(const std::string& session_id);

  Result<UploadSessionInfo> session(const std::string& session_id) const;

  /// Links a committed upload into books/{book}/parts/{part}.mp3.
  Result<BlobRef> attach_to_part(const std::string& session_id, BookCode book, PartCode part);
  void detach(const std::string& key);

  /// Stores a small blob in one shot (trial recordings).
  Result<BlobRef> put_blob(const std::string& key, std::span<const std::byte> data);

  std::filesystem::path path_of(const std::string& key) const;
  Result<std::int64_t> blob_size(const std::string& key) const;
  Result<std::vector<std::byte>> read_range(const std::string& key, ByteRange range) const;
  Result<mp3::AudioProbe> probe(const std::string& key) const;

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id) const;
  void load_sessions();

  std::filesystem::path root_;
  std::int64_t max_upload_bytes_;
  mutable std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace audiolib::media
