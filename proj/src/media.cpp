#include "audiolib/media.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "audiolib/crypto.hpp"
#include "audiolib/text.hpp"

namespace audiolib::media {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  int get() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }

 private:
  int fd_;
};

bool pwrite_all(int fd, const std::byte* data, std::size_t len, off_t offset) {
  while (len > 0) {
    const ssize_t n = ::pwrite(fd, data, len, offset);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += n;
    len -= static_cast<std::size_t>(n);
    offset += n;
  }
  return true;
}

bool pread_all(int fd, std::byte* data, std::size_t len, off_t offset) {
  while (len > 0) {
    const ssize_t n = ::pread(fd, data, len, offset);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return false;
    }
    data += n;
    len -= static_cast<std::size_t>(n);
    offset += n;
  }
  return true;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

void write_file_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
  }
  fs::rename(tmp, path);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '/') return false;
  return key.find("..") == std::string::npos;
}

}  // namespace

std::string_view to_string(UploadState s) noexcept {
  switch (s) {
    case UploadState::Open: return "Open";
    case UploadState::Complete: return "Complete";
    case UploadState::Aborted: return "Aborted";
  }
  return "?";
}

// ---------------------------------------------------------------------------

Result<MappedFile> MappedFile::open(const fs::path& path) {
  Fd fd(::open(path.c_str(), O_RDONLY | O_CLOEXEC));
  if (!fd.valid()) return Error{ErrorCode::BlobMissing, path.filename().string()};
  struct stat st {};
  if (::fstat(fd.get(), &st) != 0) return Error{ErrorCode::BlobMissing, path.filename().string()};
  MappedFile m;
  m.size_ = static_cast<std::size_t>(st.st_size);
  if (m.size_ > 0) {
    void* p = ::mmap(nullptr, m.size_, PROT_READ, MAP_PRIVATE, fd.get(), 0);
    if (p == MAP_FAILED) return Error{ErrorCode::BlobMissing, "mmap failed"};
    m.data_ = static_cast<const std::uint8_t*>(p);
  }
  return m;
}

MappedFile::MappedFile(MappedFile&& other) noexcept
    : data_(std::exchange(other.data_, nullptr)), size_(std::exchange(other.size_, 0)) {}

MappedFile& MappedFile::operator=(MappedFile&& other) noexcept {
  if (this != &other) {
    if (data_) ::munmap(const_cast<std::uint8_t*>(data_), size_);
    data_ = std::exchange(other.data_, nullptr);
    size_ = std::exchange(other.size_, 0);
  }
  return *this;
}

MappedFile::~MappedFile() {
  if (data_) ::munmap(const_cast<std::uint8_t*>(data_), size_);
}

Result<mp3::AudioProbe> probe_file(const fs::path& path) {
  auto mapped = MappedFile::open(path);
  if (!mapped) return mapped.error();
  return mp3::probe(mapped->bytes());
}

// ---------------------------------------------------------------------------

struct MediaStore::Session {
  std::mutex mutex;
  UploadSessionInfo info;
  IntervalSet received;
};

namespace {

json manifest_of(const UploadSessionInfo& info, const IntervalSet& received) {
  json ranges = json::array();
  for (const auto& r : received.ranges()) ranges.push_back({r.begin, r.end});
  json j{{"id", info.id},
         {"owner", info.owner},
         {"declared_size", info.declared_size},
         {"declared_checksum", info.declared_checksum},
         {"state", to_string(info.state)},
         {"received", ranges}};
  if (info.blob) {
    j["blob"] = {{"key", info.blob->key}, {"size", info.blob->size}, {"digest", info.blob->digest}};
  }
  if (info.duration_seconds) j["duration_seconds"] = *info.duration_seconds;
  return j;
}

}  // namespace

MediaStore::MediaStore(fs::path root, std::int64_t max_upload_bytes)
    : root_(std::move(root)), max_upload_bytes_(max_upload_bytes) {
  fs::create_directories(root_ / "staging");
  fs::create_directories(root_ / "committed");
  fs::create_directories(root_ / "books");
  fs::create_directories(root_ / "trials");
  load_sessions();
}

MediaStore::~MediaStore() = default;

void MediaStore::load_sessions() {
  for (const auto& entry : fs::directory_iterator(root_ / "staging")) {
    if (entry.path().extension() != ".json") continue;
    try {
      std::ifstream in(entry.path());
      const json j = json::parse(in);
      auto s = std::make_shared<Session>();
      s->info.id = j.at("id").get<std::string>();
      s->info.owner = j.at("owner").get<std::string>();
      s->info.declared_size = j.at("declared_size").get<std::int64_t>();
      s->info.declared_checksum = j.at("declared_checksum").get<std::string>();
      const auto state = j.at("state").get<std::string>();
      s->info.state = state == "Complete" ? UploadState::Complete
                      : state == "Aborted" ? UploadState::Aborted
                                           : UploadState::Open;
      for (const auto& r : j.at("received")) s->received.insert({r.at(0).get<std::int64_t>(), r.at(1).get<std::int64_t>()});
      if (auto it = j.find("blob"); it != j.end()) {
        s->info.blob = BlobRef{it->at("key"), it->at("size"), it->at("digest")};
      }
      if (auto it = j.find("duration_seconds"); it != j.end()) s->info.duration_seconds = it->get<double>();
      sessions_[s->info.id] = std::move(s);
    } catch (const std::exception&) {
      // unreadable manifest: the session is lost, the client starts over
    }
  }
}

std::shared_ptr<MediaStore::Session> MediaStore::find(const std::string& id) const {
  std::lock_guard lock(registry_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

fs::path MediaStore::path_of(const std::string& key) const { return root_ / key; }

Result<std::string> MediaStore::begin_upload(const AccountId& owner, std::int64_t declared_size,
                                             std::string_view declared_checksum) {
  if (declared_size <= 0 || declared_size > max_upload_bytes_) {
    return Error{ErrorCode::SizeRejected, "declared size must be in (0, " + std::to_string(max_upload_bytes_) + "]"};
  }
  if (!crypto::is_sha256_hex(declared_checksum)) {
    return Error{ErrorCode::BadChecksumFormat, "expected 64 hex characters"};
  }
  auto s = std::make_shared<Session>();
  s->info.id = "up-" + crypto::random_token();
  s->info.owner = owner;
  s->info.declared_size = declared_size;
  s->info.declared_checksum = lower(declared_checksum);
  s->info.state = UploadState::Open;

  Fd fd(::open((root_ / "staging" / (s->info.id + ".part")).c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0640));
  if (!fd.valid()) return Error{ErrorCode::Internal, "cannot create staging file"};
  write_file_atomically(root_ / "staging" / (s->info.id + ".json"), manifest_of(s->info, s->received).dump());

  std::lock_guard lock(registry_mutex_);
  sessions_[s->info.id] = s;
  return s->info.id;
}

Result<ChunkReceipt> MediaStore::put_chunk(const std::string& session_id, std::int64_t offset,
                                           std::span<const std::byte> data) {
  auto s = find(session_id);
  if (!s) return Error{ErrorCode::NoSuchSession, session_id};
  std::lock_guard lock(s->mutex);
  if (s->info.state != UploadState::Open) {
    return Error{ErrorCode::WrongState, "session is " + std::string(to_string(s->info.state))};
  }
  const auto len = static_cast<std::int64_t>(data.size());
  if (len > kMaxChunkBytes) return Error{ErrorCode::SizeRejected, "chunk exceeds 8 MiB"};
  if (offset < 0 || offset + len > s->info.declared_size) {
    return Error{ErrorCode::RangeRejected, "chunk " + to_string(ByteRange{offset, offset + len}) +
                                               " outside declared size " + std::to_string(s->info.declared_size)};
  }

  const fs::path staging = root_ / "staging" / (session_id + ".part");
  Fd fd(::open(staging.c_str(), O_RDWR | O_CLOEXEC));
  if (!fd.valid()) return Error{ErrorCode::Internal, "staging file missing"};

  const ByteRange range{offset, offset + len};
  std::vector<std::byte> existing;
  for (const auto& overlap : s->received.intersect(range)) {
    existing.resize(static_cast<std::size_t>(overlap.length()));
    if (!pread_all(fd.get(), existing.data(), existing.size(), overlap.begin)) {
      return Error{ErrorCode::Internal, "staging read failed"};
    }
    if (std::memcmp(existing.data(), data.data() + (overlap.begin - offset), existing.size()) != 0) {
      return Error{ErrorCode::ChunkConflict, "bytes differ from those already received at " + to_string(overlap)};
    }
  }

  if (len > 0) {
    if (!pwrite_all(fd.get(), data.data(), data.size(), offset)) {
      return Error{ErrorCode::Internal, "staging write failed"};
    }
    s->received.insert(range);
    s->info.received_bytes = s->received.covered();
    write_file_atomically(root_ / "staging" / (session_id + ".json"), manifest_of(s->info, s->received).dump());
  }

  ChunkReceipt receipt;
  receipt.received_bytes = s->received.covered();
  receipt.complete = receipt.received_bytes == s->info.declared_size;
  receipt.fraction = static_cast<double>(receipt.received_bytes) / static_cast<double>(s->info.declared_size);
  return receipt;
}

Result<CommitReceipt> MediaStore::finish_upload(const std::string& session_id) {
  auto s = find(session_id);
  if (!s) return Error{ErrorCode::NoSuchSession, session_id};
  std::lock_guard lock(s->mutex);

  if (s->info.state == UploadState::Complete) {
    CommitReceipt again{*s->info.blob, std::nullopt};
    if (s->info.duration_seconds) {
      if (auto p = probe(s->info.blob->key)) again.probe = *p;
    }
    return again;
  }
  if (s->info.state == UploadState::Aborted) return Error{ErrorCode::WrongState, "session was aborted"};

  const auto gaps = s->received.gaps(s->info.declared_size);
  if (!gaps.empty()) {
    std::string listing;
    for (const auto& g : gaps) {
      if (!listing.empty()) listing += " ";
      listing += to_string(g);
    }
    return Error{ErrorCode::IncompleteUpload, "missing " + listing};
  }

  const fs::path staging = root_ / "staging" / (session_id + ".part");
  std::string digest;
  {
    auto mapped = MappedFile::open(staging);
    if (!mapped) return Error{ErrorCode::Internal, "staging file missing"};
    auto bytes = mapped->bytes().first(static_cast<std::size_t>(s->info.declared_size));
    digest = crypto::sha256_hex(std::as_bytes(bytes));
  }

  const fs::path manifest = root_ / "staging" / (session_id + ".json");
  if (digest != s->info.declared_checksum) {
    s->info.state = UploadState::Aborted;
    std::error_code ec;
    fs::remove(staging, ec);
    write_file_atomically(manifest, manifest_of(s->info, s->received).dump());
    return Error{ErrorCode::ChecksumMismatch, "received bytes hash to " + digest};
  }

  const std::string key = "committed/" + session_id + ".mp3";
  fs::rename(staging, path_of(key));
  s->info.state = UploadState::Complete;
  s->info.blob = BlobRef{key, s->info.declared_size, digest};

  CommitReceipt receipt{*s->info.blob, std::nullopt};
  if (auto p = probe(key)) {
    receipt.probe = *p;
    s->info.duration_seconds = p->duration_seconds;
  }
  write_file_atomically(manifest, manifest_of(s->info, s->received).dump());
  return receipt;
}

Result<UploadSessionInfo> MediaStore::session(const std::string& session_id) const {
  auto s = find(session_id);
  if (!s) return Error{ErrorCode::NoSuchSession, session_id};
  std::lock_guard lock(s->mutex);
  UploadSessionInfo info = s->info;
  info.received = s->received.ranges();
  info.received_bytes = s->received.covered();
  return info;
}

Result<BlobRef> MediaStore::attach_to_part(const std::string& session_id, BookCode book, PartCode part) {
  auto s = find(session_id);
  if (!s) return Error{ErrorCode::NoSuchSession, session_id};
  std::lock_guard lock(s->mutex);
  if (s->info.state != UploadState::Complete || !s->info.blob) {
    return Error{ErrorCode::UploadIncomplete, "session is " + std::string(to_string(s->info.state))};
  }
  const std::string key = "books/" + std::to_string(book.value) + "/parts/" + std::to_string(part.value) + ".mp3";
  const fs::path target = path_of(key);
  const fs::path source = path_of(s->info.blob->key);
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (fs::exists(target, ec)) {
    if (fs::equivalent(source, target, ec)) return BlobRef{key, s->info.blob->size, s->info.blob->digest};
    fs::remove(target, ec);
  }
  fs::create_hard_link(source, target, ec);
  if (ec) {
    ec.clear();
    fs::copy_file(source, target, ec);
    if (ec) return Error{ErrorCode::Internal, "cannot place blob: " + ec.message()};
  }
  return BlobRef{key, s->info.blob->size, s->info.blob->digest};
}

void MediaStore::detach(const std::string& key) {
  if (!valid_key(key)) return;
  std::error_code ec;
  fs::remove(path_of(key), ec);
}

Result<BlobRef> MediaStore::put_blob(const std::string& key, std::span<const std::byte> data) {
  if (!valid_key(key)) return Error{ErrorCode::BadRequest, "bad blob key"};
  const fs::path target = path_of(key);
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) return Error{ErrorCode::Internal, "blob write failed"};
  }
  fs::rename(tmp, target, ec);
  if (ec) return Error{ErrorCode::Internal, ec.message()};
  return BlobRef{key, static_cast<std::int64_t>(data.size()), crypto::sha256_hex(data)};
}

Result<std::int64_t> MediaStore::blob_size(const std::string& key) const {
  if (!valid_key(key)) return Error{ErrorCode::BlobMissing, key};
  std::error_code ec;
  const auto size = fs::file_size(path_of(key), ec);
  if (ec) return Error{ErrorCode::BlobMissing, key};
  return static_cast<std::int64_t>(size);
}

Result<std::vector<std::byte>> MediaStore::read_range(const std::string& key, ByteRange range) const {
  if (!valid_key(key)) return Error{ErrorCode::BlobMissing, key};
  Fd fd(::open(path_of(key).c_str(), O_RDONLY | O_CLOEXEC));
  if (!fd.valid()) return Error{ErrorCode::BlobMissing, key};
  std::vector<std::byte> out(static_cast<std::size_t>(range.length()));
  if (!pread_all(fd.get(), out.data(), out.size(), range.begin)) {
    return Error{ErrorCode::RangeRejected, to_string(range)};
  }
  return out;
}

Result<mp3::AudioProbe> MediaStore::probe(const std::string& key) const {
  if (!valid_key(key)) return Error{ErrorCode::BlobMissing, key};
  return probe_file(path_of(key));
}

}  // namespace audiolib::media
