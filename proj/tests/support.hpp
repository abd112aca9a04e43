#pragma once

// Shared fixtures for the unit and acceptance tests: a scratch directory
// and an engine-level world with fast password hashing.

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "audiolib/catalog.hpp"
#include "audiolib/clock.hpp"
#include "audiolib/community.hpp"
#include "audiolib/crypto.hpp"
#include "audiolib/delivery.hpp"
#include "audiolib/harness/fixtures.hpp"
#include "audiolib/media.hpp"
#include "audiolib/notifications.hpp"
#include "audiolib/store.hpp"
#include "audiolib/workflow.hpp"

namespace audiolib::fixtures {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("audiolib-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::span<const std::byte> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

inline std::string pseudo_random_bytes(std::size_t n, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::string out(n, '\0');
  for (auto& c : out) c = static_cast<char>(rng() & 0xff);
  return out;
}

/// Inserts an Active account straight into the store.
inline AccountId insert_account(store::Store& s, Role role, const std::string& username, const std::string& password,
                                Timestamp at = 0) {
  UserAccount a;
  a.id = "acct-" + username;
  a.username = username;
  a.password_digest = crypto::hash_password(password, 1000);
  a.email = username + "@example.org";
  a.role = role;
  a.created_at = at;
  store::TransactionScope scope;
  scope.create(a);
  scope.create(UniqueKey{store::username_key(username), a.id});
  auto r = s.commit(scope);
  if (!r) throw std::runtime_error(r.error().describe());
  return a.id;
}

/// Engine, catalog, delivery and community over an in-memory store (or a
/// caller-supplied one) and a blob root in a scratch directory.
struct World {
  explicit World(std::unique_ptr<store::Store> s = store::Store::in_memory())
      : store(std::move(s)),
        media(dir.path() / "blobs"),
        engine(*store, media, sink, clock.clock(), EngineOptions{1000, 12, 8}),
        catalog(*store),
        delivery(*store, media, clock.clock()),
        community(*store, clock.clock()) {
    admin = engine.bootstrap_admin("admin", "admin-password", "admin@example.org").value();
  }

  /// Inserts an Active account directly, bypassing the application flow.
  AccountId add_account(Role role, const std::string& username) {
    return insert_account(*store, role, username, "password-" + username, clock.now());
  }

  /// Uploads bytes through the media protocol in one chunk and returns the
  /// committed session id.
  std::string upload(const AccountId& owner, const std::string& bytes) {
    auto id = media.begin_upload(owner, static_cast<std::int64_t>(bytes.size()), crypto::sha256_hex(bytes));
    if (!id) throw std::runtime_error(id.error().describe());
    auto c = media.put_chunk(*id, 0, as_bytes(bytes));
    if (!c) throw std::runtime_error(c.error().describe());
    auto f = media.finish_upload(*id);
    if (!f) throw std::runtime_error(f.error().describe());
    return *id;
  }

  /// A book requested by `impaired` and assigned to `reader`.
  BookCode assigned_book(const AccountId& impaired, const AccountId& reader, const std::string& title) {
    auto book = engine.request_book(impaired, title, "Author of " + title);
    if (!book) throw std::runtime_error(book.error().describe());
    auto claim = engine.claim_recording(reader, *book);
    if (!claim) throw std::runtime_error(claim.error().describe());
    auto ok = engine.review_claim(admin, *claim, Decision::Approve);
    if (!ok) throw std::runtime_error(ok.error().describe());
    return *book;
  }

  PartCode submit(const AccountId& reader, BookCode book, const std::string& name, int frames = 40) {
    harness::Mp3Spec spec;
    spec.frames = frames;
    spec.seed = static_cast<std::uint32_t>(book.value * 7 + frames);
    auto session = upload(reader, harness::synth_mp3(spec));
    auto part = engine.submit_part(reader, book, name, session);
    if (!part) throw std::runtime_error(part.error().describe());
    return *part;
  }

  TempDir dir;
  ManualClock clock;
  MemorySink sink;
  std::unique_ptr<store::Store> store;
  media::MediaStore media;
  WorkflowEngine engine;
  Catalog catalog;
  Delivery delivery;
  Community community;
  AccountId admin;
};

}  // namespace audiolib::fixtures
