#pragma once

// Transactional record store.
//
// The whole record set lives in an immutable State; readers grab a
// shared_ptr to the current one and never wait for writers. A commit builds
// the successor State, checks optimistic versions of every aggregate it
// touches and referential integrity, persists the changed rows through the
// backend, and only then publishes the new State.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "audiolib/domain.hpp"
#include "audiolib/result.hpp"

namespace audiolib::store {

template <class T>
struct RecordTraits;

#define AUDIOLIB_RECORD(Type, kind_name, key_expr)                 \
  template <>                                                      \
  struct RecordTraits<Type> {                                      \
    static constexpr const char* kind = kind_name;                 \
    static std::string key(const Type& r) { return (key_expr); }   \
  };

AUDIOLIB_RECORD(UserAccount, "account", r.id)
AUDIOLIB_RECORD(MembershipApplication, "application", r.id)
AUDIOLIB_RECORD(Book, "book", std::to_string(r.code.value))
AUDIOLIB_RECORD(RecordingClaim, "claim", r.id)
AUDIOLIB_RECORD(Part, "part", std::to_string(r.code.value))
AUDIOLIB_RECORD(PlaybackEvent, "playback", r.id)
AUDIOLIB_RECORD(Message, "message", r.id)
AUDIOLIB_RECORD(FriendLink, "friend", r.owner + "|" + r.friend_id)
AUDIOLIB_RECORD(GuestbookEntry, "guestbook", r.id)
AUDIOLIB_RECORD(PublishedItem, "item", r.id)
AUDIOLIB_RECORD(UniqueKey, "unique", r.key)

#undef AUDIOLIB_RECORD

inline std::string book_key(BookCode c) { return std::to_string(c.value); }
inline std::string part_key(PartCode c) { return std::to_string(c.value); }

using Record = std::variant<UserAccount, MembershipApplication, Book, RecordingClaim, Part,
                            PlaybackEvent, Message, FriendLink, GuestbookEntry, PublishedItem,
                            UniqueKey>;

template <class T>
struct Versioned {
  std::uint64_t version = 0;
  T value;
  bool operator==(const Versioned&) const = default;
};

template <class T>
using Table = std::map<std::string, Versioned<T>>;

class State {
 public:
  std::uint64_t revision() const noexcept { return revision_; }

  template <class T>
  const Table<T>& table() const {
    return std::get<Table<T>>(tables_);
  }

  template <class T>
  const Versioned<T>* find(const std::string& key) const {
    const auto& t = table<T>();
    auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
  }

  template <class T>
  const T* get(const std::string& key) const {
    const auto* v = find<T>(key);
    return v ? &v->value : nullptr;
  }

  const Book* book(BookCode c) const { return get<Book>(book_key(c)); }
  const Part* part(PartCode c) const { return get<Part>(part_key(c)); }
  const UserAccount* account(const AccountId& id) const { return get<UserAccount>(id); }
  const UserAccount* account_by_username(const std::string& username) const;

  /// Compares records and versions; the revision counter is ignored.
  bool same_records(const State& other) const { return tables_ == other.tables_; }

  std::size_t record_count() const;

 private:
  friend class Store;

  template <class T>
  Table<T>& mutable_table() {
    return std::get<Table<T>>(tables_);
  }

  std::uint64_t revision_ = 0;
  std::tuple<Table<UserAccount>, Table<MembershipApplication>, Table<Book>, Table<RecordingClaim>,
             Table<Part>, Table<PlaybackEvent>, Table<Message>, Table<FriendLink>,
             Table<GuestbookEntry>, Table<PublishedItem>, Table<UniqueKey>>
      tables_;
};

/// Key under which a username reservation is stored.
inline std::string username_key(const std::string& username) { return "user:" + username; }
inline std::string book_title_key(const std::string& normalized) { return "book:" + normalized; }

/// The writes (and read guards) of one transition.
class TransactionScope {
 public:
  enum class OpKind { Put, Erase, Guard };

  struct Op {
    OpKind kind = OpKind::Put;
    std::string record_kind;
    std::string key;
    std::uint64_t expected_version = 0;  // 0: must not exist yet
    std::optional<Record> record;
  };

  template <class T>
  TransactionScope& create(T value) {
    std::string key = RecordTraits<T>::key(value);
    return push(OpKind::Put, RecordTraits<T>::kind, std::move(key), 0, Record{std::move(value)});
  }

  template <class T>
  TransactionScope& update(T value, std::uint64_t expected_version) {
    std::string key = RecordTraits<T>::key(value);
    return push(OpKind::Put, RecordTraits<T>::kind, std::move(key), expected_version, Record{std::move(value)});
  }

  template <class T>
  TransactionScope& erase(const std::string& key, std::uint64_t expected_version) {
    return push(OpKind::Erase, RecordTraits<T>::kind, key, expected_version, std::nullopt);
  }

  /// Fails the commit if the aggregate changed since it was read.
  template <class T>
  TransactionScope& guard(const std::string& key, std::uint64_t expected_version) {
    return push(OpKind::Guard, RecordTraits<T>::kind, key, expected_version, std::nullopt);
  }

  const std::vector<Op>& ops() const noexcept { return ops_; }
  bool empty() const noexcept { return ops_.empty(); }

 private:
  TransactionScope& push(OpKind kind, const char* record_kind, std::string key,
                         std::uint64_t expected, std::optional<Record> record) {
    ops_.push_back(Op{kind, record_kind, std::move(key), expected, std::move(record)});
    return *this;
  }

  std::vector<Op> ops_;
};

/// Row-level persistence behind the store.
class Backend {
 public:
  struct Row {
    std::string kind;
    std::string key;
    std::uint64_t version = 0;
    std::string body;  // JSON; empty for deletions
    bool erased = false;
  };

  virtual ~Backend() = default;
  /// Loads every row; returns the persisted revision.
  virtual std::uint64_t load(std::vector<Row>& rows) = 0;
  /// Applies one commit atomically; throws on failure.
  virtual void persist(std::uint64_t revision, const std::vector<Row>& changes) = 0;
};

struct SqliteOptions {
  /// Test hook invoked after each row is written inside the open
  /// transaction. Used to simulate a crash part-way through a commit.
  std::function<void(std::uint64_t revision, std::size_t rows_written)> after_row_write;
};

Result<std::unique_ptr<Backend>> open_sqlite_backend(const std::filesystem::path& file,
                                                     SqliteOptions options = {});

class Store {
 public:
  using CommitObserver = std::function<void(const State& before, const State& after)>;

  explicit Store(std::unique_ptr<Backend> backend = nullptr);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  static std::unique_ptr<Store> in_memory();
  static Result<std::unique_ptr<Store>> open(const std::filesystem::path& db_file,
                                             SqliteOptions options = {});

  /// Point-in-time view; never observes a half-applied commit.
  std::shared_ptr<const State> snapshot() const;

  /// Atomically applies the scope. VersionConflict when a touched aggregate
  /// changed (or a create hit an existing key); IntegrityViolation when the
  /// result would reference missing records.
  Status commit(const TransactionScope& scope);

  /// Called under the commit lock after each successful commit.
  void set_commit_observer(CommitObserver observer);

 private:
  std::unique_ptr<Backend> backend_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const State> current_;
  std::mutex commit_mutex_;
  CommitObserver observer_;
};

/// Referential and structural integrity over a whole state.
Status check_integrity(const State& state);

}  // namespace audiolib::store
