#include "audiolib/store.hpp"

#include <sqlite3.h>

#include <stdexcept>
#include <utility>

#include "audiolib/records_json.hpp"

namespace audiolib::store {
namespace {

using AllRecords = std::tuple<UserAccount, MembershipApplication, Book, RecordingClaim, Part,
                              PlaybackEvent, Message, FriendLink, GuestbookEntry, PublishedItem,
                              UniqueKey>;

// Calls fn.template operator()<T>() for the record type whose kind matches.
template <class Fn>
bool dispatch_kind(const std::string& kind, Fn&& fn) {
  return std::apply(
      [&](auto... tag) {
        bool found = false;
        ((found = found || [&] {
           using T = decltype(tag);
           if (kind != RecordTraits<T>::kind) return false;
           fn.template operator()<T>();
           return true;
         }()),
         ...);
        return found;
      },
      AllRecords{});
}

Status violation(std::string what) { return Error{ErrorCode::IntegrityViolation, std::move(what)}; }

bool has_account(const State& s, const std::optional<AccountId>& id) { return !id || s.account(*id); }

Status check_record(const State&, const UserAccount&) { return ok_status(); }
Status check_record(const State&, const GuestbookEntry&) { return ok_status(); }
Status check_record(const State&, const UniqueKey&) { return ok_status(); }

Status check_record(const State& s, const MembershipApplication& a) {
  if (!has_account(s, a.decided_by)) return violation("application decided by unknown account");
  if (!has_account(s, a.account)) return violation("application linked to unknown account");
  return ok_status();
}

Status check_record(const State& s, const Book& b) {
  if (!has_account(s, b.requested_by)) return violation("book requested by unknown account");
  if (!has_account(s, b.assigned_reader)) return violation("book assigned to unknown account");
  if (!book_is_consistent(b)) return violation("book status inconsistent with assigned reader");
  return ok_status();
}

Status check_record(const State& s, const RecordingClaim& c) {
  if (!s.book(c.book)) return violation("claim on unknown book " + book_key(c.book));
  if (!s.account(c.volunteer)) return violation("claim by unknown volunteer");
  return ok_status();
}

Status check_record(const State& s, const Part& p) {
  if (!s.book(p.book)) return violation("part " + part_key(p.code) + " references unknown book");
  if (!s.account(p.submitted_by)) return violation("part submitted by unknown account");
  auto decoded = decode_part_code(p.code);
  if (!decoded || decoded->book != p.book) return violation("part code does not encode its book");
  return ok_status();
}

Status check_record(const State& s, const PlaybackEvent& e) {
  const Part* part = s.part(e.part);
  if (!part) return violation("playback of unknown part");
  if (part->status != PartStatus::Approved) return violation("playback of unapproved part");
  if (part->book != e.book) return violation("playback book mismatch");
  if (!s.account(e.listener)) return violation("playback by unknown account");
  return ok_status();
}

Status check_record(const State& s, const Message& m) {
  if (!s.account(m.from) || !s.account(m.to)) return violation("message between unknown accounts");
  return ok_status();
}

Status check_record(const State& s, const FriendLink& f) {
  if (!s.account(f.owner) || !s.account(f.friend_id)) return violation("friend link to unknown account");
  return ok_status();
}

Status check_record(const State& s, const PublishedItem& i) {
  if (!s.account(i.author)) return violation("item by unknown author");
  return ok_status();
}

// ---------------------------------------------------------------------------
// SQLite backend

struct SqliteCloser {
  void operator()(sqlite3* db) const { sqlite3_close_v2(db); }
};
struct StmtCloser {
  void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
};
using DbHandle = std::unique_ptr<sqlite3, SqliteCloser>;
using StmtHandle = std::unique_ptr<sqlite3_stmt, StmtCloser>;

constexpr int kSchemaVersion = 1;

class SqliteBackend final : public Backend {
 public:
  SqliteBackend(DbHandle db, SqliteOptions options) : db_(std::move(db)), options_(std::move(options)) {}

  std::uint64_t load(std::vector<Row>& rows) override {
    auto stmt = prepare("SELECT kind, key, version, body FROM records");
    while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
      Row r;
      r.kind = column_text(stmt.get(), 0);
      r.key = column_text(stmt.get(), 1);
      r.version = static_cast<std::uint64_t>(sqlite3_column_int64(stmt.get(), 2));
      r.body = column_text(stmt.get(), 3);
      rows.push_back(std::move(r));
    }
    auto rev = prepare("SELECT value FROM meta WHERE key = 'revision'");
    if (sqlite3_step(rev.get()) == SQLITE_ROW) {
      return static_cast<std::uint64_t>(std::stoull(column_text(rev.get(), 0)));
    }
    return 0;
  }

  void persist(std::uint64_t revision, const std::vector<Row>& changes) override {
    exec("BEGIN IMMEDIATE");
    try {
      auto upsert = prepare("INSERT OR REPLACE INTO records(kind, key, version, body) VALUES (?, ?, ?, ?)");
      auto remove = prepare("DELETE FROM records WHERE kind = ? AND key = ?");
      std::size_t written = 0;
      for (const auto& row : changes) {
        sqlite3_stmt* s = row.erased ? remove.get() : upsert.get();
        sqlite3_reset(s);
        sqlite3_bind_text(s, 1, row.kind.c_str(), -1, SQLITE_TRANSIENT);
        sqlite3_bind_text(s, 2, row.key.c_str(), -1, SQLITE_TRANSIENT);
        if (!row.erased) {
          sqlite3_bind_int64(s, 3, static_cast<sqlite3_int64>(row.version));
          sqlite3_bind_text(s, 4, row.body.c_str(), -1, SQLITE_TRANSIENT);
        }
        if (sqlite3_step(s) != SQLITE_DONE) throw std::runtime_error(sqlite3_errmsg(db_.get()));
        ++written;
        if (options_.after_row_write) options_.after_row_write(revision, written);
      }
      auto rev = prepare("INSERT OR REPLACE INTO meta(key, value) VALUES ('revision', ?)");
      const std::string text = std::to_string(revision);
      sqlite3_bind_text(rev.get(), 1, text.c_str(), -1, SQLITE_TRANSIENT);
      if (sqlite3_step(rev.get()) != SQLITE_DONE) throw std::runtime_error(sqlite3_errmsg(db_.get()));
      exec("COMMIT");
    } catch (...) {
      sqlite3_exec(db_.get(), "ROLLBACK", nullptr, nullptr, nullptr);
      throw;
    }
  }

  void bootstrap() {
    exec("PRAGMA journal_mode = WAL");
    exec("PRAGMA synchronous = NORMAL");
    exec("CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL)");
    exec("CREATE TABLE IF NOT EXISTS records (kind TEXT NOT NULL, key TEXT NOT NULL, "
         "version INTEGER NOT NULL, body TEXT NOT NULL, PRIMARY KEY (kind, key))");
    auto stmt = prepare("SELECT value FROM meta WHERE key = 'schema_version'");
    if (sqlite3_step(stmt.get()) == SQLITE_ROW) {
      const int found = std::stoi(column_text(stmt.get(), 0));
      if (found != kSchemaVersion) {
        throw std::runtime_error("unsupported schema version " + std::to_string(found));
      }
    } else {
      exec("INSERT INTO meta(key, value) VALUES ('schema_version', '" + std::to_string(kSchemaVersion) + "')");
    }
  }

 private:
  static std::string column_text(sqlite3_stmt* s, int col) {
    const auto* p = sqlite3_column_text(s, col);
    return p ? std::string(reinterpret_cast<const char*>(p)) : std::string();
  }

  StmtHandle prepare(const std::string& sql) {
    sqlite3_stmt* raw = nullptr;
    if (sqlite3_prepare_v2(db_.get(), sql.c_str(), -1, &raw, nullptr) != SQLITE_OK) {
      throw std::runtime_error(sqlite3_errmsg(db_.get()));
    }
    return StmtHandle(raw);
  }

  void exec(const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_.get(), sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "sqlite error";
      sqlite3_free(err);
      throw std::runtime_error(msg);
    }
  }

  DbHandle db_;
  SqliteOptions options_;
};

}  // namespace

const UserAccount* State::account_by_username(const std::string& username) const {
  const auto* reservation = get<UniqueKey>(username_key(username));
  if (reservation) {
    if (const auto* acc = account(reservation->owner)) return acc;
  }
  return nullptr;
}

std::size_t State::record_count() const {
  return std::apply([](const auto&... t) { return (t.size() + ...); }, tables_);
}

Status check_integrity(const State& state) {
  Status result = ok_status();
  std::apply(
      [&](auto... tag) {
        (
            [&] {
              using T = decltype(tag);
              if (!result) return;
              for (const auto& [key, v] : state.table<T>()) {
                auto r = check_record(state, v.value);
                if (!r) {
                  result = r;
                  return;
                }
              }
            }(),
            ...);
      },
      AllRecords{});
  return result;
}

Result<std::unique_ptr<Backend>> open_sqlite_backend(const std::filesystem::path& file,
                                                     SqliteOptions options) {
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  sqlite3* raw = nullptr;
  const int rc = sqlite3_open_v2(file.c_str(), &raw, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr);
  DbHandle db(raw);
  if (rc != SQLITE_OK) {
    return Error{ErrorCode::Internal, "cannot open " + file.string() + ": " + sqlite3_errmsg(raw)};
  }
  sqlite3_busy_timeout(db.get(), 5000);
  auto backend = std::make_unique<SqliteBackend>(std::move(db), std::move(options));
  try {
    backend->bootstrap();
  } catch (const std::exception& e) {
    return Error{ErrorCode::Internal, e.what()};
  }
  return std::unique_ptr<Backend>(std::move(backend));
}

Store::Store(std::unique_ptr<Backend> backend) : backend_(std::move(backend)) {
  auto state = std::make_shared<State>();
  if (backend_) {
    std::vector<Backend::Row> rows;
    state->revision_ = backend_->load(rows);
    for (const auto& row : rows) {
      const bool known = dispatch_kind(row.kind, [&]<class T>() {
        T value = nlohmann::json::parse(row.body).get<T>();
        state->mutable_table<T>()[row.key] = Versioned<T>{row.version, std::move(value)};
      });
      if (!known) throw std::runtime_error("unknown record kind " + row.kind);
    }
  }
  current_ = std::move(state);
}

Store::~Store() = default;

std::unique_ptr<Store> Store::in_memory() { return std::make_unique<Store>(); }

Result<std::unique_ptr<Store>> Store::open(const std::filesystem::path& db_file, SqliteOptions options) {
  auto backend = open_sqlite_backend(db_file, std::move(options));
  if (!backend) return backend.error();
  try {
    return std::make_unique<Store>(std::move(backend).value());
  } catch (const std::exception& e) {
    return Error{ErrorCode::Internal, e.what()};
  }
}

std::shared_ptr<const State> Store::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

void Store::set_commit_observer(CommitObserver observer) {
  std::lock_guard lock(commit_mutex_);
  observer_ = std::move(observer);
}

Status Store::commit(const TransactionScope& scope) {
  std::lock_guard lock(commit_mutex_);
  const std::shared_ptr<const State> before = snapshot();
  const std::uint64_t revision = before->revision() + 1;

  // Version checks run against the state the caller could have read.
  for (const auto& op : scope.ops()) {
    std::uint64_t current = 0;
    dispatch_kind(op.record_kind, [&]<class T>() {
      if (const auto* v = before->find<T>(op.key)) current = v->version;
    });
    if (current != op.expected_version) {
      return Error{ErrorCode::VersionConflict, op.record_kind + "/" + op.key};
    }
  }

  auto after = std::make_shared<State>(*before);
  after->revision_ = revision;
  std::vector<Backend::Row> changes;
  for (const auto& op : scope.ops()) {
    if (op.kind == TransactionScope::OpKind::Guard) continue;
    dispatch_kind(op.record_kind, [&]<class T>() {
      auto& table = after->mutable_table<T>();
      if (op.kind == TransactionScope::OpKind::Erase) {
        table.erase(op.key);
        changes.push_back(Backend::Row{op.record_kind, op.key, revision, {}, true});
      } else {
        const T& value = std::get<T>(*op.record);
        table[op.key] = Versioned<T>{revision, value};
        changes.push_back(Backend::Row{op.record_kind, op.key, revision, nlohmann::json(value).dump(), false});
      }
    });
  }

  for (const auto& op : scope.ops()) {
    if (op.kind != TransactionScope::OpKind::Put) continue;
    auto r = std::visit([&](const auto& rec) { return check_record(*after, rec); }, *op.record);
    if (!r) return r;
  }

  if (backend_) {
    try {
      backend_->persist(revision, changes);
    } catch (const std::exception& e) {
      return Error{ErrorCode::Internal, std::string("persist failed: ") + e.what()};
    }
  }

  {
    std::lock_guard snap(snapshot_mutex_);
    current_ = after;
  }
  if (observer_) observer_(*before, *after);
  return ok_status();
}

}  // namespace audiolib::store
