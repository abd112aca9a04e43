#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "audiolib/store.hpp"
#include "support.hpp"

using namespace audiolib;
using namespace audiolib::store;
using audiolib::fixtures::TempDir;

namespace {

UserAccount account(const std::string& id, Role role) {
  UserAccount a;
  a.id = id;
  a.username = id;
  a.email = id + "@example.org";
  a.role = role;
  return a;
}

Book book(std::int64_t code, const AccountId& requester) {
  Book b;
  b.code = BookCode{code};
  b.title = "Book " + std::to_string(code);
  b.author = "Author";
  b.requested_by = requester;
  return b;
}

void seed(Store& s) {
  TransactionScope t;
  t.create(account("imp", Role::Impaired));
  t.create(account("vol1", Role::Volunteer));
  t.create(account("vol2", Role::Volunteer));
  t.create(book(3001, "imp"));
  ASSERT_TRUE(s.commit(t).ok());
}

}  // namespace

TEST(Store, CommitPublishesNewRevision) {
  auto s = Store::in_memory();
  auto before = s->snapshot();
  seed(*s);
  auto after = s->snapshot();
  EXPECT_EQ(before->revision() + 1, after->revision());
  EXPECT_EQ(before->record_count(), 0u);
  EXPECT_EQ(after->record_count(), 4u);
  ASSERT_NE(after->book(BookCode{3001}), nullptr);
  EXPECT_EQ(after->find<Book>("3001")->version, 1u);
  // an older snapshot is unaffected
  EXPECT_EQ(before->book(BookCode{3001}), nullptr);
}

TEST(Store, StaleVersionConflicts) {
  auto s = Store::in_memory();
  seed(*s);
  auto snap = s->snapshot();
  const auto* b = snap->find<Book>("3001");

  Book claimed1 = b->value;
  claimed1.status = BookStatus::ClaimPending;
  TransactionScope t1;
  t1.update(claimed1, b->version);
  t1.create(RecordingClaim{"clm-1", BookCode{3001}, "vol1", ClaimStatus::Pending, 0});

  Book claimed2 = b->value;
  claimed2.status = BookStatus::ClaimPending;
  TransactionScope t2;
  t2.update(claimed2, b->version);
  t2.create(RecordingClaim{"clm-2", BookCode{3001}, "vol2", ClaimStatus::Pending, 0});

  EXPECT_TRUE(s->commit(t1).ok());
  EXPECT_EQ(s->commit(t2).code(), ErrorCode::VersionConflict);
  auto now = s->snapshot();
  EXPECT_NE(now->get<RecordingClaim>("clm-1"), nullptr);
  EXPECT_EQ(now->get<RecordingClaim>("clm-2"), nullptr);
}

TEST(Store, ConcurrentClaimCommitsOneWins) {
  for (int round = 0; round < 50; ++round) {
    auto s = Store::in_memory();
    seed(*s);
    auto snap = s->snapshot();
    const auto* b = snap->find<Book>("3001");
    std::atomic<int> applied{0}, conflicts{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; ++i) {
      threads.emplace_back([&, i] {
        Book next = b->value;
        next.status = BookStatus::ClaimPending;
        TransactionScope t;
        t.update(next, b->version);
        t.create(RecordingClaim{"clm-" + std::to_string(i), BookCode{3001}, i % 2 ? "vol1" : "vol2",
                                ClaimStatus::Pending, 0});
        auto r = s->commit(t);
        (r.ok() ? applied : conflicts)++;
        if (!r.ok()) EXPECT_EQ(r.code(), ErrorCode::VersionConflict);
      });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(applied.load(), 1);
    EXPECT_EQ(conflicts.load(), 3);
  }
}

TEST(Store, IntegrityViolationsAreRefused) {
  auto s = Store::in_memory();
  seed(*s);
  Part p;
  p.code = PartCode{999910};
  p.book = BookCode{9999};
  p.seq = 1;
  p.submitted_by = "vol1";
  TransactionScope t;
  t.create(p);
  EXPECT_EQ(s->commit(t).code(), ErrorCode::IntegrityViolation);

  TransactionScope claim;
  claim.create(RecordingClaim{"clm-x", BookCode{3001}, "ghost", ClaimStatus::Pending, 0});
  EXPECT_EQ(s->commit(claim).code(), ErrorCode::IntegrityViolation);

  // an InRecording book without a reader is structurally broken
  Book b = *s->snapshot()->book(BookCode{3001});
  b.status = BookStatus::InRecording;
  TransactionScope broken;
  broken.update(b, 1);
  EXPECT_EQ(s->commit(broken).code(), ErrorCode::IntegrityViolation);
  EXPECT_TRUE(check_integrity(*s->snapshot()).ok());
}

TEST(Store, DisjointCommitsBothApply) {
  auto s = Store::in_memory();
  seed(*s);
  TransactionScope a, b;
  a.create(book(3002, "imp"));
  b.create(book(3003, "imp"));
  EXPECT_TRUE(s->commit(a).ok());
  EXPECT_TRUE(s->commit(b).ok());
  EXPECT_EQ(s->snapshot()->table<Book>().size(), 3u);
}

TEST(Store, DuplicateCreateAndUniqueKeys) {
  auto s = Store::in_memory();
  seed(*s);
  TransactionScope a;
  a.create(UniqueKey{username_key("ayse"), "x"});
  EXPECT_TRUE(s->commit(a).ok());
  TransactionScope b;
  b.create(UniqueKey{username_key("ayse"), "y"});
  EXPECT_EQ(s->commit(b).code(), ErrorCode::VersionConflict);
}

TEST(Store, GuardFailsWhenAggregateMoved) {
  auto s = Store::in_memory();
  seed(*s);
  TransactionScope bump;
  Book b = *s->snapshot()->book(BookCode{3001});
  b.title = "Renamed";
  bump.update(b, 1);
  ASSERT_TRUE(s->commit(bump).ok());
  TransactionScope guarded;
  guarded.guard<Book>("3001", 1);
  guarded.create(book(3004, "imp"));
  EXPECT_EQ(s->commit(guarded).code(), ErrorCode::VersionConflict);
}

TEST(Store, EraseRequiresCurrentVersion) {
  auto s = Store::in_memory();
  seed(*s);
  TransactionScope add;
  add.create(PublishedItem{"itm-1", ItemKind::News, "t", "b", 0, "imp"});
  ASSERT_TRUE(s->commit(add).ok());
  TransactionScope stale;
  stale.erase<PublishedItem>("itm-1", 7);
  EXPECT_EQ(s->commit(stale).code(), ErrorCode::VersionConflict);
  // a record's version is the revision that last wrote it
  const auto version = s->snapshot()->find<PublishedItem>("itm-1")->version;
  EXPECT_EQ(version, s->snapshot()->revision());
  TransactionScope ok;
  ok.erase<PublishedItem>("itm-1", version);
  EXPECT_TRUE(s->commit(ok).ok());
  EXPECT_EQ(s->snapshot()->get<PublishedItem>("itm-1"), nullptr);
}

TEST(Store, RepeatedReadsAreIdentical) {
  auto s = Store::in_memory();
  seed(*s);
  auto a = s->snapshot();
  auto b = s->snapshot();
  EXPECT_TRUE(a->same_records(*b));
  EXPECT_EQ(a->revision(), b->revision());
}

TEST(Store, SnapshotsNeverSeeHalfCommits) {
  auto s = Store::in_memory();
  seed(*s);
  // each commit flips two records together; readers must see them agree
  std::atomic<bool> stop{false};
  std::atomic<int> torn{0};
  std::thread reader([&] {
    while (!stop) {
      auto snap = s->snapshot();
      const auto* a = snap->get<PublishedItem>("itm-a");
      const auto* b = snap->get<PublishedItem>("itm-b");
      if ((a == nullptr) != (b == nullptr)) ++torn;
      if (a && b && a->title != b->title) ++torn;
    }
  });
  for (int i = 0; i < 300; ++i) {
    auto snap = s->snapshot();
    TransactionScope t;
    const auto* a = snap->find<PublishedItem>("itm-a");
    const auto* b = snap->find<PublishedItem>("itm-b");
    const std::string title = std::to_string(i);
    PublishedItem ia{"itm-a", ItemKind::News, title, "x", 0, "imp"};
    PublishedItem ib{"itm-b", ItemKind::News, title, "x", 0, "imp"};
    if (a) {
      t.update(ia, a->version);
      t.update(ib, b->version);
    } else {
      t.create(ia);
      t.create(ib);
    }
    ASSERT_TRUE(s->commit(t).ok());
  }
  stop = true;
  reader.join();
  EXPECT_EQ(torn.load(), 0);
}

TEST(SqliteStore, RoundTripsEveryRecordKind) {
  TempDir dir;
  const auto db = dir.path() / "records.db";
  std::shared_ptr<const State> written;
  {
    auto s = Store::open(db);
    ASSERT_TRUE(s.ok()) << s.error().describe();
    seed(**s);
    TransactionScope t;
    t.create(MembershipApplication{"app-1", Role::Impaired, {"Name", "n@example.org", "u", "", ""}, std::nullopt,
                                   ApplicationStatus::Submitted, std::nullopt, std::nullopt, 5});
    t.create(Message{"msg-1", "imp", "vol1", "merhaba ğüş", 6, false});
    t.create(FriendLink{"imp", "vol1", 7});
    t.create(GuestbookEntry{"gb-1", "Ziyaretçi", "Teşekkürler", 8, true});
    t.create(PublishedItem{"itm-1", ItemKind::Link, "Link", "https://example.org", 9, "imp"});
    t.create(UniqueKey{"user:imp", "imp"});
    ASSERT_TRUE((*s)->commit(t).ok());
    written = (*s)->snapshot();
  }
  auto reopened = Store::open(db);
  ASSERT_TRUE(reopened.ok());
  auto read = (*reopened)->snapshot();
  EXPECT_TRUE(read->same_records(*written));
  EXPECT_EQ(read->revision(), written->revision());
}

TEST(SqliteStore, FailedPersistLeavesNothingBehind) {
  TempDir dir;
  const auto db = dir.path() / "records.db";
  std::shared_ptr<const State> committed;
  {
    SqliteOptions options;
    options.after_row_write = [](std::uint64_t revision, std::size_t rows) {
      if (revision == 2 && rows == 1) throw std::runtime_error("injected");
    };
    auto s = Store::open(db, options);
    ASSERT_TRUE(s.ok());
    seed(**s);
    committed = (*s)->snapshot();
    TransactionScope t;
    t.create(book(3002, "imp"));
    t.create(book(3003, "imp"));
    auto r = (*s)->commit(t);
    EXPECT_EQ(r.code(), ErrorCode::Internal);
    EXPECT_TRUE((*s)->snapshot()->same_records(*committed));
  }
  auto reopened = Store::open(db);
  ASSERT_TRUE(reopened.ok());
  EXPECT_TRUE((*reopened)->snapshot()->same_records(*committed));
  EXPECT_EQ((*reopened)->snapshot()->revision(), committed->revision());
}

TEST(Store, ObserverSeesBeforeAndAfter) {
  auto s = Store::in_memory();
  std::vector<std::pair<std::uint64_t, std::uint64_t>> seen;
  s->set_commit_observer([&](const State& before, const State& after) {
    seen.emplace_back(before.revision(), after.revision());
  });
  seed(*s);
  TransactionScope bad;
  bad.create(book(3001, "imp"));
  EXPECT_FALSE(s->commit(bad).ok());
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_EQ(seen[0], std::make_pair(std::uint64_t{0}, std::uint64_t{1}));
}
