#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "support.hpp"

using namespace audiolib;
using audiolib::fixtures::World;

TEST(Messages, DeliveryAndLimits) {
  World w;
  auto vol = w.add_account(Role::Volunteer, "vol");
  auto id = w.community.send_message(vol, "admin", "question");
  ASSERT_TRUE(id.ok());
  EXPECT_EQ(*w.community.unread_count(w.admin), 1u);
  EXPECT_EQ(w.community.send_message(vol, "vol", "hi").code(), ErrorCode::SelfMessage);
  EXPECT_EQ(w.community.send_message(vol, "admin", std::string(5000, 'x')).code(), ErrorCode::BodyTooLarge);
  EXPECT_TRUE(w.community.send_message(vol, "admin", std::string(4096, 'x')).ok());
  // the cap counts characters, not bytes
  std::string turkish;
  for (int i = 0; i < 4000; ++i) turkish += "ğ";
  EXPECT_TRUE(w.community.send_message(vol, "admin", turkish).ok());
  EXPECT_EQ(w.community.send_message(vol, "admin", "  ").code(), ErrorCode::EmptyBody);
  EXPECT_EQ(w.community.send_message(vol, "ghost", "hi").code(), ErrorCode::NoSuchUser);
}

TEST(Messages, InboxMarksReadNewestFirst) {
  World w;
  auto a = w.add_account(Role::Volunteer, "a");
  auto b = w.add_account(Role::Impaired, "b");
  auto empty = w.community.list_inbox(b);
  ASSERT_TRUE(empty.ok());
  EXPECT_TRUE(empty->messages.empty());
  EXPECT_EQ(empty->unread_before, 0u);

  ASSERT_TRUE(w.community.send_message(a, "b", "first").ok());
  w.clock.advance(5);
  ASSERT_TRUE(w.community.send_message(a, "b", "second").ok());
  EXPECT_EQ(*w.community.unread_count(b), 2u);
  auto inbox = w.community.list_inbox(b);
  ASSERT_EQ(inbox->messages.size(), 2u);
  EXPECT_EQ(inbox->unread_before, 2u);
  EXPECT_EQ(inbox->messages[0].body, "second");
  EXPECT_EQ(*w.community.unread_count(b), 0u);
  EXPECT_TRUE(w.community.list_inbox(a)->messages.empty());
}

TEST(Messages, IsolationAndUnreadCountsUnderFuzz) {
  World w;
  std::vector<AccountId> ids;
  std::vector<std::string> names;
  for (int i = 0; i < 5; ++i) {
    names.push_back("u" + std::to_string(i));
    ids.push_back(w.add_account(i % 2 ? Role::Impaired : Role::Volunteer, names.back()));
  }
  std::mt19937 rng(17);
  std::map<AccountId, std::size_t> unread;  // oracle
  std::map<AccountId, std::set<std::string>> received;
  for (int step = 0; step < 400; ++step) {
    const auto from = rng() % 5, to = rng() % 5;
    w.clock.advance(1);
    if (rng() % 4 == 0) {
      auto inbox = w.community.list_inbox(ids[from]);
      ASSERT_TRUE(inbox.ok());
      EXPECT_EQ(inbox->unread_before, unread[ids[from]]);
      std::set<std::string> got;
      for (const auto& m : inbox->messages) {
        EXPECT_EQ(m.to, ids[from]);
        got.insert(m.id);
      }
      EXPECT_EQ(got, received[ids[from]]);
      unread[ids[from]] = 0;
    } else {
      auto r = w.community.send_message(ids[from], names[to], "m" + std::to_string(step));
      if (from == to) {
        EXPECT_EQ(r.code(), ErrorCode::SelfMessage);
        continue;
      }
      ASSERT_TRUE(r.ok());
      ++unread[ids[to]];
      received[ids[to]].insert(*r);
    }
    for (const auto& id : ids) ASSERT_EQ(*w.community.unread_count(id), unread[id]);
  }
}

TEST(Friends, OneDirectionalLinks) {
  World w;
  auto a = w.add_account(Role::Volunteer, "a");
  auto b = w.add_account(Role::Impaired, "b");
  auto link = w.community.add_friend(a, "b");
  ASSERT_TRUE(link.ok());
  EXPECT_EQ(link->owner, a);
  EXPECT_EQ(link->friend_id, b);
  auto list = w.community.list_friends(a);
  ASSERT_EQ(list->size(), 1u);
  EXPECT_EQ(list->at(0).username, "b");
  EXPECT_TRUE(w.community.list_friends(b)->empty());
  EXPECT_EQ(w.community.add_friend(a, "b").code(), ErrorCode::Duplicate);
  EXPECT_EQ(w.community.add_friend(a, "a").code(), ErrorCode::SelfFriend);
  EXPECT_EQ(w.community.add_friend(a, "ghost").code(), ErrorCode::NoSuchUser);
}

TEST(Guestbook, ModerationAndRateCap) {
  World w;
  auto vol = w.add_account(Role::Volunteer, "vol");
  auto e1 = w.community.sign_guestbook("Ziyaretçi", "Çok güzel bir site", "10.0.0.1");
  ASSERT_TRUE(e1.ok());
  EXPECT_EQ(w.community.list_guestbook(false).size(), 1u);
  EXPECT_EQ(w.community.sign_guestbook("Ziyaretçi", "again", "10.0.0.1").code(), ErrorCode::RateLimited);
  EXPECT_TRUE(w.community.sign_guestbook("Other", "hello", "10.0.0.2").ok());
  w.clock.advance(kGuestbookInterval);
  EXPECT_TRUE(w.community.sign_guestbook("Ziyaretçi", "again", "10.0.0.1").ok());
  EXPECT_EQ(w.community.sign_guestbook("x", std::string(2001, 'y'), "10.0.0.3").code(), ErrorCode::BodyTooLarge);

  EXPECT_EQ(w.community.moderate_guestbook(vol, *e1, false).code(), ErrorCode::Forbidden);
  ASSERT_TRUE(w.community.moderate_guestbook(w.admin, *e1, false).ok());
  auto pub = w.community.list_guestbook(false);
  // oracle: exactly the visible entries
  std::size_t visible = 0;
  for (const auto& [k, v] : w.store->snapshot()->table<GuestbookEntry>()) visible += v.value.visible;
  EXPECT_EQ(pub.size(), visible);
  for (const auto& e : pub) EXPECT_NE(e.id, *e1);
  EXPECT_EQ(w.community.list_guestbook(true).size(), 3u);
  EXPECT_EQ(w.community.moderate_guestbook(w.admin, "gb-missing", true).code(), ErrorCode::NotFound);
}

TEST(Items, PublishRetractAndFeedOrder) {
  World w;
  auto imp = w.add_account(Role::Impaired, "imp");
  auto a = w.community.publish_item(w.admin, ItemKind::Announcement, "Yeni kitaplar", "Bu hafta üç kitap eklendi");
  ASSERT_TRUE(a.ok());
  w.clock.advance(10);
  auto l = w.community.publish_item(w.admin, ItemKind::Link, "Kütüphane", "https://example.org");
  ASSERT_TRUE(l.ok());
  EXPECT_EQ(w.community.publish_item(w.admin, ItemKind::Link, "Bad", "not a url").code(), ErrorCode::BadUrl);
  EXPECT_EQ(w.community.publish_item(imp, ItemKind::News, "x", "y").code(), ErrorCode::Forbidden);

  auto feed = w.community.list_items();
  ASSERT_EQ(feed.size(), 2u);
  EXPECT_EQ(feed[0].id, *l);
  EXPECT_EQ(feed[1].id, *a);
  ASSERT_TRUE(w.community.retract_item(w.admin, *l).ok());
  feed = w.community.list_items();
  ASSERT_EQ(feed.size(), 1u);
  EXPECT_EQ(feed[0].id, *a);
  EXPECT_EQ(w.community.retract_item(w.admin, *l).code(), ErrorCode::NotFound);

  // a fresh item never reuses a retracted id
  auto again = w.community.publish_item(w.admin, ItemKind::News, "n", "b");
  EXPECT_NE(*again, *l);
}
