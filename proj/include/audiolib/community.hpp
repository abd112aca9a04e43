#pragma once

// Messaging, friend lists, the visitors' guestbook and admin-published
// home page items.

#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "audiolib/clock.hpp"
#include "audiolib/domain.hpp"
#include "audiolib/result.hpp"
#include "audiolib/store.hpp"

namespace audiolib {

inline constexpr std::size_t kMaxMessageChars = 4096;
inline constexpr std::size_t kMaxGuestbookChars = 2000;
inline constexpr Timestamp kGuestbookInterval = 60'000;

struct Inbox {
  std::vector<Message> messages;  // newest first
  std::size_t unread_before = 0;  // unread count at the moment of reading
};

struct FriendView {
  AccountId account;
  std::string username;
  Timestamp added_at = 0;
};

class Community {
 public:
  Community(store::Store& store, Clock clock) : store_(store), clock_(std::move(clock)) {}

  Result<std::string> send_message(const AccountId& from, const std::string& to_username, const std::string& body);
  /// Returns every message addressed to the caller and marks them read.
  Result<Inbox> list_inbox(const AccountId& caller);
  Result<std::size_t> unread_count(const AccountId& caller) const;

  Result<FriendLink> add_friend(const AccountId& owner, const std::string& friend_username);
  Result<std::vector<FriendView>> list_friends(const AccountId& owner) const;

  /// Open to anonymous visitors. `source` identifies the poster for the
  /// rate cap: the account id when signed in, the remote address otherwise.
  Result<std::string> sign_guestbook(const std::string& author_name, const std::string& body,
                                     const std::string& source);
  Status moderate_guestbook(const AccountId& admin, const std::string& entry_id, bool visible);
  /// Newest first. Hidden entries only when include_hidden (admin views).
  std::vector<GuestbookEntry> list_guestbook(bool include_hidden) const;

  Result<std::string> publish_item(const AccountId& admin, ItemKind kind, const std::string& title,
                                   const std::string& body_or_url);
  Status retract_item(const AccountId& admin, const std::string& item_id);
  /// Newest first.
  std::vector<PublishedItem> list_items() const;

 private:
  store::Store& store_;
  Clock clock_;
  std::mutex rate_mutex_;
  std::map<std::string, Timestamp> last_post_;
};

}  // namespace audiolib
