#include "audiolib/community.hpp"

#include <algorithm>
#include <tuple>

#include "audiolib/text.hpp"
#include "engine_support.hpp"

namespace audiolib {

using store::TransactionScope;

Result<std::string> Community::send_message(const AccountId& from, const std::string& to_username,
                                            const std::string& body) {
  if (text::trim(body).empty()) return Error{ErrorCode::EmptyBody, "message body is empty"};
  if (text::count_code_points(body) > kMaxMessageChars) {
    return Error{ErrorCode::BodyTooLarge, "message exceeds " + std::to_string(kMaxMessageChars) + " characters"};
  }
  return detail::retry_on_conflict([&]() -> Result<std::string> {
    auto snap = store_.snapshot();
    if (auto a = detail::require_active(*snap, from); !a) return a.error();
    const UserAccount* to = snap->account_by_username(text::trim(to_username));
    if (!to || to->status != AccountStatus::Active) return Error{ErrorCode::NoSuchUser, to_username};
    if (to->id == from) return Error{ErrorCode::SelfMessage, "cannot message yourself"};
    Message m{detail::next_id<Message>(*snap, "msg"), from, to->id, body, clock_(), false};
    TransactionScope scope;
    scope.create(m);
    if (auto r = store_.commit(scope); !r) return r.error();
    return m.id;
  });
}

Result<Inbox> Community::list_inbox(const AccountId& caller) {
  return detail::retry_on_conflict([&]() -> Result<Inbox> {
    auto snap = store_.snapshot();
    if (auto a = detail::require_active(*snap, caller); !a) return a.error();
    Inbox inbox;
    TransactionScope scope;
    for (const auto& [key, v] : snap->table<Message>()) {
      if (v.value.to != caller) continue;
      inbox.messages.push_back(v.value);
      if (!v.value.read) {
        ++inbox.unread_before;
        Message read = v.value;
        read.read = true;
        scope.update(read, v.version);
      }
    }
    if (!scope.empty()) {
      if (auto r = store_.commit(scope); !r) return r.error();
    }
    std::sort(inbox.messages.begin(), inbox.messages.end(), [](const Message& a, const Message& b) {
      return std::tie(a.sent_at, a.id) > std::tie(b.sent_at, b.id);
    });
    return inbox;
  });
}

Result<std::size_t> Community::unread_count(const AccountId& caller) const {
  auto snap = store_.snapshot();
  if (auto a = detail::require_active(*snap, caller); !a) return a.error();
  std::size_t n = 0;
  for (const auto& [key, v] : snap->table<Message>()) {
    if (v.value.to == caller && !v.value.read) ++n;
  }
  return n;
}

Result<FriendLink> Community::add_friend(const AccountId& owner, const std::string& friend_username) {
  return detail::retry_on_conflict([&]() -> Result<FriendLink> {
    auto snap = store_.snapshot();
    if (auto a = detail::require_active(*snap, owner); !a) return a.error();
    const UserAccount* other = snap->account_by_username(text::trim(friend_username));
    if (!other || other->status != AccountStatus::Active) return Error{ErrorCode::NoSuchUser, friend_username};
    if (other->id == owner) return Error{ErrorCode::SelfFriend, "cannot befriend yourself"};
    FriendLink link{owner, other->id, clock_()};
    if (snap->find<FriendLink>(store::RecordTraits<FriendLink>::key(link))) {
      return Error{ErrorCode::Duplicate, friend_username + " is already a friend"};
    }
    TransactionScope scope;
    scope.create(link);
    if (auto r = store_.commit(scope); !r) return r.error();
    return link;
  });
}

Result<std::vector<FriendView>> Community::list_friends(const AccountId& owner) const {
  auto snap = store_.snapshot();
  if (auto a = detail::require_active(*snap, owner); !a) return a.error();
  std::vector<FriendView> out;
  const std::string prefix = owner + "|";
  const auto& links = snap->table<FriendLink>();
  for (auto it = links.lower_bound(prefix); it != links.end() && it->first.compare(0, prefix.size(), prefix) == 0;
       ++it) {
    const UserAccount* f = snap->account(it->second.value.friend_id);
    out.push_back(FriendView{it->second.value.friend_id, f ? f->username : "", it->second.value.added_at});
  }
  std::sort(out.begin(), out.end(), [](const FriendView& a, const FriendView& b) {
    return std::tie(a.added_at, a.account) < std::tie(b.added_at, b.account);
  });
  return out;
}

Result<std::string> Community::sign_guestbook(const std::string& author_name, const std::string& body,
                                              const std::string& source) {
  const std::string name = text::collapse_whitespace(author_name);
  if (name.empty()) return Error{ErrorCode::ValidationFailed, "author name required"};
  if (text::trim(body).empty()) return Error{ErrorCode::EmptyBody, "entry body is empty"};
  if (text::count_code_points(body) > kMaxGuestbookChars) {
    return Error{ErrorCode::BodyTooLarge, "entry exceeds " + std::to_string(kMaxGuestbookChars) + " characters"};
  }
  {
    std::lock_guard lock(rate_mutex_);
    const Timestamp now = clock_();
    auto it = last_post_.find(source);
    if (it != last_post_.end() && now - it->second < kGuestbookInterval) {
      return Error{ErrorCode::RateLimited, "one entry per minute"};
    }
    last_post_[source] = now;
  }
  auto result = detail::retry_on_conflict([&]() -> Result<std::string> {
    auto snap = store_.snapshot();
    GuestbookEntry e{detail::next_id<GuestbookEntry>(*snap, "gb"), name, body, clock_(), true};
    TransactionScope scope;
    scope.create(e);
    if (auto r = store_.commit(scope); !r) return r.error();
    return e.id;
  });
  if (!result) {
    std::lock_guard lock(rate_mutex_);
    last_post_.erase(source);
  }
  return result;
}

Status Community::moderate_guestbook(const AccountId& admin, const std::string& entry_id, bool visible) {
  return detail::retry_on_conflict([&]() -> Status {
    auto snap = store_.snapshot();
    if (auto a = detail::require_role(*snap, admin, Role::Admin); !a) return a.error();
    const auto* e = snap->find<GuestbookEntry>(entry_id);
    if (!e) return Error{ErrorCode::NotFound, entry_id};
    if (e->value.visible == visible) return ok_status();
    GuestbookEntry updated = e->value;
    updated.visible = visible;
    TransactionScope scope;
    scope.update(updated, e->version);
    return store_.commit(scope);
  });
}

std::vector<GuestbookEntry> Community::list_guestbook(bool include_hidden) const {
  auto snap = store_.snapshot();
  std::vector<GuestbookEntry> out;
  for (const auto& [key, v] : snap->table<GuestbookEntry>()) {
    if (include_hidden || v.value.visible) out.push_back(v.value);
  }
  std::sort(out.begin(), out.end(), [](const GuestbookEntry& a, const GuestbookEntry& b) {
    return std::tie(a.posted_at, a.id) > std::tie(b.posted_at, b.id);
  });
  return out;
}

Result<std::string> Community::publish_item(const AccountId& admin, ItemKind kind, const std::string& title,
                                            const std::string& body_or_url) {
  const std::string clean_title = text::collapse_whitespace(title);
  if (clean_title.empty()) return Error{ErrorCode::ValidationFailed, "title required"};
  std::string content = body_or_url;
  if (kind == ItemKind::Link) {
    content = text::trim(body_or_url);
    if (!text::is_absolute_url(content)) return Error{ErrorCode::BadUrl, body_or_url};
  }
  return detail::retry_on_conflict([&]() -> Result<std::string> {
    auto snap = store_.snapshot();
    if (auto a = detail::require_role(*snap, admin, Role::Admin); !a) return a.error();
    PublishedItem item{detail::revision_id(*snap, "item"), kind, clean_title, content, clock_(), admin};
    TransactionScope scope;
    scope.create(item);
    if (auto r = store_.commit(scope); !r) return r.error();
    return item.id;
  });
}

Status Community::retract_item(const AccountId& admin, const std::string& item_id) {
  return detail::retry_on_conflict([&]() -> Status {
    auto snap = store_.snapshot();
    if (auto a = detail::require_role(*snap, admin, Role::Admin); !a) return a.error();
    const auto* item = snap->find<PublishedItem>(item_id);
    if (!item) return Error{ErrorCode::NotFound, item_id};
    TransactionScope scope;
    scope.erase<PublishedItem>(item_id, item->version);
    return store_.commit(scope);
  });
}

std::vector<PublishedItem> Community::list_items() const {
  auto snap = store_.snapshot();
  std::vector<PublishedItem> out;
  for (const auto& [key, v] : snap->table<PublishedItem>()) out.push_back(v.value);
  std::sort(out.begin(), out.end(), [](const PublishedItem& a, const PublishedItem& b) {
    return std::tie(a.published_at, a.id) > std::tie(b.published_at, b.id);
  });
  return out;
}

}  // namespace audiolib
