#include "audiolib/api/sessions.hpp"

#include "audiolib/crypto.hpp"

namespace audiolib::api {

Session SessionManager::issue(const AccountId& account, Role role) {
  const Timestamp now = clock_();
  Session s{crypto::random_token(), account, role, now, now + ttl_ms_};
  std::lock_guard lock(mutex_);
  if (++issued_since_prune_ >= 1024) prune_locked(now);
  sessions_[s.token] = Entry{s, false};
  return s;
}

Result<Session> SessionManager::resolve(const std::string& token) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) return Error{ErrorCode::Unauthenticated, "unknown session"};
  if (it->second.revoked || clock_() >= it->second.session.expires_at) {
    return Error{ErrorCode::SessionExpired, "session is no longer valid"};
  }
  return it->second.session;
}

void SessionManager::revoke(const std::string& token) {
  std::lock_guard lock(mutex_);
  if (auto it = sessions_.find(token); it != sessions_.end()) it->second.revoked = true;
}

std::size_t SessionManager::revoke_account(const AccountId& account) {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (auto& [token, e] : sessions_) {
    if (e.session.account == account && !e.revoked) {
      e.revoked = true;
      ++n;
    }
  }
  return n;
}

std::string SessionManager::issue_reset(const AccountId& account, Timestamp ttl_ms) {
  std::string token = crypto::random_token();
  std::lock_guard lock(mutex_);
  resets_[token] = {account, clock_() + ttl_ms};
  return token;
}

Result<AccountId> SessionManager::redeem_reset(const std::string& token) {
  std::lock_guard lock(mutex_);
  auto it = resets_.find(token);
  if (it == resets_.end()) return Error{ErrorCode::AuthFailed, "invalid or used reset token"};
  auto [account, expires] = it->second;
  resets_.erase(it);
  if (clock_() >= expires) return Error{ErrorCode::AuthFailed, "invalid or used reset token"};
  return account;
}

void SessionManager::prune_locked(Timestamp now) {
  issued_since_prune_ = 0;
  std::erase_if(sessions_, [now](const auto& kv) { return now >= kv.second.session.expires_at; });
  std::erase_if(resets_, [now](const auto& kv) { return now >= kv.second.second; });
}

}  // namespace audiolib::api
