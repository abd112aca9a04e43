#pragma once

#include <map>
#include <mutex>
#include <string>

#include "audiolib/clock.hpp"
#include "audiolib/domain.hpp"
#include "audiolib/result.hpp"

namespace audiolib::api {

struct Session {
  std::string token;
  AccountId account;
  Role role = Role::Volunteer;
  Timestamp created_at = 0;
  Timestamp expires_at = 0;
};

/// In-memory bearer sessions. Revoked and expired tokens are remembered
/// until their natural expiry so callers get SessionExpired, not
/// Unauthenticated, when they come back with them.
class SessionManager {
 public:
  SessionManager(Clock clock, Timestamp ttl_ms) : clock_(std::move(clock)), ttl_ms_(ttl_ms) {}

  Session issue(const AccountId& account, Role role);
  /// Unauthenticated for unknown tokens, SessionExpired for expired or
  /// revoked ones.
  Result<Session> resolve(const std::string& token) const;
  void revoke(const std::string& token);
  /// Revokes every live token of the account; returns how many.
  std::size_t revoke_account(const AccountId& account);

  /// Single-use tokens for the forgot-password flow.
  std::string issue_reset(const AccountId& account, Timestamp ttl_ms);
  Result<AccountId> redeem_reset(const std::string& token);

 private:
  struct Entry {
    Session session;
    bool revoked = false;
  };
  void prune_locked(Timestamp now);

  Clock clock_;
  Timestamp ttl_ms_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> sessions_;
  std::map<std::string, std::pair<AccountId, Timestamp>> resets_;
  std::size_t issued_since_prune_ = 0;
};

}  // namespace audiolib::api
