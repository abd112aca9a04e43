#pragma once

// Helpers shared by the modules that commit transitions to the store.

#include <charconv>
#include <cctype>
#include <cstdio>
#include <string>

#include "audiolib/store.hpp"

namespace audiolib::detail {

inline constexpr int kMaxCommitAttempts = 256;

/// Runs attempt() until it returns something other than VersionConflict.
/// Each attempt must re-read a fresh snapshot.
template <class F>
auto retry_on_conflict(F&& attempt) -> decltype(attempt()) {
  for (int i = 0; i + 1 < kMaxCommitAttempts; ++i) {
    auto r = attempt();
    if (r.ok() || r.code() != ErrorCode::VersionConflict) return r;
  }
  return attempt();
}

/// Next "<prefix>-NNNNNNNN" id for table T: one past the largest in use.
template <class T>
std::string next_id(const store::State& state, const char* prefix) {
  const auto& table = state.table<T>();
  const std::string p = std::string(prefix) + "-";
  std::int64_t max = 0;
  // ids are zero-padded, so the lexicographically last one with the prefix is
  // the numerically largest
  auto it = table.lower_bound(p + "~");
  while (it != table.begin()) {
    --it;
    if (it->first.compare(0, p.size(), p) != 0) break;
    const char* b = it->first.data() + p.size();
    const char* e = it->first.data() + it->first.size();
    std::int64_t v = 0;
    if (std::from_chars(b, e, v).ec == std::errc{}) {
      max = v;
      break;
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08lld", static_cast<long long>(max + 1));
  return p + buf;
}

/// "<prefix>-NNNNNNNN" from the revision the commit will get. Unlike
/// next_id it never hands out an id again after its record was erased.
inline std::string revision_id(const store::State& state, const char* prefix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08llu", static_cast<unsigned long long>(state.revision() + 1));
  return std::string(prefix) + "-" + buf;
}

/// Active account with the given role, or Forbidden.
inline Result<const UserAccount*> require_role(const store::State& state, const AccountId& id, Role role) {
  const auto* acc = state.account(id);
  if (!acc || acc->status != AccountStatus::Active || acc->role != role) {
    return Error{ErrorCode::Forbidden, "requires " + std::string(to_string(role))};
  }
  return acc;
}

inline Result<const UserAccount*> require_active(const store::State& state, const AccountId& id) {
  const auto* acc = state.account(id);
  if (!acc || acc->status != AccountStatus::Active) return Error{ErrorCode::Forbidden, "inactive account"};
  return acc;
}

}  // namespace audiolib::detail
