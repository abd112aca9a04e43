#pragma once

#include <cassert>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace audiolib {

// Every failure the service can report. The names double as the stable
// "error" field of JSON error bodies, so renaming one is a wire change.
enum class ErrorCode {
  // domain model
  InvalidSequence,
  IllegalTransition,
  ValidationFailed,
  // workflow
  UsernameTaken,
  Forbidden,
  AlreadyDecided,
  DuplicateDemand,
  WrongState,
  ClaimConflict,
  NotAssigned,
  UploadIncomplete,
  NoApprovedParts,
  NotFound,
  // media
  SizeRejected,
  BadChecksumFormat,
  NoSuchSession,
  RangeRejected,
  ChunkConflict,
  IncompleteUpload,
  ChecksumMismatch,
  BlobMissing,
  NotAudio,
  NotPublished,
  // catalog / community
  EmptyQuery,
  NoSuchUser,
  SelfMessage,
  BodyTooLarge,
  EmptyBody,
  Duplicate,
  SelfFriend,
  BadUrl,
  RateLimited,
  // persistence
  VersionConflict,
  IntegrityViolation,
  // api
  AuthFailed,
  AccountDisabled,
  SessionExpired,
  Unauthenticated,
  WeakPassword,
  BadRequest,
  // client
  ConnectFailed,
  Internal,
};

std::string_view to_string(ErrorCode code) noexcept;
bool parse_error_code(std::string_view name, ErrorCode& out) noexcept;

struct Error {
  ErrorCode code = ErrorCode::Internal;
  std::string detail;

  Error() = default;
  Error(ErrorCode c, std::string d = {}) : code(c), detail(std::move(d)) {}

  std::string describe() const {
    std::string out{to_string(code)};
    if (!detail.empty()) {
      out += ": ";
      out += detail;
    }
    return out;
  }
};

// Value-or-error. Failures are ordinary values here; exceptions are kept for
// programming errors and I/O faults that cannot be reported any other way.
template <class T>
class [[nodiscard]] Result {
 public:
  Result(T value) : state_(std::in_place_index<0>, std::move(value)) {}
  Result(Error error) : state_(std::in_place_index<1>, std::move(error)) {}
  Result(ErrorCode code, std::string detail = {})
      : state_(std::in_place_index<1>, Error{code, std::move(detail)}) {}

  bool ok() const noexcept { return state_.index() == 0; }
  explicit operator bool() const noexcept { return ok(); }

  T& value() & {
    assert(ok());
    return std::get<0>(state_);
  }
  const T& value() const& {
    assert(ok());
    return std::get<0>(state_);
  }
  // by value, so a range-for over a temporary result stays valid
  T value() && {
    assert(ok());
    return std::get<0>(std::move(state_));
  }

  const Error& error() const {
    assert(!ok());
    return std::get<1>(state_);
  }
  ErrorCode code() const { return error().code; }

  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }
  T& operator*() & { return value(); }
  const T& operator*() const& { return value(); }
  T operator*() && { return std::move(*this).value(); }

 private:
  std::variant<T, Error> state_;
};

using Status = Result<std::monostate>;

inline Status ok_status() { return std::monostate{}; }

}  // namespace audiolib
