#include "audiolib/result.hpp"

#include <array>
#include <utility>

namespace audiolib {
namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 42> kNames{{
    {ErrorCode::InvalidSequence, "InvalidSequence"},
    {ErrorCode::IllegalTransition, "IllegalTransition"},
    {ErrorCode::ValidationFailed, "ValidationFailed"},
    {ErrorCode::UsernameTaken, "UsernameTaken"},
    {ErrorCode::Forbidden, "Forbidden"},
    {ErrorCode::AlreadyDecided, "AlreadyDecided"},
    {ErrorCode::DuplicateDemand, "DuplicateDemand"},
    {ErrorCode::WrongState, "WrongState"},
    {ErrorCode::ClaimConflict, "ClaimConflict"},
    {ErrorCode::NotAssigned, "NotAssigned"},
    {ErrorCode::UploadIncomplete, "UploadIncomplete"},
    {ErrorCode::NoApprovedParts, "NoApprovedParts"},
    {ErrorCode::NotFound, "NotFound"},
    {ErrorCode::SizeRejected, "SizeRejected"},
    {ErrorCode::BadChecksumFormat, "BadChecksumFormat"},
    {ErrorCode::NoSuchSession, "NoSuchSession"},
    {ErrorCode::RangeRejected, "RangeRejected"},
    {ErrorCode::ChunkConflict, "ChunkConflict"},
    {ErrorCode::IncompleteUpload, "IncompleteUpload"},
    {ErrorCode::ChecksumMismatch, "ChecksumMismatch"},
    {ErrorCode::BlobMissing, "BlobMissing"},
    {ErrorCode::NotAudio, "NotAudio"},
    {ErrorCode::NotPublished, "NotPublished"},
    {ErrorCode::EmptyQuery, "EmptyQuery"},
    {ErrorCode::NoSuchUser, "NoSuchUser"},
    {ErrorCode::SelfMessage, "SelfMessage"},
    {ErrorCode::BodyTooLarge, "BodyTooLarge"},
    {ErrorCode::EmptyBody, "EmptyBody"},
    {ErrorCode::Duplicate, "Duplicate"},
    {ErrorCode::SelfFriend, "SelfFriend"},
    {ErrorCode::BadUrl, "BadUrl"},
    {ErrorCode::RateLimited, "RateLimited"},
    {ErrorCode::VersionConflict, "VersionConflict"},
    {ErrorCode::IntegrityViolation, "IntegrityViolation"},
    {ErrorCode::AuthFailed, "AuthFailed"},
    {ErrorCode::AccountDisabled, "AccountDisabled"},
    {ErrorCode::SessionExpired, "SessionExpired"},
    {ErrorCode::Unauthenticated, "Unauthenticated"},
    {ErrorCode::WeakPassword, "WeakPassword"},
    {ErrorCode::BadRequest, "BadRequest"},
    {ErrorCode::ConnectFailed, "ConnectFailed"},
    {ErrorCode::Internal, "Internal"},
}};

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Internal";
}

bool parse_error_code(std::string_view name, ErrorCode& out) noexcept {
  for (const auto& [c, n] : kNames) {
    if (n == name) {
      out = c;
      return true;
    }
  }
  return false;
}

}  // namespace audiolib
