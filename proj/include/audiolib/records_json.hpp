#pragma once

// JSON encodings of the domain records. Used for the record store rows and
// for API response bodies.

#include <json.hpp>

#include "audiolib/domain.hpp"

namespace audiolib {

void to_json(nlohmann::json& j, const BookCode& v);
void from_json(const nlohmann::json& j, BookCode& v);
void to_json(nlohmann::json& j, const PartCode& v);
void from_json(const nlohmann::json& j, PartCode& v);

void to_json(nlohmann::json& j, const UserAccount& v);
void from_json(const nlohmann::json& j, UserAccount& v);
void to_json(nlohmann::json& j, const ApplicantForm& v);
void from_json(const nlohmann::json& j, ApplicantForm& v);
void to_json(nlohmann::json& j, const MembershipApplication& v);
void from_json(const nlohmann::json& j, MembershipApplication& v);
void to_json(nlohmann::json& j, const Book& v);
void from_json(const nlohmann::json& j, Book& v);
void to_json(nlohmann::json& j, const RecordingClaim& v);
void from_json(const nlohmann::json& j, RecordingClaim& v);
void to_json(nlohmann::json& j, const Part& v);
void from_json(const nlohmann::json& j, Part& v);
void to_json(nlohmann::json& j, const PlaybackEvent& v);
void from_json(const nlohmann::json& j, PlaybackEvent& v);
void to_json(nlohmann::json& j, const Message& v);
void from_json(const nlohmann::json& j, Message& v);
void to_json(nlohmann::json& j, const FriendLink& v);
void from_json(const nlohmann::json& j, FriendLink& v);
void to_json(nlohmann::json& j, const GuestbookEntry& v);
void from_json(const nlohmann::json& j, GuestbookEntry& v);
void to_json(nlohmann::json& j, const PublishedItem& v);
void from_json(const nlohmann::json& j, PublishedItem& v);
void to_json(nlohmann::json& j, const UniqueKey& v);
void from_json(const nlohmann::json& j, UniqueKey& v);

/// Account view safe to send to clients (no password digest).
nlohmann::json public_view(const UserAccount& v);

}  // namespace audiolib
