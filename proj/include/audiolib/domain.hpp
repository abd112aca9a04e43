#pragma once

// Domain records and the pure lifecycle rules shared by every other module.
// Nothing in here touches storage, clocks or the network.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "audiolib/result.hpp"

namespace audiolib {

/// Milliseconds since the Unix epoch.
using Timestamp = std::int64_t;
using AccountId = std::string;

struct BookCode {
  std::int64_t value = 0;
  auto operator<=>(const BookCode&) const = default;
};

struct PartCode {
  std::int64_t value = 0;
  auto operator<=>(const PartCode&) const = default;
};

enum class Role { Volunteer, Impaired, Admin };
enum class AccountStatus { Active, Disabled };
enum class ApplicationStatus { Submitted, Approved, Rejected };
enum class BookStatus { Requested, ClaimPending, InRecording, Completed };
enum class BookEvent { ClaimFiled, ClaimApproved, ClaimRejected, MarkedComplete };
enum class ClaimStatus { Pending, Approved, Rejected };
enum class PartStatus { PendingApproval, Approved, Rejected };
enum class Decision { Approve, Reject };
enum class PlaybackMode { Stream, Download };
enum class ItemKind { News, Announcement, Link };

std::string_view to_string(Role v) noexcept;
std::string_view to_string(AccountStatus v) noexcept;
std::string_view to_string(ApplicationStatus v) noexcept;
std::string_view to_string(BookStatus v) noexcept;
std::string_view to_string(BookEvent v) noexcept;
std::string_view to_string(ClaimStatus v) noexcept;
std::string_view to_string(PartStatus v) noexcept;
std::string_view to_string(Decision v) noexcept;
std::string_view to_string(PlaybackMode v) noexcept;
std::string_view to_string(ItemKind v) noexcept;

std::optional<Role> parse_role(std::string_view s) noexcept;
std::optional<AccountStatus> parse_account_status(std::string_view s) noexcept;
std::optional<ApplicationStatus> parse_application_status(std::string_view s) noexcept;
std::optional<BookStatus> parse_book_status(std::string_view s) noexcept;
std::optional<ClaimStatus> parse_claim_status(std::string_view s) noexcept;
std::optional<PartStatus> parse_part_status(std::string_view s) noexcept;
std::optional<Decision> parse_decision(std::string_view s) noexcept;
std::optional<PlaybackMode> parse_playback_mode(std::string_view s) noexcept;
std::optional<ItemKind> parse_item_kind(std::string_view s) noexcept;

struct UserAccount {
  AccountId id;
  std::string username;
  std::string password_digest;
  std::string email;
  Role role = Role::Volunteer;
  AccountStatus status = AccountStatus::Active;
  Timestamp created_at = 0;

  bool operator==(const UserAccount&) const = default;
};

struct ApplicantForm {
  std::string full_name;
  std::string email;
  std::string username;
  std::string phone;
  std::string notes;

  bool operator==(const ApplicantForm&) const = default;
};

struct MembershipApplication {
  std::string id;
  Role desired_role = Role::Volunteer;
  ApplicantForm form;
  std::optional<std::string> trial_recording;  // blob key
  ApplicationStatus status = ApplicationStatus::Submitted;
  std::optional<AccountId> decided_by;
  std::optional<AccountId> account;  // set once approved
  Timestamp submitted_at = 0;

  bool operator==(const MembershipApplication&) const = default;
};

struct Book {
  BookCode code;
  std::string title;
  std::string author;
  std::optional<AccountId> requested_by;
  std::optional<AccountId> assigned_reader;
  BookStatus status = BookStatus::Requested;
  Timestamp requested_at = 0;

  bool operator==(const Book&) const = default;
};

struct RecordingClaim {
  std::string id;
  BookCode book;
  AccountId volunteer;
  ClaimStatus status = ClaimStatus::Pending;
  Timestamp filed_at = 0;

  bool operator==(const RecordingClaim&) const = default;
};

struct Part {
  PartCode code;
  BookCode book;
  int seq = 0;
  std::string name;
  std::optional<double> duration_seconds;
  Timestamp added_at = 0;
  AccountId submitted_by;
  std::string audio;           // blob key
  std::string upload_session;  // the session the blob came from
  std::int64_t size_bytes = 0;
  PartStatus status = PartStatus::PendingApproval;

  bool operator==(const Part&) const = default;
};

struct PlaybackEvent {
  std::string id;
  PartCode part;
  BookCode book;
  AccountId listener;
  Timestamp at = 0;
  PlaybackMode mode = PlaybackMode::Stream;

  bool operator==(const PlaybackEvent&) const = default;
};

struct Message {
  std::string id;
  AccountId from;
  AccountId to;
  std::string body;
  Timestamp sent_at = 0;
  bool read = false;

  bool operator==(const Message&) const = default;
};

struct FriendLink {
  AccountId owner;
  AccountId friend_id;
  Timestamp added_at = 0;

  bool operator==(const FriendLink&) const = default;
};

struct GuestbookEntry {
  std::string id;
  std::string author_name;
  std::string body;
  Timestamp posted_at = 0;
  bool visible = true;

  bool operator==(const GuestbookEntry&) const = default;
};

struct PublishedItem {
  std::string id;
  ItemKind kind = ItemKind::News;
  std::string title;
  std::string body_or_url;
  Timestamp published_at = 0;
  AccountId author;

  bool operator==(const PublishedItem&) const = default;
};

/// Reservation of a unique natural key (a username or a normalized
/// title/author pair). Creating one that already exists conflicts, which
/// is how the store enforces uniqueness across concurrent writers.
struct UniqueKey {
  std::string key;
  std::string owner;

  bool operator==(const UniqueKey&) const = default;
};

// ---------------------------------------------------------------------------
// Part codes

inline constexpr int kMaxPartsPerBook = 90;

/// book_code * 100 + 9 + seq, for seq in [1, 90].
Result<PartCode> derive_part_code(BookCode book, int seq);

struct DecodedPartCode {
  BookCode book;
  int seq = 0;
  bool operator==(const DecodedPartCode&) const = default;
};

/// Inverse of derive_part_code; fails for codes it could not have produced.
Result<DecodedPartCode> decode_part_code(PartCode code);

// ---------------------------------------------------------------------------
// Lifecycle transitions

Result<BookStatus> next_book_status(BookStatus current, BookEvent event);
Result<PartStatus> next_part_status(PartStatus current, Decision decision);
Result<ClaimStatus> next_claim_status(ClaimStatus current, Decision decision);
Result<ApplicationStatus> next_application_status(ApplicationStatus current,
                                                  Decision decision);

/// Structural invariants of a single book record (status vs. reader).
bool book_is_consistent(const Book& book) noexcept;

// ---------------------------------------------------------------------------
// Applications

enum class ApplicationDefect {
  TrialRecordingRequired,
  NameRequired,
  EmailRequired,
  RoleNotApplicable,
};

std::string_view to_string(ApplicationDefect d) noexcept;

struct ApplicationVerdict {
  std::optional<ApplicationDefect> defect;
  bool valid() const noexcept { return !defect.has_value(); }
};

ApplicationVerdict validate_application(const MembershipApplication& app);

// ---------------------------------------------------------------------------
// Matching

/// Case-folded, whitespace-collapsed form used for duplicate detection.
std::string normalize_book_key(std::string_view title, std::string_view author);

}  // namespace audiolib
