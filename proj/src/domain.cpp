#include "audiolib/domain.hpp"

#include <array>
#include <utility>

#include "audiolib/text.hpp"

namespace audiolib {
namespace {

template <class E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) noexcept {
  for (const auto& [e, n] : table) {
    if (e == v) return n;
  }
  return "?";
}

template <class E, std::size_t N>
std::optional<E> parse_in(const std::array<std::pair<E, std::string_view>, N>& table,
                          std::string_view s) noexcept {
  for (const auto& [e, n] : table) {
    if (n == s) return e;
  }
  return std::nullopt;
}

constexpr std::array<std::pair<Role, std::string_view>, 3> kRoles{{
    {Role::Volunteer, "Volunteer"}, {Role::Impaired, "Impaired"}, {Role::Admin, "Admin"}}};
constexpr std::array<std::pair<AccountStatus, std::string_view>, 2> kAccountStatuses{{
    {AccountStatus::Active, "Active"}, {AccountStatus::Disabled, "Disabled"}}};
constexpr std::array<std::pair<ApplicationStatus, std::string_view>, 3> kApplicationStatuses{{
    {ApplicationStatus::Submitted, "Submitted"},
    {ApplicationStatus::Approved, "Approved"},
    {ApplicationStatus::Rejected, "Rejected"}}};
constexpr std::array<std::pair<BookStatus, std::string_view>, 4> kBookStatuses{{
    {BookStatus::Requested, "Requested"},
    {BookStatus::ClaimPending, "ClaimPending"},
    {BookStatus::InRecording, "InRecording"},
    {BookStatus::Completed, "Completed"}}};
constexpr std::array<std::pair<BookEvent, std::string_view>, 4> kBookEvents{{
    {BookEvent::ClaimFiled, "ClaimFiled"},
    {BookEvent::ClaimApproved, "ClaimApproved"},
    {BookEvent::ClaimRejected, "ClaimRejected"},
    {BookEvent::MarkedComplete, "MarkedComplete"}}};
constexpr std::array<std::pair<ClaimStatus, std::string_view>, 3> kClaimStatuses{{
    {ClaimStatus::Pending, "Pending"}, {ClaimStatus::Approved, "Approved"}, {ClaimStatus::Rejected, "Rejected"}}};
constexpr std::array<std::pair<PartStatus, std::string_view>, 3> kPartStatuses{{
    {PartStatus::PendingApproval, "PendingApproval"},
    {PartStatus::Approved, "Approved"},
    {PartStatus::Rejected, "Rejected"}}};
constexpr std::array<std::pair<Decision, std::string_view>, 2> kDecisions{{
    {Decision::Approve, "approve"}, {Decision::Reject, "reject"}}};
constexpr std::array<std::pair<PlaybackMode, std::string_view>, 2> kModes{{
    {PlaybackMode::Stream, "Stream"}, {PlaybackMode::Download, "Download"}}};
constexpr std::array<std::pair<ItemKind, std::string_view>, 3> kItemKinds{{
    {ItemKind::News, "News"}, {ItemKind::Announcement, "Announcement"}, {ItemKind::Link, "Link"}}};
constexpr std::array<std::pair<ApplicationDefect, std::string_view>, 4> kDefects{{
    {ApplicationDefect::TrialRecordingRequired, "TrialRecordingRequired"},
    {ApplicationDefect::NameRequired, "NameRequired"},
    {ApplicationDefect::EmailRequired, "EmailRequired"},
    {ApplicationDefect::RoleNotApplicable, "RoleNotApplicable"}}};

}  // namespace

std::string_view to_string(Role v) noexcept { return name_of(kRoles, v); }
std::string_view to_string(AccountStatus v) noexcept { return name_of(kAccountStatuses, v); }
std::string_view to_string(ApplicationStatus v) noexcept { return name_of(kApplicationStatuses, v); }
std::string_view to_string(BookStatus v) noexcept { return name_of(kBookStatuses, v); }
std::string_view to_string(BookEvent v) noexcept { return name_of(kBookEvents, v); }
std::string_view to_string(ClaimStatus v) noexcept { return name_of(kClaimStatuses, v); }
std::string_view to_string(PartStatus v) noexcept { return name_of(kPartStatuses, v); }
std::string_view to_string(Decision v) noexcept { return name_of(kDecisions, v); }
std::string_view to_string(PlaybackMode v) noexcept { return name_of(kModes, v); }
std::string_view to_string(ItemKind v) noexcept { return name_of(kItemKinds, v); }
std::string_view to_string(ApplicationDefect v) noexcept { return name_of(kDefects, v); }

std::optional<Role> parse_role(std::string_view s) noexcept { return parse_in(kRoles, s); }
std::optional<AccountStatus> parse_account_status(std::string_view s) noexcept {
  return parse_in(kAccountStatuses, s);
}
std::optional<ApplicationStatus> parse_application_status(std::string_view s) noexcept {
  return parse_in(kApplicationStatuses, s);
}
std::optional<BookStatus> parse_book_status(std::string_view s) noexcept { return parse_in(kBookStatuses, s); }
std::optional<ClaimStatus> parse_claim_status(std::string_view s) noexcept { return parse_in(kClaimStatuses, s); }
std::optional<PartStatus> parse_part_status(std::string_view s) noexcept { return parse_in(kPartStatuses, s); }
std::optional<Decision> parse_decision(std::string_view s) noexcept { return parse_in(kDecisions, s); }
std::optional<PlaybackMode> parse_playback_mode(std::string_view s) noexcept { return parse_in(kModes, s); }
std::optional<ItemKind> parse_item_kind(std::string_view s) noexcept { return parse_in(kItemKinds, s); }

Result<PartCode> derive_part_code(BookCode book, int seq) {
  if (book.value <= 0) {
    return Error{ErrorCode::InvalidSequence, "book code must be positive"};
  }
  if (seq < 1 || seq > kMaxPartsPerBook) {
    return Error{ErrorCode::InvalidSequence, "part sequence must be in [1, 90]"};
  }
  return PartCode{book.value * 100 + 9 + seq};
}

Result<DecodedPartCode> decode_part_code(PartCode code) {
  const std::int64_t book = code.value / 100;
  const std::int64_t seq = code.value % 100 - 9;
  if (book <= 0 || seq < 1 || seq > kMaxPartsPerBook) {
    return Error{ErrorCode::InvalidSequence, "not a derived part code"};
  }
  return DecodedPartCode{BookCode{book}, static_cast<int>(seq)};
}

Result<BookStatus> next_book_status(BookStatus current, BookEvent event) {
  using S = BookStatus;
  using E = BookEvent;
  if (current == S::Requested && event == E::ClaimFiled) return S::ClaimPending;
  if (current == S::ClaimPending && event == E::ClaimApproved) return S::InRecording;
  if (current == S::ClaimPending && event == E::ClaimRejected) return S::Requested;
  if (current == S::InRecording && event == E::MarkedComplete) return S::Completed;
  return Error{ErrorCode::IllegalTransition,
               std::string(to_string(current)) + " + " + std::string(to_string(event))};
}

Result<PartStatus> next_part_status(PartStatus current, Decision decision) {
  if (current != PartStatus::PendingApproval) {
    return Error{ErrorCode::IllegalTransition, "part already " + std::string(to_string(current))};
  }
  return decision == Decision::Approve ? PartStatus::Approved : PartStatus::Rejected;
}

Result<ClaimStatus> next_claim_status(ClaimStatus current, Decision decision) {
  if (current != ClaimStatus::Pending) {
    return Error{ErrorCode::IllegalTransition, "claim already " + std::string(to_string(current))};
  }
  return decision == Decision::Approve ? ClaimStatus::Approved : ClaimStatus::Rejected;
}

Result<ApplicationStatus> next_application_status(ApplicationStatus current, Decision decision) {
  if (current != ApplicationStatus::Submitted) {
    return Error{ErrorCode::IllegalTransition, "application already " + std::string(to_string(current))};
  }
  return decision == Decision::Approve ? ApplicationStatus::Approved : ApplicationStatus::Rejected;
}

bool book_is_consistent(const Book& book) noexcept {
  switch (book.status) {
    case BookStatus::Requested:
    case BookStatus::ClaimPending:
      return !book.assigned_reader.has_value();
    case BookStatus::InRecording:
    case BookStatus::Completed:
      return book.assigned_reader.has_value();
  }
  return false;
}

ApplicationVerdict validate_application(const MembershipApplication& app) {
  if (app.desired_role == Role::Admin) return {ApplicationDefect::RoleNotApplicable};
  if (text::trim(app.form.full_name).empty()) return {ApplicationDefect::NameRequired};
  if (text::trim(app.form.email).empty()) return {ApplicationDefect::EmailRequired};
  if (app.desired_role == Role::Volunteer &&
      (!app.trial_recording.has_value() || app.trial_recording->empty())) {
    return {ApplicationDefect::TrialRecordingRequired};
  }
  return {};
}

std::string normalize_book_key(std::string_view title, std::string_view author) {
  return text::fold_case(text::collapse_whitespace(title)) + "\x1f" +
         text::fold_case(text::collapse_whitespace(author));
}

}  // namespace audiolib
