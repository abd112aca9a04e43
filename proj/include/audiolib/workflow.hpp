#pragma once

// Stateful orchestration of the three-role lifecycle: membership vetting,
// book demand, recording claims, part submission and moderation.
//
// Every operation reads a snapshot, derives the successor records through
// the pure transition functions in domain.hpp and commits them with the
// versions it read. A conflicting concurrent commit makes the operation
// start over on a fresh snapshot, so per-aggregate changes are serialized
// without holding locks across the operation.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "audiolib/clock.hpp"
#include "audiolib/crypto.hpp"
#include "audiolib/domain.hpp"
#include "audiolib/media.hpp"
#include "audiolib/notifications.hpp"
#include "audiolib/store.hpp"

namespace audiolib {

struct EngineOptions {
  int password_iterations = crypto::kDefaultPbkdf2Iterations;
  std::size_t initial_password_length = 12;
  std::size_t min_password_length = 8;
};

struct ApplicationDecision {
  ApplicationStatus status = ApplicationStatus::Submitted;
  std::optional<AccountId> account;
};

struct PendingReviews {
  std::vector<MembershipApplication> applications;
  std::vector<RecordingClaim> claims;
  std::vector<Part> parts;
};

class WorkflowEngine {
 public:
  WorkflowEngine(store::Store& store, media::MediaStore& media, NotificationSink& sink, Clock clock,
                 EngineOptions options = {});

  store::Store& store() noexcept { return store_; }
  const EngineOptions& options() const noexcept { return options_; }

  /// Creates an Active admin unless the username is already taken by one.
  Result<AccountId> bootstrap_admin(const std::string& username, const std::string& password,
                                    const std::string& email);

  // -- membership ----------------------------------------------------------

  Result<std::string> apply_for_membership(Role desired_role, ApplicantForm form,
                                           std::optional<std::span<const std::byte>> trial_recording);
  Result<ApplicationDecision> review_application(const AccountId& admin, const std::string& application_id,
                                                 Decision decision);
  Status set_account_status(const AccountId& admin, const AccountId& target, AccountStatus status);

  // -- books and claims ----------------------------------------------------

  Result<BookCode> request_book(const AccountId& impaired, const std::string& title, const std::string& author);
  Result<std::string> claim_recording(const AccountId& volunteer, BookCode book);
  Status review_claim(const AccountId& admin, const std::string& claim_id, Decision decision);

  // -- parts ---------------------------------------------------------------

  /// Registers a completed upload as the book's next part. Submitting the
  /// same upload session again returns the part it already created.
  Result<PartCode> submit_part(const AccountId& volunteer, BookCode book, const std::string& part_name,
                               const std::string& upload_session);
  Status review_part(const AccountId& admin, PartCode part, Decision decision);
  Status mark_book_complete(const AccountId& admin, BookCode book);

  Result<PendingReviews> list_pending_reviews(const AccountId& admin) const;

  // -- credentials ---------------------------------------------------------

  /// Uniform AuthFailed for unknown users and wrong passwords.
  Result<UserAccount> authenticate(const std::string& username, const std::string& password) const;
  Result<UserAccount> change_credentials(const AccountId& account, const std::optional<std::string>& new_username,
                                         const std::optional<std::string>& new_password);
  Status set_password(const AccountId& account, const std::string& new_password);

 private:
  void notify(NotificationKind kind, const std::string& email, std::map<std::string, std::string> payload);
  Status check_password_policy(const std::string& password) const;

  store::Store& store_;
  media::MediaStore& media_;
  NotificationSink& sink_;
  Clock clock_;
  EngineOptions options_;
};

}  // namespace audiolib
