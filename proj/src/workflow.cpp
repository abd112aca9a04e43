#include "audiolib/workflow.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

#include "audiolib/text.hpp"
#include "engine_support.hpp"

namespace audiolib {

using detail::next_id;
using detail::require_role;
using detail::retry_on_conflict;
using store::TransactionScope;

namespace {

bool valid_username(const std::string& u) {
  if (u.empty() || u.size() > 64) return false;
  return std::none_of(u.begin(), u.end(), [](unsigned char c) { return std::isspace(c) || std::iscntrl(c); });
}

BookCode next_book_code(const store::State& s) {
  std::int64_t max = 3000;
  for (const auto& [key, v] : s.table<Book>()) max = std::max(max, v.value.code.value);
  return BookCode{max + 1};
}

}  // namespace

WorkflowEngine::WorkflowEngine(store::Store& store, media::MediaStore& media, NotificationSink& sink, Clock clock,
                               EngineOptions options)
    : store_(store), media_(media), sink_(sink), clock_(std::move(clock)), options_(options) {}

void WorkflowEngine::notify(NotificationKind kind, const std::string& email,
                            std::map<std::string, std::string> payload) {
  sink_.emit(NotificationEvent{kind, email, std::move(payload), clock_()});
}

Status WorkflowEngine::check_password_policy(const std::string& password) const {
  if (text::count_code_points(password) < options_.min_password_length) {
    return Error{ErrorCode::WeakPassword,
                 "password needs at least " + std::to_string(options_.min_password_length) + " characters"};
  }
  return ok_status();
}

Result<AccountId> WorkflowEngine::bootstrap_admin(const std::string& username, const std::string& password,
                                                  const std::string& email) {
  if (!valid_username(username)) return Error{ErrorCode::ValidationFailed, "bad username"};
  if (auto p = check_password_policy(password); !p) return p.error();
  const std::string digest = crypto::hash_password(password, options_.password_iterations);
  return retry_on_conflict([&]() -> Result<AccountId> {
    auto snap = store_.snapshot();
    if (const auto* existing = snap->account_by_username(username)) {
      if (existing->role == Role::Admin) return existing->id;
      return Error{ErrorCode::UsernameTaken, username};
    }
    if (snap->get<UniqueKey>(store::username_key(username))) return Error{ErrorCode::UsernameTaken, username};
    UserAccount acc{next_id<UserAccount>(*snap, "acc"), username, digest, email, Role::Admin, AccountStatus::Active,
                    clock_()};
    TransactionScope scope;
    scope.create(UniqueKey{store::username_key(username), acc.id});
    scope.create(acc);
    if (auto r = store_.commit(scope); !r) return r.error();
    return acc.id;
  });
}

// ---------------------------------------------------------------------------
// membership

Result<std::string> WorkflowEngine::apply_for_membership(Role desired_role, ApplicantForm form,
                                                         std::optional<std::span<const std::byte>> trial_recording) {
  form.username = text::trim(form.username);
  MembershipApplication probe;
  probe.desired_role = desired_role;
  probe.form = form;
  if (trial_recording && !trial_recording->empty()) probe.trial_recording = "pending";
  if (auto verdict = validate_application(probe); !verdict.valid()) {
    return Error{ErrorCode::ValidationFailed, std::string(to_string(*verdict.defect))};
  }
  if (!valid_username(form.username)) return Error{ErrorCode::ValidationFailed, "UsernameRequired"};

  std::optional<std::string> stored_trial;
  auto result = retry_on_conflict([&]() -> Result<std::string> {
    auto snap = store_.snapshot();
    if (snap->get<UniqueKey>(store::username_key(form.username))) {
      return Error{ErrorCode::UsernameTaken, form.username};
    }
    MembershipApplication app;
    app.id = next_id<MembershipApplication>(*snap, "app");
    app.desired_role = desired_role;
    app.form = form;
    app.status = ApplicationStatus::Submitted;
    app.submitted_at = clock_();
    if (probe.trial_recording) {
      const std::string key = "trials/" + app.id + ".mp3";
      if (stored_trial && *stored_trial != key) media_.detach(*stored_trial);
      auto blob = media_.put_blob(key, *trial_recording);
      if (!blob) return blob.error();
      stored_trial = key;
      app.trial_recording = key;
    }
    TransactionScope scope;
    scope.create(UniqueKey{store::username_key(form.username), "application:" + app.id});
    scope.create(app);
    if (auto r = store_.commit(scope); !r) return r.error();
    return app.id;
  });
  if (!result && stored_trial) media_.detach(*stored_trial);
  return result;
}

Result<ApplicationDecision> WorkflowEngine::review_application(const AccountId& admin,
                                                               const std::string& application_id, Decision decision) {
  {
    auto snap = store_.snapshot();
    if (auto a = require_role(*snap, admin, Role::Admin); !a) return a.error();
  }
  std::string password;
  std::string digest;
  if (decision == Decision::Approve) {
    password = crypto::random_password(options_.initial_password_length);
    digest = crypto::hash_password(password, options_.password_iterations);
  }

  std::optional<UserAccount> created;
  auto outcome = retry_on_conflict([&]() -> Result<ApplicationDecision> {
    auto snap = store_.snapshot();
    if (auto a = require_role(*snap, admin, Role::Admin); !a) return a.error();
    const auto* app = snap->find<MembershipApplication>(application_id);
    if (!app) return Error{ErrorCode::NotFound, application_id};
    auto next = next_application_status(app->value.status, decision);
    if (!next) return Error{ErrorCode::AlreadyDecided, application_id};

    MembershipApplication updated = app->value;
    updated.status = *next;
    updated.decided_by = admin;
    const std::string reservation_key = store::username_key(updated.form.username);
    const auto* reservation = snap->find<UniqueKey>(reservation_key);

    TransactionScope scope;
    if (decision == Decision::Approve) {
      UserAccount acc{next_id<UserAccount>(*snap, "acc"), updated.form.username, digest, updated.form.email,
                      updated.desired_role, AccountStatus::Active, clock_()};
      updated.account = acc.id;
      if (reservation) {
        scope.update(UniqueKey{reservation_key, acc.id}, reservation->version);
      } else {
        scope.create(UniqueKey{reservation_key, acc.id});
      }
      scope.create(acc);
      created = acc;
    } else {
      created.reset();
      if (reservation && reservation->value.owner == "application:" + application_id) {
        scope.erase<UniqueKey>(reservation_key, reservation->version);
      }
    }
    scope.update(updated, app->version);
    if (auto r = store_.commit(scope); !r) return r.error();
    return ApplicationDecision{updated.status, updated.account};
  });

  if (outcome && created) {
    notify(NotificationKind::CredentialsIssued, created->email,
           {{"username", created->username},
            {"password", password},
            {"application_id", application_id},
            {"role", std::string(to_string(created->role))}});
  }
  return outcome;
}

Status WorkflowEngine::set_account_status(const AccountId& admin, const AccountId& target, AccountStatus status) {
  return retry_on_conflict([&]() -> Status {
    auto snap = store_.snapshot();
    if (auto a = require_role(*snap, admin, Role::Admin); !a) return a.error();
    const auto* acc = snap->find<UserAccount>(target);
    if (!acc) return Error{ErrorCode::NoSuchUser, target};
    if (acc->value.status == status) return ok_status();
    UserAccount updated = acc->value;
    updated.status = status;
    TransactionScope scope;
    scope.update(updated, acc->version);
    return store_.commit(scope);
  });
}

// ---------------------------------------------------------------------------
// books and claims

Result<BookCode> WorkflowEngine::request_book(const AccountId& impaired, const std::string& title,
                                              const std::string& author) {
  const std::string clean_title = text::collapse_whitespace(title);
  const std::string clean_author = text::collapse_whitespace(author);
  if (clean_title.empty()) return Error{ErrorCode::ValidationFailed, "title required"};
  const std::string key = store::book_title_key(normalize_book_key(clean_title, clean_author));

  return retry_on_conflict([&]() -> Result<BookCode> {
    auto snap = store_.snapshot();
    if (auto a = require_role(*snap, impaired, Role::Impaired); !a) return a.error();
    if (const auto* existing = snap->get<UniqueKey>(key)) {
      return Error{ErrorCode::DuplicateDemand, existing->owner};
    }
    Book book;
    book.code = next_book_code(*snap);
    book.title = clean_title;
    book.author = clean_author;
    book.requested_by = impaired;
    book.status = BookStatus::Requested;
    book.requested_at = clock_();
    TransactionScope scope;
    scope.create(UniqueKey{key, store::book_key(book.code)});
    scope.create(book);
    if (auto r = store_.commit(scope); !r) return r.error();
    return book.code;
  });
}

Result<std::string> WorkflowEngine::claim_recording(const AccountId& volunteer, BookCode code) {
  return retry_on_conflict([&]() -> Result<std::string> {
    auto snap = store_.snapshot();
    if (auto a = require_role(*snap, volunteer, Role::Volunteer); !a) return a.error();
    const auto* book = snap->find<Book>(store::book_key(code));
    if (!book) return Error{ErrorCode::NotFound, "book " + store::book_key(code)};
    switch (book->value.status) {
      case BookStatus::Requested: break;
      case BookStatus::ClaimPending:
      case BookStatus::InRecording:
        return Error{ErrorCode::ClaimConflict, "book " + store::book_key(code) + " already claimed"};
      case BookStatus::Completed:
        return Error{ErrorCode::WrongState, "book " + store::book_key(code) + " is Completed"};
    }
    auto next = next_book_status(book->value.status, BookEvent::ClaimFiled);
    if (!next) return next.error();

    Book updated = book->value;
    updated.status = *next;
    RecordingClaim claim{next_id<RecordingClaim>(*snap, "clm"), code, volunteer, ClaimStatus::Pending, clock_()};
    TransactionScope scope;
    scope.update(updated, book->version);
    scope.create(claim);
    if (auto r = store_.commit(scope); !r) return r.error();
    return claim.id;
  });
}

Status WorkflowEngine::review_claim(const AccountId& admin, const std::string& claim_id, Decision decision) {
  std::optional<std::pair<std::string, std::map<std::string, std::string>>> note;
  auto result = retry_on_conflict([&]() -> Status {
    auto snap = store_.snapshot();
    if (auto a = require_role(*snap, admin, Role::Admin); !a) return a.error();
    const auto* claim = snap->find<RecordingClaim>(claim_id);
    if (!claim) return Error{ErrorCode::NotFound, claim_id};
    auto next_claim = next_claim_status(claim->value.status, decision);
    if (!next_claim) return Error{ErrorCode::AlreadyDecided, claim_id};
    const auto* book = snap->find<Book>(store::book_key(claim->value.book));
    if (!book) return Error{ErrorCode::IntegrityViolation, "claim without book"};
    auto next_book = next_book_status(book->value.status, decision == Decision::Approve ? BookEvent::ClaimApproved
                                                                                        : BookEvent::ClaimRejected);
    if (!next_book) return Error{ErrorCode::WrongState, next_book.error().detail};

    RecordingClaim updated_claim = claim->value;
    updated_claim.status = *next_claim;
    Book updated_book = book->value;
    updated_book.status = *next_book;
    if (decision == Decision::Approve) {
      updated_book.assigned_reader = claim->value.volunteer;
    } else {
      updated_book.assigned_reader.reset();
    }
    TransactionScope scope;
    scope.update(updated_claim, claim->version);
    scope.update(updated_book, book->version);
    if (auto r = store_.commit(scope); !r) return r;

    if (const auto* vol = snap->account(claim->value.volunteer)) {
      note = {vol->email,
              {{"claim_id", claim_id},
               {"book_code", store::book_key(claim->value.book)},
               {"decision", std::string(to_string(decision))}}};
    }
    return ok_status();
  });
  if (result && note) notify(NotificationKind::ClaimDecided, note->first, note->second);
  return result;
}

// ---------------------------------------------------------------------------
// parts

Result<PartCode> WorkflowEngine::submit_part(const AccountId& volunteer, BookCode code, const std::string& part_name,
                                             const std::string& upload_session) {
  const std::string name = text::collapse_whitespace(part_name);
  if (name.empty()) return Error{ErrorCode::ValidationFailed, "part name required"};

  std::optional<std::string> attached;
  auto result = retry_on_conflict([&]() -> Result<PartCode> {
    auto snap = store_.snapshot();
    if (auto a = require_role(*snap, volunteer, Role::Volunteer); !a) return a.error();
    const auto* book = snap->find<Book>(store::book_key(code));
    if (!book) return Error{ErrorCode::NotFound, "book " + store::book_key(code)};
    if (book->value.status != BookStatus::InRecording) {
      return Error{ErrorCode::WrongState, "book is " + std::string(to_string(book->value.status))};
    }
    if (book->value.assigned_reader != volunteer) {
      return Error{ErrorCode::NotAssigned, "book " + store::book_key(code) + " is assigned to another reader"};
    }

    int max_seq = 0;
    for (const auto& [key, v] : snap->table<Part>()) {
      if (v.value.upload_session == upload_session) {
        if (v.value.book == code && v.value.submitted_by == volunteer) return v.value.code;
        return Error{ErrorCode::BadRequest, "upload already registered as another part"};
      }
      if (v.value.book == code) max_seq = std::max(max_seq, v.value.seq);
    }

    auto session = media_.session(upload_session);
    if (!session || session->owner != volunteer) return Error{ErrorCode::UploadIncomplete, "unknown upload session"};
    if (session->state != media::UploadState::Complete) {
      return Error{ErrorCode::UploadIncomplete, "upload is " + std::string(media::to_string(session->state))};
    }

    auto part_code = derive_part_code(code, max_seq + 1);
    if (!part_code) return part_code.error();
    auto blob = media_.attach_to_part(upload_session, code, *part_code);
    if (!blob) return blob.error();
    if (attached && *attached != blob->key) media_.detach(*attached);
    attached = blob->key;

    Part part;
    part.code = *part_code;
    part.book = code;
    part.seq = max_seq + 1;
    part.name = name;
    part.duration_seconds = session->duration_seconds;
    part.added_at = clock_();
    part.submitted_by = volunteer;
    part.audio = blob->key;
    part.upload_session = upload_session;
    part.size_bytes = blob->size;
    part.status = PartStatus::PendingApproval;

    TransactionScope scope;
    scope.guard<Book>(store::book_key(code), book->version);
    scope.create(part);
    if (auto r = store_.commit(scope); !r) return r.error();
    attached.reset();  // owned by the part now
    return part.code;
  });
  if (attached) media_.detach(*attached);
  return result;
}

Status WorkflowEngine::review_part(const AccountId& admin, PartCode code, Decision decision) {
  std::optional<std::pair<std::string, std::map<std::string, std::string>>> note;
  auto result = retry_on_conflict([&]() -> Status {
    auto snap = store_.snapshot();
    if (auto a = require_role(*snap, admin, Role::Admin); !a) return a.error();
    const auto* part = snap->find<Part>(store::part_key(code));
    if (!part) return Error{ErrorCode::NotFound, "part " + store::part_key(code)};
    auto next = next_part_status(part->value.status, decision);
    if (!next) return Error{ErrorCode::AlreadyDecided, "part " + store::part_key(code)};
    Part updated = part->value;
    updated.status = *next;
    TransactionScope scope;
    scope.update(updated, part->version);
    if (auto r = store_.commit(scope); !r) return r;
    if (const auto* vol = snap->account(part->value.submitted_by)) {
      note = {vol->email, {{"part_code", store::part_key(code)}, {"decision", std::string(to_string(decision))}}};
    }
    return ok_status();
  });
  if (result && note) notify(NotificationKind::PartDecided, note->first, note->second);
  return result;
}

Status WorkflowEngine::mark_book_complete(const AccountId& admin, BookCode code) {
  return retry_on_conflict([&]() -> Status {
    auto snap = store_.snapshot();
    if (auto a = require_role(*snap, admin, Role::Admin); !a) return a.error();
    const auto* book = snap->find<Book>(store::book_key(code));
    if (!book) return Error{ErrorCode::NotFound, "book " + store::book_key(code)};
    auto next = next_book_status(book->value.status, BookEvent::MarkedComplete);
    if (!next) return Error{ErrorCode::WrongState, "book is " + std::string(to_string(book->value.status))};
    const bool any_approved = std::any_of(snap->table<Part>().begin(), snap->table<Part>().end(), [&](const auto& kv) {
      return kv.second.value.book == code && kv.second.value.status == PartStatus::Approved;
    });
    if (!any_approved) return Error{ErrorCode::NoApprovedParts, "book " + store::book_key(code)};
    Book updated = book->value;
    updated.status = *next;
    TransactionScope scope;
    scope.update(updated, book->version);
    return store_.commit(scope);
  });
}

Result<PendingReviews> WorkflowEngine::list_pending_reviews(const AccountId& admin) const {
  auto snap = store_.snapshot();
  if (auto a = require_role(*snap, admin, Role::Admin); !a) return a.error();
  PendingReviews out;
  for (const auto& [key, v] : snap->table<MembershipApplication>()) {
    if (v.value.status == ApplicationStatus::Submitted) out.applications.push_back(v.value);
  }
  for (const auto& [key, v] : snap->table<RecordingClaim>()) {
    if (v.value.status == ClaimStatus::Pending) out.claims.push_back(v.value);
  }
  for (const auto& [key, v] : snap->table<Part>()) {
    if (v.value.status == PartStatus::PendingApproval) out.parts.push_back(v.value);
  }
  std::stable_sort(out.applications.begin(), out.applications.end(),
                   [](const auto& a, const auto& b) { return std::tie(a.submitted_at, a.id) < std::tie(b.submitted_at, b.id); });
  std::stable_sort(out.claims.begin(), out.claims.end(),
                   [](const auto& a, const auto& b) { return std::tie(a.filed_at, a.id) < std::tie(b.filed_at, b.id); });
  std::stable_sort(out.parts.begin(), out.parts.end(),
                   [](const auto& a, const auto& b) { return std::tie(a.added_at, a.code) < std::tie(b.added_at, b.code); });
  return out;
}

// ---------------------------------------------------------------------------
// credentials

Result<UserAccount> WorkflowEngine::authenticate(const std::string& username, const std::string& password) const {
  auto snap = store_.snapshot();
  const auto* acc = snap->account_by_username(username);
  if (!acc || !crypto::verify_password(password, acc->password_digest)) {
    return Error{ErrorCode::AuthFailed, "invalid username or password"};
  }
  if (acc->status != AccountStatus::Active) return Error{ErrorCode::AccountDisabled, "account disabled"};
  return *acc;
}

Result<UserAccount> WorkflowEngine::change_credentials(const AccountId& account,
                                                       const std::optional<std::string>& new_username,
                                                       const std::optional<std::string>& new_password) {
  std::optional<std::string> username;
  if (new_username) {
    username = text::trim(*new_username);
    if (!valid_username(*username)) return Error{ErrorCode::ValidationFailed, "bad username"};
  }
  std::optional<std::string> digest;
  if (new_password) {
    if (auto p = check_password_policy(*new_password); !p) return p.error();
    digest = crypto::hash_password(*new_password, options_.password_iterations);
  }
  if (!username && !digest) return Error{ErrorCode::ValidationFailed, "nothing to change"};

  return retry_on_conflict([&]() -> Result<UserAccount> {
    auto snap = store_.snapshot();
    auto active = detail::require_active(*snap, account);
    if (!active) return active.error();
    const auto* acc = snap->find<UserAccount>(account);
    UserAccount updated = acc->value;
    TransactionScope scope;
    if (username && *username != acc->value.username) {
      if (snap->get<UniqueKey>(store::username_key(*username))) return Error{ErrorCode::UsernameTaken, *username};
      const std::string old_key = store::username_key(acc->value.username);
      if (const auto* old = snap->find<UniqueKey>(old_key)) scope.erase<UniqueKey>(old_key, old->version);
      scope.create(UniqueKey{store::username_key(*username), account});
      updated.username = *username;
    }
    if (digest) updated.password_digest = *digest;
    scope.update(updated, acc->version);
    if (auto r = store_.commit(scope); !r) return r.error();
    return updated;
  });
}

Status WorkflowEngine::set_password(const AccountId& account, const std::string& new_password) {
  auto r = change_credentials(account, std::nullopt, new_password);
  if (!r) return r.error();
  return ok_status();
}

}  // namespace audiolib
