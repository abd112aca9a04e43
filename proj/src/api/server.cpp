#include "audiolib/api/server.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <charconv>
#include <functional>
#include <httplib.h>
#include <json.hpp>
#include <map>

#include "audiolib/api/endpoints.hpp"
#include "audiolib/records_json.hpp"
#include "audiolib/text.hpp"

namespace audiolib::api {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadRequest:
    case ErrorCode::BadChecksumFormat:
    case ErrorCode::InvalidSequence:
      return 400;
    case ErrorCode::AuthFailed:
    case ErrorCode::Unauthenticated:
    case ErrorCode::SessionExpired:
      return 401;
    case ErrorCode::Forbidden:
    case ErrorCode::AccountDisabled:
    case ErrorCode::NotAssigned:
    case ErrorCode::NotPublished:
      return 403;
    case ErrorCode::NotFound:
    case ErrorCode::NoSuchSession:
    case ErrorCode::NoSuchUser:
    case ErrorCode::BlobMissing:
      return 404;
    case ErrorCode::UsernameTaken:
    case ErrorCode::AlreadyDecided:
    case ErrorCode::DuplicateDemand:
    case ErrorCode::WrongState:
    case ErrorCode::ClaimConflict:
    case ErrorCode::ChunkConflict:
    case ErrorCode::VersionConflict:
    case ErrorCode::Duplicate:
    case ErrorCode::IllegalTransition:
    case ErrorCode::UploadIncomplete:
    case ErrorCode::IncompleteUpload:
    case ErrorCode::NoApprovedParts:
      return 409;
    case ErrorCode::SizeRejected:
    case ErrorCode::BodyTooLarge:
      return 413;
    case ErrorCode::RangeRejected:
      return 416;
    case ErrorCode::ValidationFailed:
    case ErrorCode::WeakPassword:
    case ErrorCode::EmptyQuery:
    case ErrorCode::EmptyBody:
    case ErrorCode::BadUrl:
    case ErrorCode::SelfMessage:
    case ErrorCode::SelfFriend:
    case ErrorCode::NotAudio:
    case ErrorCode::ChecksumMismatch:
      return 422;
    case ErrorCode::RateLimited:
      return 429;
    case ErrorCode::IntegrityViolation:
    case ErrorCode::ConnectFailed:
    case ErrorCode::Internal:
      return 500;
  }
  return 500;
}

namespace {

constexpr Timestamp kResetTokenTtl = 3'600'000;
constexpr std::size_t kDefaultListLimit = 20;
constexpr std::size_t kMaxListLimit = 500;
constexpr std::int64_t kAudioReadBlock = 256 * 1024;

/// Thrown by request parsing helpers; turned into an error response.
struct RequestError {
  Error error;
};

[[noreturn]] void reject(ErrorCode code, std::string detail) { throw RequestError{Error{code, std::move(detail)}}; }

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status(e.code), json{{"error", to_string(e.code)}, {"message", e.detail}});
}

template <class T>
T unwrap(Result<T> r) {
  if (!r) throw RequestError{r.error()};
  return std::move(r).value();
}

void check(const Status& s) {
  if (!s) throw RequestError{s.error()};
}

struct Call {
  const EndpointSpec& spec;
  const httplib::Request& req;
  httplib::Response& res;
  std::optional<Session> session;
  std::string token;

  const AccountId& caller() const { return session->account; }
  Role role() const { return session->role; }

  std::string arg(std::size_t i) const { return req.matches[static_cast<int>(i) + 1].str(); }

  std::int64_t code_arg(std::size_t i) const {
    const std::string s = arg(i);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) reject(ErrorCode::NotFound, s);
    return v;
  }

  json body() const {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) reject(ErrorCode::BadRequest, "body must be a JSON object");
    return j;
  }

  std::size_t limit_param() const {
    if (!req.has_param("limit")) return kDefaultListLimit;
    const std::string s = req.get_param_value("limit");
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) reject(ErrorCode::BadRequest, "bad limit");
    return std::min(v, kMaxListLimit);
  }
};

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) reject(ErrorCode::BadRequest, std::string("missing string field ") + key);
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) reject(ErrorCode::BadRequest, std::string("field ") + key + " must be a string");
  return it->get<std::string>();
}

Decision decision_field(const json& j) {
  auto d = parse_decision(required_string(j, "decision"));
  if (!d) reject(ErrorCode::BadRequest, "decision must be approve or reject");
  return *d;
}

json account_json(const UserAccount& a) { return public_view(a); }

json summary_json(const BookSummary& s) {
  json j = s.book;
  j["approved_parts"] = s.approved_parts;
  j["total_parts"] = s.total_parts;
  j["approved_duration_seconds"] = s.approved_duration_seconds ? json(*s.approved_duration_seconds) : json(nullptr);
  return j;
}

std::optional<std::string> bearer_token(const httplib::Request& req) {
  const std::string h = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  return text::trim(h.substr(prefix.size()));
}

using Handler = std::function<void(Service&, Call&)>;

// ---------------------------------------------------------------------------
// handlers

void h_login(Service& svc, Call& c) {
  const json b = c.body();
  auto acc = unwrap(svc.engine().authenticate(required_string(b, "username"), required_string(b, "password")));
  const Session s = svc.sessions().issue(acc.id, acc.role);
  send_json(c.res, 200, json{{"token", s.token}, {"expires_at", s.expires_at}, {"account", account_json(acc)}});
}

void h_logout(Service& svc, Call& c) {
  svc.sessions().revoke(c.token);
  send_json(c.res, 200, json{{"ok", true}});
}

void h_me(Service& svc, Call& c) {
  auto snap = svc.store().snapshot();
  const UserAccount* acc = snap->account(c.caller());
  if (!acc) reject(ErrorCode::Unauthenticated, "account vanished");
  const auto unread = unwrap(svc.community().unread_count(c.caller()));
  send_json(c.res, 200, json{{"account", account_json(*acc)}, {"unread_messages", unread}});
}

void h_apply(Service& svc, Call& c) {
  ApplicantForm form;
  std::string role_name;
  std::optional<std::string> trial;
  if (c.req.is_multipart_form_data()) {
    auto field = [&](const char* k) { return c.req.has_file(k) ? c.req.get_file_value(k).content : std::string(); };
    role_name = field("desired_role");
    form.full_name = field("full_name");
    form.email = field("email");
    form.username = field("username");
    form.phone = field("phone");
    form.notes = field("notes");
    if (c.req.has_file("trial")) trial = c.req.get_file_value("trial").content;
  } else {
    const json b = c.body();
    role_name = required_string(b, "desired_role");
    form.full_name = optional_string(b, "full_name").value_or("");
    form.email = optional_string(b, "email").value_or("");
    form.username = optional_string(b, "username").value_or("");
    form.phone = optional_string(b, "phone").value_or("");
    form.notes = optional_string(b, "notes").value_or("");
  }
  auto role = parse_role(role_name);
  if (!role) reject(ErrorCode::ValidationFailed, "desired_role must be Volunteer or Impaired");
  std::optional<std::span<const std::byte>> trial_bytes;
  if (trial && !trial->empty()) trial_bytes = std::as_bytes(std::span(trial->data(), trial->size()));
  auto id = unwrap(svc.engine().apply_for_membership(*role, form, trial_bytes));
  send_json(c.res, 201, json{{"application_id", id}});
}

void h_application_decision(Service& svc, Call& c) {
  auto d = unwrap(svc.engine().review_application(c.caller(), c.arg(0), decision_field(c.body())));
  send_json(c.res, 200,
            json{{"status", to_string(d.status)}, {"account_id", d.account ? json(*d.account) : json(nullptr)}});
}

void h_application_trial(Service& svc, Call& c) {
  auto snap = svc.store().snapshot();
  const auto* app = snap->get<MembershipApplication>(c.arg(0));
  if (!app || !app->trial_recording) reject(ErrorCode::NotFound, "no trial recording");
  auto size = unwrap(svc.media().blob_size(*app->trial_recording));
  auto bytes = unwrap(svc.media().read_range(*app->trial_recording, ByteRange{0, size}));
  c.res.status = 200;
  c.res.set_content(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()), "audio/mpeg");
}

void h_request_book(Service& svc, Call& c) {
  const json b = c.body();
  auto code = unwrap(
      svc.engine().request_book(c.caller(), required_string(b, "title"), optional_string(b, "author").value_or("")));
  send_json(c.res, 201, json{{"book_code", code.value}});
}

void h_demanded(Service& svc, Call& c) {
  send_json(c.res, 200, json{{"books", unwrap(svc.catalog().list_demanded_books(c.caller()))}});
}

void h_my_requests(Service& svc, Call& c) {
  send_json(c.res, 200, json{{"books", unwrap(svc.catalog().list_my_requests(c.caller()))}});
}

void h_book_details(Service& svc, Call& c) {
  send_json(c.res, 200, summary_json(unwrap(svc.catalog().book_details(c.caller(), BookCode{c.code_arg(0)}))));
}

void h_book_parts(Service& svc, Call& c) {
  send_json(c.res, 200, json{{"parts", unwrap(svc.catalog().list_book_parts(c.caller(), BookCode{c.code_arg(0)}))}});
}

void h_claim(Service& svc, Call& c) {
  auto id = unwrap(svc.engine().claim_recording(c.caller(), BookCode{c.code_arg(0)}));
  send_json(c.res, 201, json{{"claim_id", id}});
}

void h_claim_decision(Service& svc, Call& c) {
  check(svc.engine().review_claim(c.caller(), c.arg(0), decision_field(c.body())));
  send_json(c.res, 200, json{{"ok", true}});
}

/// Upload sessions are only visible to their owner; anyone else gets the
/// same answer as for a session that does not exist.
media::UploadSessionInfo owned_session(Service& svc, const Call& c) {
  auto info = svc.media().session(c.arg(0));
  if (!info || info->owner != c.caller()) reject(ErrorCode::NoSuchSession, c.arg(0));
  return *info;
}

void h_upload_begin(Service& svc, Call& c) {
  const json b = c.body();
  auto it = b.find("size");
  if (it == b.end() || !it->is_number_integer()) reject(ErrorCode::BadRequest, "missing integer field size");
  auto id = unwrap(svc.media().begin_upload(c.caller(), it->get<std::int64_t>(), required_string(b, "checksum")));
  send_json(c.res, 201, json{{"session_id", id}});
}

void h_upload_status(Service& svc, Call& c) {
  const auto info = owned_session(svc, c);
  json ranges = json::array();
  for (const auto& r : info.received) ranges.push_back(json::array({r.begin, r.end}));
  send_json(c.res, 200,
            json{{"session_id", info.id},
                 {"declared_size", info.declared_size},
                 {"declared_checksum", info.declared_checksum},
                 {"received", ranges},
                 {"received_bytes", info.received_bytes},
                 {"state", media::to_string(info.state)},
                 {"blob", info.blob ? json(info.blob->key) : json(nullptr)}});
}

void h_upload_chunk(Service& svc, Call& c) {
  owned_session(svc, c);
  if (!c.req.has_param("offset")) reject(ErrorCode::BadRequest, "offset query parameter required");
  const std::string s = c.req.get_param_value("offset");
  std::int64_t offset = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), offset);
  if (ec != std::errc{} || p != s.data() + s.size()) reject(ErrorCode::BadRequest, "bad offset");
  auto receipt = unwrap(svc.media().put_chunk(
      c.arg(0), offset, std::as_bytes(std::span(c.req.body.data(), c.req.body.size()))));
  send_json(c.res, 200, json{{"received_bytes", receipt.received_bytes}, {"complete", receipt.complete}});
}

void h_upload_commit(Service& svc, Call& c) {
  const auto info = owned_session(svc, c);
  const std::string checksum = required_string(c.body(), "checksum");
  if (!crypto::is_sha256_hex(checksum)) reject(ErrorCode::BadChecksumFormat, "checksum must be 64 hex digits");
  if (text::fold_case(checksum) != text::fold_case(info.declared_checksum)) {
    reject(ErrorCode::ChecksumMismatch, "checksum differs from the one declared at upload start");
  }
  auto receipt = unwrap(svc.media().finish_upload(c.arg(0)));
  send_json(c.res, 200,
            json{{"blob", receipt.blob.key},
                 {"duration_seconds", receipt.probe ? json(receipt.probe->duration_seconds) : json(nullptr)}});
}

void h_submit_part(Service& svc, Call& c) {
  const json b = c.body();
  auto code = unwrap(svc.engine().submit_part(c.caller(), BookCode{c.code_arg(0)}, required_string(b, "name"),
                                              required_string(b, "upload_session")));
  send_json(c.res, 201, json{{"part_code", code.value}});
}

void h_part_decision(Service& svc, Call& c) {
  check(svc.engine().review_part(c.caller(), PartCode{c.code_arg(0)}, decision_field(c.body())));
  send_json(c.res, 200, json{{"ok", true}});
}

void h_book_complete(Service& svc, Call& c) {
  check(svc.engine().mark_book_complete(c.caller(), BookCode{c.code_arg(0)}));
  send_json(c.res, 200, json{{"ok", true}});
}

void h_part_audio(Service& svc, Call& c) {
  const PartCode code{c.code_arg(0)};
  if (c.req.ranges.size() > 1) reject(ErrorCode::RangeRejected, "multiple ranges are not supported");
  StreamGrant grant;
  if (c.req.ranges.empty()) {
    grant = unwrap(svc.delivery().open_range(c.caller(), code, std::optional<ByteRange>{}));
  } else {
    const auto& r = c.req.ranges.front();
    grant = unwrap(svc.delivery().open_range(c.caller(), code, HttpRange{r.first, r.second}));
  }

  const int fd = ::open(grant.path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) reject(ErrorCode::BlobMissing, grant.blob_key);
  auto file = std::shared_ptr<int>(new int(fd), [](int* p) {
    ::close(*p);
    delete p;
  });

  c.res.status = c.req.ranges.empty() ? 200 : 206;
  c.res.set_header("Accept-Ranges", "bytes");
  if (grant.recorded) c.res.set_header("X-Playback-Mode", std::string(to_string(*grant.recorded)));
  // The provider describes the whole blob; for a 206 the HTTP layer asks
  // only for the requested slice and emits the Content-Range header.
  c.res.set_content_provider(
      static_cast<std::size_t>(grant.total_size), "audio/mpeg",
      [file](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
        std::vector<char> buf(static_cast<std::size_t>(std::min<std::int64_t>(kAudioReadBlock, length)));
        const ssize_t n = ::pread(*file, buf.data(), buf.size(), static_cast<off_t>(offset));
        if (n <= 0) return false;
        return sink.write(buf.data(), static_cast<std::size_t>(n));
      });
}

void h_recent(Service& svc, Call& c) {
  json parts = json::array();
  for (const auto& r : unwrap(svc.catalog().list_recently_added(c.caller(), c.limit_param()))) {
    json j = r.part;
    j["book_title"] = r.book_title;
    j["book_author"] = r.book_author;
    parts.push_back(std::move(j));
  }
  send_json(c.res, 200, json{{"parts", parts}});
}

void h_mostly_read(Service& svc, Call& c) {
  json books = json::array();
  for (const auto& r : unwrap(svc.catalog().list_mostly_read(c.caller(), c.limit_param()))) {
    books.push_back(json{{"book_code", r.book.value},
                         {"title", r.title},
                         {"author", r.author},
                         {"plays", r.plays},
                         {"last_played", r.last_played}});
  }
  send_json(c.res, 200, json{{"books", books}});
}

void h_search(Service& svc, Call& c) {
  json books = json::array();
  for (const auto& s : unwrap(svc.catalog().search_books(c.caller(), c.req.get_param_value("q")))) {
    books.push_back(summary_json(s));
  }
  send_json(c.res, 200, json{{"books", books}});
}

void h_assignments(Service& svc, Call& c) {
  send_json(c.res, 200, json{{"books", unwrap(svc.catalog().list_assignments(c.caller()))}});
}

void h_pending(Service& svc, Call& c) {
  auto p = unwrap(svc.engine().list_pending_reviews(c.caller()));
  send_json(c.res, 200, json{{"applications", p.applications}, {"claims", p.claims}, {"parts", p.parts}});
}

void h_send_message(Service& svc, Call& c) {
  const json b = c.body();
  auto id = unwrap(svc.community().send_message(c.caller(), required_string(b, "to"), required_string(b, "body")));
  send_json(c.res, 201, json{{"message_id", id}});
}

void h_inbox(Service& svc, Call& c) {
  auto inbox = unwrap(svc.community().list_inbox(c.caller()));
  auto snap = svc.store().snapshot();
  json messages = json::array();
  for (const auto& m : inbox.messages) {
    json j = m;
    const UserAccount* from = snap->account(m.from);
    j["from_username"] = from ? from->username : "";
    messages.push_back(std::move(j));
  }
  send_json(c.res, 200, json{{"unread", inbox.unread_before}, {"messages", messages}});
}

void h_add_friend(Service& svc, Call& c) {
  auto link = unwrap(svc.community().add_friend(c.caller(), required_string(c.body(), "username")));
  send_json(c.res, 201, json(link));
}

void h_friends(Service& svc, Call& c) {
  json out = json::array();
  for (const auto& f : unwrap(svc.community().list_friends(c.caller()))) {
    out.push_back(json{{"account_id", f.account}, {"username", f.username}, {"added_at", f.added_at}});
  }
  send_json(c.res, 200, json{{"friends", out}});
}

void h_guestbook_sign(Service& svc, Call& c) {
  const json b = c.body();
  // signed-in members are rate limited per account, visitors per address
  std::string source = "addr:" + c.req.remote_addr;
  if (auto token = bearer_token(c.req)) {
    if (auto s = svc.sessions().resolve(*token)) source = "acct:" + s->account;
  }
  auto id = unwrap(svc.community().sign_guestbook(required_string(b, "author_name"), required_string(b, "body"), source));
  send_json(c.res, 201, json{{"entry_id", id}});
}

void h_guestbook_list(Service& svc, Call& c) {
  bool include_hidden = false;
  if (c.req.get_param_value("all") == "1") {
    if (auto token = bearer_token(c.req)) {
      auto s = svc.sessions().resolve(*token);
      include_hidden = s && s->role == Role::Admin;
    }
  }
  send_json(c.res, 200, json{{"entries", svc.community().list_guestbook(include_hidden)}});
}

void h_guestbook_visibility(Service& svc, Call& c) {
  const json b = c.body();
  auto it = b.find("visible");
  if (it == b.end() || !it->is_boolean()) reject(ErrorCode::BadRequest, "missing boolean field visible");
  check(svc.community().moderate_guestbook(c.caller(), c.arg(0), it->get<bool>()));
  send_json(c.res, 200, json{{"ok", true}});
}

void h_item_publish(Service& svc, Call& c) {
  const json b = c.body();
  auto kind = parse_item_kind(required_string(b, "kind"));
  if (!kind) reject(ErrorCode::BadRequest, "kind must be News, Announcement or Link");
  auto id = unwrap(svc.community().publish_item(c.caller(), *kind, required_string(b, "title"),
                                                required_string(b, "body_or_url")));
  send_json(c.res, 201, json{{"item_id", id}});
}

void h_item_retract(Service& svc, Call& c) {
  check(svc.community().retract_item(c.caller(), c.arg(0)));
  send_json(c.res, 200, json{{"ok", true}});
}

void h_items(Service& svc, Call& c) { send_json(c.res, 200, json{{"items", svc.community().list_items()}}); }

void h_account_update(Service& svc, Call& c) {
  const json b = c.body();
  auto acc = unwrap(
      svc.engine().change_credentials(c.caller(), optional_string(b, "username"), optional_string(b, "password")));
  // every earlier session, including the one that made this call, is void
  svc.sessions().revoke_account(acc.id);
  const Session s = svc.sessions().issue(acc.id, acc.role);
  send_json(c.res, 200, json{{"token", s.token}, {"expires_at", s.expires_at}, {"account", account_json(acc)}});
}

void h_account_status(Service& svc, Call& c) {
  auto status = parse_account_status(required_string(c.body(), "status"));
  if (!status) reject(ErrorCode::BadRequest, "status must be Active or Disabled");
  check(svc.engine().set_account_status(c.caller(), c.arg(0), *status));
  if (*status == AccountStatus::Disabled) svc.sessions().revoke_account(c.arg(0));
  send_json(c.res, 200, json{{"ok", true}});
}

void h_password_reset(Service& svc, Call& c) {
  const std::string username = required_string(c.body(), "username");
  auto snap = svc.store().snapshot();
  // Same answer whether or not the account exists.
  if (const UserAccount* acc = snap->account_by_username(text::trim(username));
      acc && acc->status == AccountStatus::Active) {
    const std::string token = svc.sessions().issue_reset(acc->id, kResetTokenTtl);
    svc.outbox().emit(NotificationEvent{NotificationKind::PasswordReset,
                                        acc->email,
                                        {{"username", acc->username}, {"reset_token", token}},
                                        svc.clock()()});
  }
  send_json(c.res, 202, json{{"ok", true}});
}

void h_password_reset_confirm(Service& svc, Call& c) {
  const json b = c.body();
  const std::string password = required_string(b, "password");
  auto account = unwrap(svc.sessions().redeem_reset(required_string(b, "token")));
  check(svc.engine().set_password(account, password));
  svc.sessions().revoke_account(account);
  send_json(c.res, 200, json{{"ok", true}});
}

const std::map<std::string_view, Handler>& handlers() {
  static const std::map<std::string_view, Handler> table = {
      {"login", h_login},
      {"logout", h_logout},
      {"me", h_me},
      {"apply", h_apply},
      {"application_decision", h_application_decision},
      {"application_trial", h_application_trial},
      {"request_book", h_request_book},
      {"demanded_books", h_demanded},
      {"my_requests", h_my_requests},
      {"book_details", h_book_details},
      {"book_parts", h_book_parts},
      {"claim", h_claim},
      {"claim_decision", h_claim_decision},
      {"upload_begin", h_upload_begin},
      {"upload_status", h_upload_status},
      {"upload_chunk", h_upload_chunk},
      {"upload_commit", h_upload_commit},
      {"submit_part", h_submit_part},
      {"part_decision", h_part_decision},
      {"book_complete", h_book_complete},
      {"part_audio", h_part_audio},
      {"catalog_recent", h_recent},
      {"catalog_mostly_read", h_mostly_read},
      {"catalog_search", h_search},
      {"assignments", h_assignments},
      {"pending_reviews", h_pending},
      {"send_message", h_send_message},
      {"inbox", h_inbox},
      {"add_friend", h_add_friend},
      {"friends", h_friends},
      {"guestbook_sign", h_guestbook_sign},
      {"guestbook_list", h_guestbook_list},
      {"guestbook_visibility", h_guestbook_visibility},
      {"item_publish", h_item_publish},
      {"item_retract", h_item_retract},
      {"items", h_items},
      {"account_update", h_account_update},
      {"account_status", h_account_status},
      {"password_reset", h_password_reset},
      {"password_reset_confirm", h_password_reset_confirm},
  };
  return table;
}

void dispatch(Service& svc, const EndpointSpec& spec, const Handler& handler, const httplib::Request& req,
              httplib::Response& res) {
  Call call{spec, req, res, std::nullopt, {}};
  try {
    if (!(spec.access & kPublic)) {
      auto token = bearer_token(req);
      if (!token) reject(ErrorCode::Unauthenticated, "sign in first");
      auto session = svc.sessions().resolve(*token);
      if (!session) throw RequestError{session.error()};
      auto snap = svc.store().snapshot();
      const UserAccount* acc = snap->account(session->account);
      if (!acc || acc->status != AccountStatus::Active) reject(ErrorCode::AccountDisabled, "account disabled");
      // role column first: a caller outside it learns nothing about the
      // addressed resource
      if (!role_admits(spec, acc->role)) reject(ErrorCode::Forbidden, "not available to " + std::string(to_string(acc->role)));
      call.session = *session;
      call.token = *token;
    }
    handler(svc, call);
  } catch (const RequestError& e) {
    send_error(res, e.error);
  } catch (const json::exception& e) {
    send_error(res, Error{ErrorCode::BadRequest, e.what()});
  }
}

}  // namespace

HttpServer::HttpServer(Service& service, ServerOptions options)
    : service_(service), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::install_routes() {
  auto& svr = *server_;
  const int threads = service_.config().worker_threads;
  svr.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
  svr.set_payload_max_length(static_cast<std::size_t>(media::kMaxChunkBytes) + 1024 * 1024);
  svr.set_keep_alive_timeout(2);

  for (const auto& spec : endpoint_table()) {
    if (options_.disabled_endpoints.count(std::string(spec.id))) continue;
    const Handler& handler = handlers().at(spec.id);
    auto fn = [this, &spec, &handler](const httplib::Request& req, httplib::Response& res) {
      dispatch(service_, spec, handler, req, res);
    };
    const std::string re = pattern_regex(spec.pattern);
    if (spec.method == "GET") {
      svr.Get(re, fn);
    } else if (spec.method == "POST") {
      svr.Post(re, fn);
    } else if (spec.method == "PUT") {
      svr.Put(re, fn);
    } else if (spec.method == "PATCH") {
      svr.Patch(re, fn);
    } else if (spec.method == "DELETE") {
      svr.Delete(re, fn);
    }
  }

  if (!service_.config().static_dir.empty()) svr.set_mount_point("/", service_.config().static_dir.string());

  svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    if (res.status == 413) {
      send_error(res, Error{ErrorCode::SizeRejected, "request body too large"});
    } else if (res.status == 404) {
      send_error(res, Error{ErrorCode::NotFound, "no such endpoint"});
    } else {
      return httplib::Server::HandlerResponse::Unhandled;
    }
    return httplib::Server::HandlerResponse::Handled;
  });
  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unexpected failure";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send_error(res, Error{ErrorCode::Internal, what});
  });
}

Result<int> HttpServer::start(const std::string& host, int port) {
  if (thread_.joinable()) return Error{ErrorCode::WrongState, "already running"};
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) return Error{ErrorCode::Internal, "cannot bind " + host + ":" + std::to_string(port)};
  port_ = bound;
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

Status HttpServer::run(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) {
    return Error{ErrorCode::Internal, "cannot bind " + host + ":" + std::to_string(port)};
  }
  port_ = port;
  if (!server_->listen_after_bind()) return Error{ErrorCode::Internal, "server stopped with an error"};
  return ok_status();
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace audiolib::api
