#include "audiolib/records_json.hpp"

#include <stdexcept>

namespace audiolib {
namespace {

using nlohmann::json;

template <class E, class Parse>
E enum_from(const json& j, const char* key, Parse parse) {
  auto parsed = parse(j.at(key).template get<std::string>());
  if (!parsed) throw std::invalid_argument(std::string("bad enum value for ") + key);
  return *parsed;
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

template <class T>
void get_optional(const json& j, const char* key, std::optional<T>& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    out.reset();
  } else {
    out = it->template get<T>();
  }
}

}  // namespace

void to_json(json& j, const BookCode& v) { j = v.value; }
void from_json(const json& j, BookCode& v) { v.value = j.get<std::int64_t>(); }
void to_json(json& j, const PartCode& v) { j = v.value; }
void from_json(const json& j, PartCode& v) { v.value = j.get<std::int64_t>(); }

void to_json(json& j, const UserAccount& v) {
  j = json{{"id", v.id},
           {"username", v.username},
           {"password_digest", v.password_digest},
           {"email", v.email},
           {"role", to_string(v.role)},
           {"status", to_string(v.status)},
           {"created_at", v.created_at}};
}

void from_json(const json& j, UserAccount& v) {
  j.at("id").get_to(v.id);
  j.at("username").get_to(v.username);
  j.at("password_digest").get_to(v.password_digest);
  j.at("email").get_to(v.email);
  v.role = enum_from<Role>(j, "role", parse_role);
  v.status = enum_from<AccountStatus>(j, "status", parse_account_status);
  j.at("created_at").get_to(v.created_at);
}

nlohmann::json public_view(const UserAccount& v) {
  return json{{"id", v.id},
              {"username", v.username},
              {"email", v.email},
              {"role", to_string(v.role)},
              {"status", to_string(v.status)}};
}

void to_json(json& j, const ApplicantForm& v) {
  j = json{{"full_name", v.full_name},
           {"email", v.email},
           {"username", v.username},
           {"phone", v.phone},
           {"notes", v.notes}};
}

void from_json(const json& j, ApplicantForm& v) {
  v.full_name = j.value("full_name", "");
  v.email = j.value("email", "");
  v.username = j.value("username", "");
  v.phone = j.value("phone", "");
  v.notes = j.value("notes", "");
}

void to_json(json& j, const MembershipApplication& v) {
  j = json{{"id", v.id},
           {"desired_role", to_string(v.desired_role)},
           {"form", v.form},
           {"status", to_string(v.status)},
           {"submitted_at", v.submitted_at}};
  put_optional(j, "trial_recording", v.trial_recording);
  put_optional(j, "decided_by", v.decided_by);
  put_optional(j, "account", v.account);
}

void from_json(const json& j, MembershipApplication& v) {
  j.at("id").get_to(v.id);
  v.desired_role = enum_from<Role>(j, "desired_role", parse_role);
  j.at("form").get_to(v.form);
  v.status = enum_from<ApplicationStatus>(j, "status", parse_application_status);
  j.at("submitted_at").get_to(v.submitted_at);
  get_optional(j, "trial_recording", v.trial_recording);
  get_optional(j, "decided_by", v.decided_by);
  get_optional(j, "account", v.account);
}

void to_json(json& j, const Book& v) {
  j = json{{"code", v.code},
           {"title", v.title},
           {"author", v.author},
           {"status", to_string(v.status)},
           {"requested_at", v.requested_at}};
  put_optional(j, "requested_by", v.requested_by);
  put_optional(j, "assigned_reader", v.assigned_reader);
}

void from_json(const json& j, Book& v) {
  j.at("code").get_to(v.code);
  j.at("title").get_to(v.title);
  j.at("author").get_to(v.author);
  v.status = enum_from<BookStatus>(j, "status", parse_book_status);
  j.at("requested_at").get_to(v.requested_at);
  get_optional(j, "requested_by", v.requested_by);
  get_optional(j, "assigned_reader", v.assigned_reader);
}

void to_json(json& j, const RecordingClaim& v) {
  j = json{{"id", v.id},
           {"book", v.book},
           {"volunteer", v.volunteer},
           {"status", to_string(v.status)},
           {"filed_at", v.filed_at}};
}

void from_json(const json& j, RecordingClaim& v) {
  j.at("id").get_to(v.id);
  j.at("book").get_to(v.book);
  j.at("volunteer").get_to(v.volunteer);
  v.status = enum_from<ClaimStatus>(j, "status", parse_claim_status);
  j.at("filed_at").get_to(v.filed_at);
}

void to_json(json& j, const Part& v) {
  j = json{{"code", v.code},
           {"book", v.book},
           {"seq", v.seq},
           {"name", v.name},
           {"added_at", v.added_at},
           {"submitted_by", v.submitted_by},
           {"audio", v.audio},
           {"upload_session", v.upload_session},
           {"size_bytes", v.size_bytes},
           {"status", to_string(v.status)}};
  put_optional(j, "duration_seconds", v.duration_seconds);
}

void from_json(const json& j, Part& v) {
  j.at("code").get_to(v.code);
  j.at("book").get_to(v.book);
  j.at("seq").get_to(v.seq);
  j.at("name").get_to(v.name);
  j.at("added_at").get_to(v.added_at);
  j.at("submitted_by").get_to(v.submitted_by);
  j.at("audio").get_to(v.audio);
  j.at("upload_session").get_to(v.upload_session);
  j.at("size_bytes").get_to(v.size_bytes);
  v.status = enum_from<PartStatus>(j, "status", parse_part_status);
  get_optional(j, "duration_seconds", v.duration_seconds);
}

void to_json(json& j, const PlaybackEvent& v) {
  j = json{{"id", v.id},
           {"part", v.part},
           {"book", v.book},
           {"listener", v.listener},
           {"at", v.at},
           {"mode", to_string(v.mode)}};
}

void from_json(const json& j, PlaybackEvent& v) {
  j.at("id").get_to(v.id);
  j.at("part").get_to(v.part);
  j.at("book").get_to(v.book);
  j.at("listener").get_to(v.listener);
  j.at("at").get_to(v.at);
  v.mode = enum_from<PlaybackMode>(j, "mode", parse_playback_mode);
}

void to_json(json& j, const Message& v) {
  j = json{{"id", v.id},     {"from", v.from},       {"to", v.to},
           {"body", v.body}, {"sent_at", v.sent_at}, {"read", v.read}};
}

void from_json(const json& j, Message& v) {
  j.at("id").get_to(v.id);
  j.at("from").get_to(v.from);
  j.at("to").get_to(v.to);
  j.at("body").get_to(v.body);
  j.at("sent_at").get_to(v.sent_at);
  j.at("read").get_to(v.read);
}

void to_json(json& j, const FriendLink& v) {
  j = json{{"owner", v.owner}, {"friend", v.friend_id}, {"added_at", v.added_at}};
}

void from_json(const json& j, FriendLink& v) {
  j.at("owner").get_to(v.owner);
  j.at("friend").get_to(v.friend_id);
  j.at("added_at").get_to(v.added_at);
}

void to_json(json& j, const GuestbookEntry& v) {
  j = json{{"id", v.id},
           {"author_name", v.author_name},
           {"body", v.body},
           {"posted_at", v.posted_at},
           {"visible", v.visible}};
}

void from_json(const json& j, GuestbookEntry& v) {
  j.at("id").get_to(v.id);
  j.at("author_name").get_to(v.author_name);
  j.at("body").get_to(v.body);
  j.at("posted_at").get_to(v.posted_at);
  j.at("visible").get_to(v.visible);
}

void to_json(json& j, const PublishedItem& v) {
  j = json{{"id", v.id},
           {"kind", to_string(v.kind)},
           {"title", v.title},
           {"body_or_url", v.body_or_url},
           {"published_at", v.published_at},
           {"author", v.author}};
}

void from_json(const json& j, PublishedItem& v) {
  j.at("id").get_to(v.id);
  v.kind = enum_from<ItemKind>(j, "kind", parse_item_kind);
  j.at("title").get_to(v.title);
  j.at("body_or_url").get_to(v.body_or_url);
  j.at("published_at").get_to(v.published_at);
  j.at("author").get_to(v.author);
}

void to_json(json& j, const UniqueKey& v) { j = json{{"key", v.key}, {"owner", v.owner}}; }

void from_json(const json& j, UniqueKey& v) {
  j.at("key").get_to(v.key);
  j.at("owner").get_to(v.owner);
}

}  // namespace audiolib
