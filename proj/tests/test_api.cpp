#include <gtest/gtest.h>

#include <set>

#include "api_support.hpp"
#include "audiolib/api/config.hpp"
#include "audiolib/api/endpoints.hpp"
#include "audiolib/api/sessions.hpp"

using namespace audiolib;
using audiolib::fixtures::ApiWorld;
using client::ApiClient;
using nlohmann::json;

namespace {

std::string error_of(const client::HttpReply& r) { return r.json().value("error", ""); }

// Volunteer with an assigned book and an uploaded part; returns the part code.
std::int64_t seed_part(ApiWorld& w, const std::string& bytes, bool approve) {
  auto& e = w.service->engine();
  auto imp = w.service->store().snapshot()->account_by_username("imp")->id;
  auto vol = w.service->store().snapshot()->account_by_username("vol")->id;
  auto book = e.request_book(imp, "Keloğlan Masalları " + std::to_string(bytes.size()), "Emel İpek").value();
  auto claim = e.claim_recording(vol, book).value();
  EXPECT_TRUE(e.review_claim(w.admin, claim, Decision::Approve).ok());
  auto& m = w.service->media();
  auto id = m.begin_upload(vol, static_cast<std::int64_t>(bytes.size()), crypto::sha256_hex(bytes)).value();
  EXPECT_TRUE(m.put_chunk(id, 0, fixtures::as_bytes(bytes)).ok());
  EXPECT_TRUE(m.finish_upload(id).ok());
  auto part = e.submit_part(vol, book, "Bölüm 1", id).value();
  if (approve) EXPECT_TRUE(e.review_part(w.admin, part, Decision::Approve).ok());
  return part.value;
}

}  // namespace

TEST(ApiLogin, TokensCarryTheRole) {
  ApiWorld w;
  w.add(Role::Volunteer, "vol");
  ApiClient c(w.url());
  auto r = c.call("POST", "/api/login", json{{"username", "vol"}, {"password", "password-vol"}});
  ASSERT_TRUE(r.ok()) << r.error().describe();
  EXPECT_EQ((*r)["account"]["role"], "Volunteer");
  EXPECT_FALSE((*r)["account"].contains("password_digest"));
  c.set_token((*r)["token"]);
  auto me = c.call("GET", "/api/me");
  ASSERT_TRUE(me.ok());
  EXPECT_EQ((*me)["account"]["username"], "vol");
}

TEST(ApiLogin, FailuresAreUniform) {
  ApiWorld w;
  w.add(Role::Volunteer, "vol");
  ApiClient c(w.url());
  auto wrong = c.send("POST", "/api/login", json{{"username", "vol"}, {"password", "nope-nope"}}.dump());
  auto unknown = c.send("POST", "/api/login", json{{"username", "ghost"}, {"password", "nope-nope"}}.dump());
  ASSERT_TRUE(wrong.ok() && unknown.ok());
  EXPECT_EQ(wrong->status, 401);
  EXPECT_EQ(error_of(*wrong), "AuthFailed");
  EXPECT_EQ(wrong->body, unknown->body);
}

TEST(ApiSessions, ExpiryAndLogout) {
  ApiWorld w;
  w.add(Role::Impaired, "imp");
  auto token = w.login("imp");
  ApiClient c(w.url(), token);
  ASSERT_TRUE(c.call("GET", "/api/me").ok());
  w.clock.advance(25LL * 3'600'000);
  auto expired = c.send("GET", "/api/me");
  EXPECT_EQ(expired->status, 401);
  EXPECT_EQ(error_of(*expired), "SessionExpired");
  EXPECT_EQ(error_of(*c.send("GET", "/api/catalog/recent")), "SessionExpired");

  ApiClient fresh(w.url(), w.login("imp"));
  ASSERT_TRUE(fresh.call("POST", "/api/logout").ok());
  EXPECT_EQ(error_of(*fresh.send("GET", "/api/me")), "SessionExpired");

  ApiClient bogus(w.url(), "not-a-token");
  EXPECT_EQ(error_of(*bogus.send("GET", "/api/me")), "Unauthenticated");
}

TEST(ApiSessions, ManagerRemembersRevokedTokens) {
  ManualClock clock;
  api::SessionManager m(clock.clock(), 1000);
  auto s = m.issue("acct-1", Role::Volunteer);
  EXPECT_TRUE(m.resolve(s.token).ok());
  auto other = m.issue("acct-1", Role::Volunteer);
  EXPECT_EQ(m.revoke_account("acct-1"), 2u);
  EXPECT_EQ(m.resolve(s.token).code(), ErrorCode::SessionExpired);
  EXPECT_EQ(m.resolve(other.token).code(), ErrorCode::SessionExpired);
  EXPECT_EQ(m.resolve("unknown").code(), ErrorCode::Unauthenticated);

  auto reset = m.issue_reset("acct-2", 500);
  EXPECT_EQ(*m.redeem_reset(reset), "acct-2");
  EXPECT_FALSE(m.redeem_reset(reset).ok());
  auto late = m.issue_reset("acct-2", 500);
  clock.advance(501);
  EXPECT_FALSE(m.redeem_reset(late).ok());
}

TEST(ApiAccount, CredentialChangeInvalidatesOtherSessions) {
  ApiWorld w;
  w.add(Role::Volunteer, "vol");
  w.add(Role::Volunteer, "taken");
  ApiClient a(w.url(), w.login("vol"));
  ApiClient b(w.url(), w.login("vol"));
  EXPECT_EQ(error_of(*a.send("PATCH", "/api/account", json{{"username", "taken"}}.dump())), "UsernameTaken");
  EXPECT_EQ(error_of(*a.send("PATCH", "/api/account", json{{"password", "abc"}}.dump())), "WeakPassword");
  auto changed = a.call("PATCH", "/api/account", json{{"password", "brand-new-password"}});
  ASSERT_TRUE(changed.ok());
  EXPECT_EQ(error_of(*b.send("GET", "/api/me")), "SessionExpired");
  EXPECT_EQ(error_of(*a.send("GET", "/api/me")), "SessionExpired");
  ApiClient renewed(w.url(), (*changed)["token"]);
  EXPECT_TRUE(renewed.call("GET", "/api/me").ok());
  EXPECT_FALSE(w.login("vol", "brand-new-password").empty());
  EXPECT_TRUE(w.login("vol", "password-vol").empty());
}

TEST(ApiAccount, DisablingRevokesAccess) {
  ApiWorld w;
  auto imp = w.add(Role::Impaired, "imp");
  ApiClient c(w.url(), w.login("imp"));
  ApiClient admin(w.url(), w.login("admin"));
  ASSERT_TRUE(admin.call("POST", "/api/accounts/" + imp + "/status", json{{"status", "Disabled"}}).ok());
  EXPECT_EQ(c.send("GET", "/api/me")->status, 401);
  ApiClient anon(w.url());
  auto login = anon.send("POST", "/api/login", json{{"username", "imp"}, {"password", "password-imp"}}.dump());
  EXPECT_EQ(error_of(*login), "AccountDisabled");
  ASSERT_TRUE(admin.call("POST", "/api/accounts/" + imp + "/status", json{{"status", "Active"}}).ok());
  EXPECT_FALSE(w.login("imp").empty());
}

TEST(ApiPasswordReset, SingleUseTokenThroughTheOutbox) {
  ApiWorld w;
  w.add(Role::Volunteer, "vol");
  ApiClient anon(w.url());
  auto r = anon.send("POST", "/api/password-reset", json{{"username", "vol"}}.dump());
  EXPECT_EQ(r->status, 202);
  auto ghost = anon.send("POST", "/api/password-reset", json{{"username", "ghost"}}.dump());
  EXPECT_EQ(ghost->status, 202);
  EXPECT_EQ(ghost->body, r->body);

  std::string token;
  for (const auto& e : OutboxFile::read_all(w.service->outbox().path())) {
    if (e.kind == NotificationKind::PasswordReset) token = e.payload.at("reset_token");
  }
  ASSERT_FALSE(token.empty());
  auto confirm = json{{"token", token}, {"password", "reset-password-1"}};
  EXPECT_TRUE(anon.call("POST", "/api/password-reset/confirm", confirm).ok());
  EXPECT_FALSE(anon.call("POST", "/api/password-reset/confirm", confirm).ok());
  EXPECT_FALSE(w.login("vol", "reset-password-1").empty());
}

TEST(ApiUpload, WireProtocolShapes) {
  ApiWorld w;
  w.add(Role::Volunteer, "vol");
  w.add(Role::Volunteer, "other");
  auto c = w.as("vol");
  const auto file = harness::synth_mp3({128, 44100, 100, 0, 3});
  const auto digest = crypto::sha256_hex(file);
  auto begin = c.call("POST", "/api/uploads", json{{"size", file.size()}, {"checksum", digest}});
  ASSERT_TRUE(begin.ok());
  const std::string id = (*begin)["session_id"];

  auto first = c.send("PUT", "/api/uploads/" + id + "/chunks?offset=1000", file.substr(1000), "application/octet-stream");
  ASSERT_EQ(first->status, 200);
  auto body = first->json();
  EXPECT_EQ(body.size(), 2u);
  EXPECT_EQ(body["received_bytes"], file.size() - 1000);
  EXPECT_EQ(body["complete"], false);

  // other volunteers cannot see the session
  auto other = w.as("other");
  EXPECT_EQ(error_of(*other.send("GET", "/api/uploads/" + id)), "NoSuchSession");

  auto status = c.call("GET", "/api/uploads/" + id);
  ASSERT_TRUE(status.ok());
  EXPECT_EQ((*status)["received"], json::array({json::array({1000, file.size()})}));

  auto second = c.send("PUT", "/api/uploads/" + id + "/chunks?offset=0", file.substr(0, 1000), "application/octet-stream");
  EXPECT_EQ(second->json()["complete"], true);

  auto bad = c.send("POST", "/api/uploads/" + id + "/commit", json{{"checksum", std::string(64, '0')}}.dump());
  EXPECT_EQ(error_of(*bad), "ChecksumMismatch");
  auto commit = c.send("POST", "/api/uploads/" + id + "/commit", json{{"checksum", digest}}.dump());
  ASSERT_EQ(commit->status, 200);
  auto cj = commit->json();
  EXPECT_EQ(cj.size(), 2u);
  EXPECT_TRUE(cj["blob"].is_string());
  EXPECT_NEAR(cj["duration_seconds"].get<double>(), 100 * 1152.0 / 44100, 1e-9);
}

TEST(ApiAudio, RangesAndHeaders) {
  ApiWorld w;
  w.add(Role::Impaired, "imp");
  w.add(Role::Volunteer, "vol");
  const auto bytes = fixtures::pseudo_random_bytes(1000, 11);
  auto part = seed_part(w, bytes, true);
  auto c = w.as("imp");
  const std::string path = "/api/parts/" + std::to_string(part) + "/audio";

  auto whole = c.send("GET", path);
  ASSERT_EQ(whole->status, 200);
  EXPECT_EQ(whole->body, bytes);
  EXPECT_EQ(whole->header("Accept-Ranges"), "bytes");
  EXPECT_EQ(whole->header("X-Playback-Mode"), "Download");

  auto slice = c.send("GET", path, {}, "application/json", {{"Range", "bytes=100-199"}});
  ASSERT_EQ(slice->status, 206);
  EXPECT_EQ(slice->body, bytes.substr(100, 100));
  EXPECT_EQ(slice->header("Content-Range"), "bytes 100-199/1000");
  EXPECT_EQ(slice->header("X-Playback-Mode"), "Stream");

  auto suffix = c.send("GET", path, {}, "application/json", {{"Range", "bytes=-100"}});
  ASSERT_EQ(suffix->status, 206);
  EXPECT_EQ(suffix->body, bytes.substr(900));

  auto open_end = c.send("GET", path, {}, "application/json", {{"Range", "bytes=990-"}});
  ASSERT_EQ(open_end->status, 206);
  EXPECT_EQ(open_end->body, bytes.substr(990));

  auto multi = c.send("GET", path, {}, "application/json", {{"Range", "bytes=0-1,5-6"}});
  EXPECT_EQ(multi->status, 416);
  auto outside = c.send("GET", path, {}, "application/json", {{"Range", "bytes=5000-6000"}});
  EXPECT_EQ(outside->status, 416);

  auto counts = w.service->delivery().playback_counts();
  EXPECT_EQ(counts.by_part[PartCode{part}], 4);
}

TEST(ApiAudio, UnpublishedPartsStayHidden) {
  ApiWorld w;
  w.add(Role::Impaired, "imp");
  w.add(Role::Volunteer, "vol");
  auto part = seed_part(w, fixtures::pseudo_random_bytes(500, 12), false);
  const std::string path = "/api/parts/" + std::to_string(part) + "/audio";
  auto imp = w.as("imp");
  EXPECT_EQ(error_of(*imp.send("GET", path)), "NotPublished");
  auto vol = w.as("vol");
  EXPECT_EQ(vol.send("GET", path)->status, 200);
  auto admin = w.as("admin");
  auto audition = admin.send("GET", path);
  EXPECT_EQ(audition->status, 200);
  EXPECT_EQ(audition->header("X-Playback-Mode"), "");
}

TEST(ApiMisc, UnknownRoutesAnswerJson404) {
  ApiWorld w;
  ApiClient c(w.url());
  auto r = c.send("GET", "/api/nothing-here");
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(error_of(*r), "NotFound");
  auto bad = c.send("POST", "/api/login", "{not json");
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(error_of(*bad), "BadRequest");
}

TEST(ApiMisc, DisabledEndpointsAreNotRouted) {
  fixtures::TempDir dir;
  api::ServiceConfig config;
  config.data_dir = dir.path();
  config.password_iterations = 1000;
  auto service = api::Service::open(config).value();
  api::HttpServer server(*service, api::ServerOptions{{"items"}});
  auto port = server.start("127.0.0.1", 0).value();
  ApiClient c("http://127.0.0.1:" + std::to_string(port));
  EXPECT_EQ(c.send("GET", "/api/items")->status, 404);
  EXPECT_EQ(c.send("GET", "/api/guestbook")->status, 200);
  server.stop();
}

TEST(ApiMisc, ApplicationWithTrialOverMultipart) {
  ApiWorld w;
  ApiClient anon(w.url());
  const auto trial = harness::synth_mp3({64, 32000, 100, 0, 2});
  auto r = anon.post_multipart("/api/applications",
                               {{"desired_role", "Volunteer"},
                                {"full_name", "Ayşe Yılmaz"},
                                {"email", "ayse@example.org"},
                                {"username", "ayse"}},
                               trial);
  ASSERT_TRUE(r.ok()) << r.error().describe();
  const std::string app = (*r)["application_id"];
  auto missing = anon.send_multipart("/api/applications",
                                     {{"desired_role", "Volunteer"},
                                      {"full_name", "Can"},
                                      {"email", "can@example.org"},
                                      {"username", "can"}},
                                     std::nullopt);
  EXPECT_EQ(error_of(*missing), "ValidationFailed");

  auto admin = w.as("admin");
  auto audio = admin.send("GET", "/api/applications/" + app + "/trial");
  ASSERT_EQ(audio->status, 200);
  EXPECT_EQ(audio->body, trial);
  auto decided = admin.call("POST", "/api/applications/" + app + "/decision", json{{"decision", "approve"}});
  ASSERT_TRUE(decided.ok()) << decided.error().describe();
  std::string password;
  for (const auto& e : OutboxFile::read_all(w.service->outbox().path())) {
    if (e.kind == NotificationKind::CredentialsIssued) password = e.payload.at("password");
  }
  EXPECT_FALSE(w.login("ayse", password).empty());
}

TEST(ApiEndpoints, TableIsConsistent) {
  std::set<std::string> ids;
  for (const auto& e : api::endpoint_table()) {
    EXPECT_TRUE(ids.insert(std::string(e.id)).second) << e.id;
    EXPECT_EQ(api::find_endpoint(e.id), &e);
    EXPECT_NE(e.access, 0u);
  }
  EXPECT_EQ(api::expand("/api/parts/{code}/audio", {"300110"}), "/api/parts/300110/audio");
  EXPECT_EQ(api::access_label(api::kImpaired | api::kAdmin | api::kOwningVolunteer), "IA+V(owner)");
  EXPECT_EQ(api::access_label(api::kPublic), "P");
}

TEST(ApiConfig, FileAndEnvironment) {
  api::ServiceConfig c;
  ASSERT_TRUE(api::apply_config_text(c, "# comment\nlisten_port = 9090\n\ndata_dir=/srv/audio\nsession_ttl_hours=2\n").ok());
  EXPECT_EQ(c.listen_port, 9090);
  EXPECT_EQ(c.data_dir, "/srv/audio");
  EXPECT_EQ(c.session_ttl_hours, 2);
  EXPECT_FALSE(api::apply_config_text(c, "nonsense_key=1").ok());
  EXPECT_FALSE(api::apply_config_text(c, "listen_port=abc").ok());
  auto lookup = [](const char* name) -> std::optional<std::string> {
    if (std::string(name) == "LISTEN_PORT") return "7000";
    if (std::string(name) == "MAX_UPLOAD_BYTES") return "1024";
    return std::nullopt;
  };
  ASSERT_TRUE(api::apply_environment(c, lookup).ok());
  EXPECT_EQ(c.listen_port, 7000);
  EXPECT_EQ(c.max_upload_bytes, 1024);
  EXPECT_EQ(c.data_dir, "/srv/audio");
}
