#include "audiolib/client/cli.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace audiolib::client {

using nlohmann::json;

namespace {

constexpr const char* kDefaultServer = "http://127.0.0.1:8080";

int report(CliContext& ctx, const Error& e) {
  ctx.err << "error: " << to_string(e.code) << ": " << e.detail << "\n";
  switch (e.code) {
    case ErrorCode::NotAssigned:
      ctx.err << "hint: claim the book and wait for an admin to approve the claim before uploading\n";
      break;
    case ErrorCode::ChecksumMismatch:
      ctx.err << "hint: the file changed while it was being uploaded; rerun to start a fresh upload\n";
      break;
    case ErrorCode::UploadIncomplete:
    case ErrorCode::IncompleteUpload:
      ctx.err << "hint: rerun the same command to resume the upload\n";
      break;
    case ErrorCode::SessionExpired:
    case ErrorCode::Unauthenticated:
      ctx.err << "hint: run `login` again\n";
      break;
    default:
      break;
  }
  return e.code == ErrorCode::ConnectFailed ? kExitNetwork : kExitDomain;
}

std::string cell(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return "-";
  if (it->is_string()) return it->get<std::string>();
  return it->dump();
}

void print_rows(CliContext& ctx, const json& rows, std::initializer_list<const char*> columns) {
  for (const auto& row : rows) {
    bool first = true;
    for (const char* c : columns) {
      if (!first) ctx.out << '\t';
      ctx.out << cell(row, c);
      first = false;
    }
    ctx.out << '\n';
  }
}

std::string queue_kind(const std::string& kind) {
  if (kind == "applications" || kind == "application") return "applications";
  if (kind == "claims" || kind == "claim") return "claims";
  if (kind == "parts" || kind == "part") return "parts";
  return {};
}

}  // namespace

std::filesystem::path default_profile_path() {
  if (const char* p = std::getenv("AUDIOLIB_PROFILE"); p && *p) return p;
  if (const char* x = std::getenv("XDG_CONFIG_HOME"); x && *x) return std::filesystem::path(x) / "audiolib" / "profile.json";
  const char* home = std::getenv("HOME");
  return std::filesystem::path(home ? home : ".") / ".config" / "audiolib" / "profile.json";
}

std::optional<Profile> read_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  auto j = json::parse(in, nullptr, false);
  if (!j.is_object()) return std::nullopt;
  return Profile{j.value("server", ""), j.value("token", ""), j.value("username", ""), j.value("role", ""),
                 j.value("account_id", "")};
}

Status write_profile(const std::filesystem::path& path, const Profile& p) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    std::filesystem::permissions(path.parent_path(), std::filesystem::perms::owner_all,
                                 std::filesystem::perm_options::replace, ec);
  }
  const std::string body = json{{"server", p.server},
                                {"token", p.token},
                                {"username", p.username},
                                {"role", p.role},
                                {"account_id", p.account_id}}
                               .dump(2) +
                           "\n";
  const std::string tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (fd < 0) return Error{ErrorCode::Internal, "cannot write " + tmp};
  const bool ok = ::write(fd, body.data(), body.size()) == static_cast<ssize_t>(body.size());
  ::close(fd);
  if (!ok) return Error{ErrorCode::Internal, "cannot write " + tmp};
  std::filesystem::rename(tmp, path, ec);
  if (ec) return Error{ErrorCode::Internal, "cannot write " + path.string()};
  return ok_status();
}

int run_cli(const std::vector<std::string>& args, CliContext& ctx) {
  CLI::App app{"Audio library terminal client", "audiolib"};
  app.require_subcommand(1);
  std::string server;
  std::string profile_opt;
  bool as_json = false;
  app.add_option("--server", server, "Server base URL (default: the profile's, else " + std::string(kDefaultServer) + ")");
  app.add_option("--profile", profile_opt, "Profile file");
  app.add_flag("--json", as_json, "Machine-readable JSON output");

  auto* login = app.add_subcommand("login", "Sign in and store the session in the profile");
  std::string username, password;
  login->add_option("-u,--username", username, "User name")->required();
  login->add_option("-p,--password", password, "Password (read from standard input when omitted)");

  auto* whoami = app.add_subcommand("whoami", "Show the signed-in account");
  auto* assignments = app.add_subcommand("assignments", "Books assigned to you: code, status, title, author");

  auto* upload = app.add_subcommand("upload", "Upload a recorded part (resumes an interrupted upload)");
  std::int64_t book_code = 0;
  std::string part_name, file;
  std::size_t chunk_size = kDefaultChunkSize;
  upload->add_option("book", book_code, "Book code")->required();
  upload->add_option("name", part_name, "Part name")->required();
  upload->add_option("file", file, "Audio file")->required()->check(CLI::ExistingFile);
  upload->add_option("--chunk-size", chunk_size, "Bytes per chunk")->check(CLI::Range(std::size_t{1}, std::size_t{8} << 20));

  auto* queue = app.add_subcommand("queue", "Pending reviews: applications, claims or parts");
  std::string kind;
  queue->add_option("kind", kind, "applications | claims | parts")->required();

  auto* decide = app.add_subcommand("decide", "Approve or reject a pending item");
  std::string decide_kind, id, decision;
  decide->add_option("kind", decide_kind, "application | claim | part")->required();
  decide->add_option("id", id, "Application id, claim id or part code")->required();
  decide->add_option("decision", decision, "approve | reject")->required()->check(CLI::IsMember({"approve", "reject"}));

  auto* demand = app.add_subcommand("demand-list", "Requested books waiting for a reader: code, title, author, requested_at");

  std::vector<std::string> argv_store{"audiolib"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, ctx.out, ctx.err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  const std::filesystem::path profile_path =
      !profile_opt.empty() ? std::filesystem::path(profile_opt) : ctx.profile_path.value_or(default_profile_path());
  auto profile = read_profile(profile_path);
  if (server.empty() && profile) server = profile->server;
  if (server.empty()) {
    const char* env = std::getenv("AUDIOLIB_SERVER");
    server = env && *env ? env : kDefaultServer;
  }

  if (login->parsed()) {
    if (password.empty()) {
      if (!ctx.in || !std::getline(*ctx.in, password)) {
        ctx.err << "error: no password given\n";
        return kExitUsage;
      }
    }
    ApiClient api(server);
    auto r = api.call("POST", "/api/login", json{{"username", username}, {"password", password}});
    if (!r) return report(ctx, r.error());
    const auto& acc = (*r)["account"];
    Profile p{server, (*r)["token"].get<std::string>(), acc.value("username", ""), acc.value("role", ""),
              acc.value("id", "")};
    if (auto s = write_profile(profile_path, p); !s) return report(ctx, s.error());
    if (as_json) {
      ctx.out << json{{"username", p.username}, {"role", p.role}, {"account_id", p.account_id}}.dump() << "\n";
    } else {
      ctx.out << "logged in as " << p.username << " (" << p.role << ")\n";
    }
    return kExitOk;
  }

  if (!profile || profile->token.empty()) {
    ctx.err << "error: Unauthenticated: no stored session\nhint: run `login` first\n";
    return kExitDomain;
  }
  ApiClient api(server, profile->token);

  if (whoami->parsed()) {
    auto r = api.call("GET", "/api/me");
    if (!r) return report(ctx, r.error());
    const auto& acc = (*r)["account"];
    if (as_json) {
      ctx.out << r->dump() << "\n";
    } else {
      ctx.out << cell(acc, "username") << '\t' << cell(acc, "role") << '\t' << cell(acc, "id") << '\n';
    }
    return kExitOk;
  }

  if (assignments->parsed() || demand->parsed()) {
    auto r = api.call("GET", assignments->parsed() ? "/api/assignments" : "/api/books/demanded");
    if (!r) return report(ctx, r.error());
    if (as_json) {
      ctx.out << (*r)["books"].dump() << "\n";
    } else if (assignments->parsed()) {
      print_rows(ctx, (*r)["books"], {"code", "status", "title", "author"});
    } else {
      print_rows(ctx, (*r)["books"], {"code", "title", "author", "requested_at"});
    }
    return kExitOk;
  }

  if (upload->parsed()) {
    // fail fast instead of sending the whole file to a book we cannot fill
    auto mine = api.call("GET", "/api/assignments");
    if (!mine) return report(ctx, mine.error());
    bool assigned = false;
    for (const auto& b : (*mine)["books"]) {
      assigned = assigned || (b["code"] == book_code && b["status"] == "InRecording");
    }
    if (!assigned) {
      return report(ctx, Error{ErrorCode::NotAssigned, "book " + std::to_string(book_code) + " is not assigned to you"});
    }
    UploadPlan plan;
    plan.book = BookCode{book_code};
    plan.part_name = part_name;
    plan.file = file;
    plan.chunk_size = chunk_size;
    plan.state_file = profile_path.parent_path() / "uploads.json";
    auto r = upload_part(api, plan, ctx.upload_hooks);
    if (!r) return report(ctx, r.error());
    if (as_json) {
      ctx.out << json{{"part_code", r->part.value},
                      {"session_id", r->session_id},
                      {"digest", r->digest},
                      {"resumed", r->resumed},
                      {"duration_seconds", r->duration_seconds ? json(*r->duration_seconds) : json(nullptr)}}
                     .dump()
              << "\n";
    } else {
      ctx.out << r->part.value << "\n";
    }
    return kExitOk;
  }

  if (queue->parsed()) {
    const std::string k = queue_kind(kind);
    if (k.empty()) {
      ctx.err << "error: kind must be applications, claims or parts\n";
      return kExitUsage;
    }
    auto r = api.call("GET", "/api/reviews/pending");
    if (!r) return report(ctx, r.error());
    const json& rows = (*r)[k];
    if (as_json) {
      ctx.out << rows.dump() << "\n";
    } else if (k == "applications") {
      json flat = json::array();
      for (const auto& a : rows) {
        flat.push_back(json{{"id", a["id"]},
                            {"role", a["desired_role"]},
                            {"username", a["form"]["username"]},
                            {"full_name", a["form"]["full_name"]},
                            {"trial", a["trial_recording"].is_null() ? "no" : "yes"}});
      }
      print_rows(ctx, flat, {"id", "role", "username", "full_name", "trial"});
    } else if (k == "claims") {
      print_rows(ctx, rows, {"id", "book", "volunteer", "filed_at"});
    } else {
      print_rows(ctx, rows, {"code", "book", "seq", "name", "submitted_by", "duration_seconds"});
    }
    return kExitOk;
  }

  if (decide->parsed()) {
    const std::string k = queue_kind(decide_kind);
    std::string path;
    if (k == "applications") {
      path = "/api/applications/" + id + "/decision";
    } else if (k == "claims") {
      path = "/api/claims/" + id + "/decision";
    } else if (k == "parts") {
      path = "/api/parts/" + id + "/decision";
    } else {
      ctx.err << "error: kind must be application, claim or part\n";
      return kExitUsage;
    }
    auto r = api.call("POST", path, json{{"decision", decision}});
    if (!r) return report(ctx, r.error());
    if (as_json) {
      ctx.out << r->dump() << "\n";
    } else {
      ctx.out << "ok\n";
    }
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace audiolib::client
