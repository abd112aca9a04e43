#include "audiolib/harness/runner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <regex>
#include <set>
#include <thread>

#include "audiolib/api/endpoints.hpp"
#include "audiolib/client/api_client.hpp"
#include "audiolib/crypto.hpp"
#include "audiolib/harness/fixtures.hpp"
#include "audiolib/notifications.hpp"

namespace audiolib::harness {

using nlohmann::json;
using client::ApiClient;
using client::HttpReply;

namespace {

struct StepFailure {
  std::string what;
};

[[noreturn]] void fail(std::string what) { throw StepFailure{std::move(what)}; }

std::string compact(const json& j) {
  std::string s = j.dump();
  if (s.size() > 160) s = s.substr(0, 157) + "...";
  return s;
}

struct RouteMatcher {
  std::string method;
  std::regex re;
  std::string id;
};

const std::vector<RouteMatcher>& routes() {
  static const std::vector<RouteMatcher> table = [] {
    std::vector<RouteMatcher> out;
    for (const auto& e : api::endpoint_table()) {
      out.push_back({std::string(e.method), std::regex(api::pattern_regex(e.pattern)), std::string(e.id)});
    }
    return out;
  }();
  return table;
}

/// State shared by every actor of a run.
struct Shared {
  const RunOptions& options;
  std::mutex mutex;
  std::set<std::string> hits;

  void record(const std::string& method, const std::string& path) {
    const std::string id = endpoint_for(method, path);
    if (id.empty()) return;
    std::lock_guard lock(mutex);
    hits.insert(id);
  }
};

struct Fixture {
  std::string bytes;
  std::string sha256;
};

using Fixtures = std::map<std::string, Fixture>;

/// The named member, or an empty object. Safe to iterate with items(),
/// unlike a temporary from json::value.
const json& member(const json& j, const char* key) {
  static const json empty = json::object();
  auto it = j.find(key);
  return it == j.end() ? empty : *it;
}

/// A JSON-pointer lookup that reports a missing path instead of throwing.
const json* at_pointer(const json& doc, const std::string& pointer) {
  if (pointer.empty()) return &doc;
  try {
    const json::json_pointer p(pointer);
    if (!doc.contains(p)) return nullptr;
    return &doc.at(p);
  } catch (const json::exception&) {
    return nullptr;
  }
}

/// Object patterns match when every listed field is equal; anything else
/// compares whole.
bool matches(const json& value, const json& pattern) {
  if (pattern.is_object() && value.is_object()) {
    for (const auto& [k, v] : pattern.items()) {
      auto it = value.find(k);
      if (it == value.end() || !matches(*it, v)) return false;
    }
    return true;
  }
  if (pattern.is_number() && value.is_number()) return pattern.get<double>() == value.get<double>();
  return value == pattern;
}

bool contains(const json& target, const json& pattern) {
  if (target.is_array()) {
    return std::any_of(target.begin(), target.end(), [&](const json& e) { return matches(e, pattern); });
  }
  if (target.is_string() && pattern.is_string()) {
    return target.get<std::string>().find(pattern.get<std::string>()) != std::string::npos;
  }
  return false;
}

class Actor {
 public:
  Actor(Shared& shared, const ScenarioDocument& doc, const Fixtures& fixtures, std::size_t index)
      : shared_(shared), doc_(doc), fixtures_(fixtures) {
    const std::string letter = actor_label(index);
    std::string profile_initial(1, doc.profile.empty() ? 'x' : static_cast<char>(std::tolower(doc.profile[0])));
    vars_["run"] = shared.options.run_id;
    vars_["actor"] = letter;
    vars_["tag"] = shared.options.run_id + profile_initial + letter;
    vars_["admin_username"] = shared.options.admin_username;
    vars_["admin_password"] = shared.options.admin_password;
    for (const auto& [name, f] : fixtures_) {
      vars_["fixture." + name + ".sha256"] = f.sha256;
      vars_["fixture." + name + ".size"] = static_cast<std::int64_t>(f.bytes.size());
    }
  }

  /// Logs the actor's admin identity in ahead of the task list.
  void prepare() {
    run_step(json{{"call", "POST /api/login"},
                  {"as", "anon"},
                  {"body", {{"username", "${admin_username}"}, {"password", "${admin_password}"}}},
                  {"login_as", "admin"}},
             false);
  }

  ActorOutcome run_task(const json& task) {
    ActorOutcome out;
    elapsed_ = std::chrono::nanoseconds{0};
    try {
      run_block(task.value("setup", json::array()), false);
      run_block(task.value("steps", json::array()), true);
      run_block(task.value("verify", json::array()), false);
      out.completed = true;
    } catch (const StepFailure& f) {
      out.failure = f.what;
    } catch (const json::exception& e) {
      out.failure = std::string("malformed step: ") + e.what();
    }
    out.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed_).count();
    return out;
  }

 private:
  void run_block(const json& steps, bool timed) {
    for (const auto& step : steps) run_step(step, timed);
  }

  void run_step(const json& step, bool timed) {
    if (step.contains("use")) {
      const std::string name = step["use"].get<std::string>();
      auto it = doc_.macros.find(name);
      if (it == doc_.macros.end()) fail("unknown macro " + name);
      for (const auto& [k, v] : member(step, "with").items()) vars_[k] = substitute(v);
      run_block(*it, timed && !step.value("untimed", false));
      return;
    }
    if (step.contains("set")) {
      for (const auto& [k, v] : step["set"].items()) vars_[interpolate(k)] = substitute(v);
      return;
    }
    if (step.contains("do")) {
      const std::string what = step["do"].get<std::string>();
      if (what == "credentials") return read_credentials(step);
      if (what == "transfer") return transfer(step);
      fail("unknown action " + what);
    }
    if (!step.contains("call")) fail("step without call: " + compact(step));

    const std::string call = interpolate(step["call"].get<std::string>());
    const auto space = call.find(' ');
    if (space == std::string::npos) fail("call must be 'METHOD /path': " + call);
    const std::string method = call.substr(0, space);
    const std::string path = call.substr(space + 1);
    ApiClient& api = client(interpolate(step.value("as", std::string("me"))));

    const auto started = std::chrono::steady_clock::now();
    Result<HttpReply> reply = Error{ErrorCode::Internal, "not sent"};
    if (step.contains("multipart")) {
      std::map<std::string, std::string> fields;
      const json form = substitute(step["multipart"]);
      for (const auto& [k, v] : form.items()) fields[k] = v.is_string() ? v.get<std::string>() : v.dump();
      std::optional<std::string> attachment;
      if (step.contains("attach")) attachment = fixture(interpolate(step["attach"].get<std::string>())).bytes;
      reply = api.send_multipart(path, fields, attachment);
    } else {
      std::map<std::string, std::string> headers;
      if (step.contains("range")) headers["Range"] = interpolate(step["range"].get<std::string>());
      const std::string body = step.contains("body") ? substitute(step["body"]).dump() : std::string();
      reply = api.send(method, path, body, "application/json", headers);
    }
    if (timed && !step.value("untimed", false)) elapsed_ += std::chrono::steady_clock::now() - started;
    if (!reply) {
      if (reply.code() == ErrorCode::ConnectFailed) throw reply.error();
      fail(call + ": " + reply.error().describe());
    }
    check_reply(step, call, *reply);
  }

  void check_reply(const json& step, const std::string& call, const HttpReply& reply) {
    const json body = reply.header("Content-Type").rfind("application/json", 0) == 0 ? reply.json() : json();
    const std::string where = call + " -> " + std::to_string(reply.status);

    if (step.contains("expect_error")) {
      const std::string code = interpolate(step["expect_error"].get<std::string>());
      if (reply.status < 400 || !body.is_object() || body.value("error", std::string()) != code) {
        fail(where + ": expected error " + code + ", got " + compact(body));
      }
    }
    if (step.contains("expect")) {
      const json& e = step["expect"];
      const bool ok = e.is_array() ? std::any_of(e.begin(), e.end(), [&](const json& s) { return s == reply.status; })
                                   : e == reply.status;
      if (!ok) fail(where + ": expected status " + e.dump() + ", body " + compact(body));
    } else if (!step.contains("expect_error") && (reply.status < 200 || reply.status >= 300)) {
      fail(where + ": " + compact(body));
    }

    for (const auto& [name, value] : member(step, "header").items()) {
      const std::string want = interpolate(value.get<std::string>());
      if (reply.header(name) != want) fail(where + ": header " + name + " is '" + reply.header(name) + "', expected " + want);
    }
    if (step.contains("bytes_match")) {
      const json spec = substitute(step["bytes_match"]);
      const Fixture& f = fixture(spec.at("fixture").get<std::string>());
      const auto offset = spec.value("offset", std::size_t{0});
      const auto length = spec.value("length", f.bytes.size() - std::min(offset, f.bytes.size()));
      if (offset > f.bytes.size() || reply.body != f.bytes.substr(offset, length)) {
        fail(where + ": body differs from fixture bytes [" + std::to_string(offset) + ", +" + std::to_string(length) +
             ") (got " + std::to_string(reply.body.size()) + " bytes)");
      }
    }
    for (const auto& [var, pointer] : member(step, "save").items()) {
      const json* v = at_pointer(body, pointer.get<std::string>());
      if (!v) fail(where + ": nothing at " + pointer.get<std::string>() + " in " + compact(body));
      vars_[interpolate(var)] = *v;
    }
    if (step.contains("login_as")) {
      const json* token = at_pointer(body, "/token");
      if (!token || !token->is_string()) fail(where + ": no token in reply");
      client(interpolate(step["login_as"].get<std::string>())).set_token(token->get<std::string>());
    }
    if (step.contains("find")) find(step["find"], body, where);
    for (const auto& c : step.value("check", json::array())) check(c, body, where);
  }

  void find(const json& spec, const json& body, const std::string& where) {
    const std::string in = spec.value("in", std::string());
    const json* list = at_pointer(body, in);
    if (!list || !list->is_array()) fail(where + ": no list at " + in);
    const json pattern = substitute(spec.value("where", json::object()));
    const json* found = nullptr;
    for (const auto& e : *list) {
      if (matches(e, pattern)) {
        found = &e;
        break;
      }
    }
    if (!found) fail(where + ": no element of " + in + " matches " + compact(pattern));
    for (const auto& [var, pointer] : member(spec, "save").items()) {
      const json* v = at_pointer(*found, pointer.get<std::string>());
      if (!v) fail(where + ": found element has nothing at " + pointer.get<std::string>());
      vars_[interpolate(var)] = *v;
    }
  }

  void check(const json& spec, const json& body, const std::string& where) {
    const json* target = nullptr;
    std::string label;
    if (spec.contains("var")) {
      label = "${" + spec["var"].get<std::string>() + "}";
      auto it = vars_.find(spec["var"].get<std::string>());
      if (it != vars_.end()) target = &*it;
    } else {
      label = spec.value("at", std::string());
      target = at_pointer(body, label);
    }
    if (!target) fail(where + ": nothing at " + label);
    if (spec.contains("equals")) {
      const json want = substitute(spec["equals"]);
      if (!matches(*target, want)) fail(where + ": " + label + " is " + compact(*target) + ", expected " + compact(want));
    }
    if (spec.contains("contains")) {
      const json want = substitute(spec["contains"]);
      if (!contains(*target, want)) fail(where + ": " + label + " lacks " + compact(want));
    }
    if (spec.contains("lacks")) {
      const json unwanted = substitute(spec["lacks"]);
      if (contains(*target, unwanted)) fail(where + ": " + label + " unexpectedly holds " + compact(unwanted));
    }
    if (spec.contains("at_least")) {
      const json bound = substitute(spec["at_least"]);
      if (!target->is_number() || target->get<double>() < bound.get<double>()) {
        fail(where + ": " + label + " is " + compact(*target) + ", expected at least " + bound.dump());
      }
    }
    if (spec.value("not_empty", false) && target->empty()) fail(where + ": " + label + " is empty");
  }

  /// Reads the credentials mailed for `username` from the outbox file.
  void read_credentials(const json& step) {
    const std::string username = interpolate(step.at("username").get<std::string>());
    const std::string var = interpolate(step.at("save").get<std::string>());
    for (int attempt = 0; attempt < 50; ++attempt) {
      const auto events = OutboxFile::read_all(shared_.options.outbox_path);
      for (auto it = events.rbegin(); it != events.rend(); ++it) {
        if (it->kind != NotificationKind::CredentialsIssued) continue;
        auto u = it->payload.find("username");
        auto p = it->payload.find("password");
        if (u != it->payload.end() && u->second == username && p != it->payload.end()) {
          vars_[var] = p->second;
          return;
        }
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    fail("no credentials mailed for " + username + " in " + shared_.options.outbox_path.string());
  }

  /// Sends a fixture as upload chunks. Never timed: transfer time depends on
  /// the link, not on the interface.
  void transfer(const json& step) {
    ApiClient& api = client(interpolate(step.value("as", std::string("me"))));
    const std::string session = substitute(step.at("session")).get<std::string>();
    const Fixture& f = fixture(interpolate(step.at("fixture").get<std::string>()));
    const std::size_t chunk = step.value("chunk_size", std::size_t{64 * 1024});
    std::vector<std::size_t> offsets;
    for (std::size_t off = 0; off < f.bytes.size(); off += chunk) offsets.push_back(off);
    if (step.value("reverse", false)) std::reverse(offsets.begin(), offsets.end());
    for (const std::size_t off : offsets) {
      auto reply = api.send("PUT", "/api/uploads/" + session + "/chunks?offset=" + std::to_string(off),
                            f.bytes.substr(off, chunk), "application/octet-stream");
      if (!reply) {
        if (reply.code() == ErrorCode::ConnectFailed) throw reply.error();
        fail("chunk at " + std::to_string(off) + ": " + reply.error().describe());
      }
      if (reply->status != 200) fail("chunk at " + std::to_string(off) + " -> " + std::to_string(reply->status) + " " + reply->body);
    }
  }

  const Fixture& fixture(const std::string& name) const {
    auto it = fixtures_.find(name);
    if (it == fixtures_.end()) fail("unknown fixture " + name);
    return it->second;
  }

  ApiClient& client(const std::string& identity) {
    auto it = clients_.find(identity);
    if (it == clients_.end()) {
      auto api = std::make_unique<ApiClient>(shared_.options.server_url);
      api->set_observer([this](const std::string& m, const std::string& p) { shared_.record(m, p); });
      it = clients_.emplace(identity, std::move(api)).first;
    }
    return *it->second;
  }

  const json& variable(const std::string& name) const {
    auto it = vars_.find(name);
    if (it == vars_.end()) fail("unknown variable " + name);
    return *it;
  }

  std::string interpolate(const std::string& s) const {
    std::string out;
    std::size_t pos = 0;
    while (true) {
      const auto open = s.find("${", pos);
      if (open == std::string::npos) break;
      const auto close = s.find('}', open);
      if (close == std::string::npos) break;
      out.append(s, pos, open - pos);
      const json& v = variable(s.substr(open + 2, close - open - 2));
      out += v.is_string() ? v.get<std::string>() : v.dump();
      pos = close + 1;
    }
    out.append(s, pos, std::string::npos);
    return out;
  }

  /// A string that is exactly "${name}" takes the variable's own type.
  json substitute(const json& j) const {
    if (j.is_string()) {
      const auto& s = j.get_ref<const std::string&>();
      if (s.size() > 3 && s.rfind("${", 0) == 0 && s.back() == '}' && s.find('}') == s.size() - 1) {
        return variable(s.substr(2, s.size() - 3));
      }
      return interpolate(s);
    }
    if (j.is_array()) {
      json out = json::array();
      for (const auto& e : j) out.push_back(substitute(e));
      return out;
    }
    if (j.is_object()) {
      json out = json::object();
      for (const auto& [k, v] : j.items()) out[interpolate(k)] = substitute(v);
      return out;
    }
    return j;
  }

  Shared& shared_;
  const ScenarioDocument& doc_;
  const Fixtures& fixtures_;
  json vars_ = json::object();
  std::map<std::string, std::unique_ptr<ApiClient>> clients_;
  std::chrono::nanoseconds elapsed_{0};
};

Result<Fixtures> build_fixtures(const json& specs) {
  Fixtures out;
  for (const auto& [name, spec] : specs.items()) {
    Mp3Spec m;
    m.bitrate_kbps = spec.value("bitrate_kbps", m.bitrate_kbps);
    m.sample_rate = spec.value("sample_rate", m.sample_rate);
    m.frames = spec.value("frames", m.frames);
    m.id3v2_bytes = spec.value("id3v2_bytes", m.id3v2_bytes);
    m.seed = spec.value("seed", m.seed);
    try {
      Fixture f{synth_mp3(m), {}};
      f.sha256 = crypto::sha256_hex(std::string_view(f.bytes));
      out.emplace(name, std::move(f));
    } catch (const std::exception& e) {
      return Error{ErrorCode::ValidationFailed, "fixture " + name + ": " + e.what()};
    }
  }
  return out;
}

std::string fresh_run_id() {
  static const char* alphabet = "abcdefghijkmnpqrstuvwxyz23456789";
  std::random_device rd;
  std::string id;
  for (int i = 0; i < 6; ++i) id += alphabet[rd() % 32];
  return id;
}

}  // namespace

std::string endpoint_for(const std::string& method, const std::string& path) {
  for (const auto& r : routes()) {
    if (r.method == method && std::regex_match(path, r.re)) return r.id;
  }
  return {};
}

Result<ScenarioDocument> parse_scenario(const json& doc) {
  if (!doc.is_object()) return Error{ErrorCode::ValidationFailed, "scenario must be a JSON object"};
  ScenarioDocument out;
  auto profile = doc.find("profile");
  if (profile == doc.end() || !profile->is_string()) return Error{ErrorCode::ValidationFailed, "missing profile"};
  out.profile = profile->get<std::string>();
  if (out.profile != "Volunteer" && out.profile != "Admin" && out.profile != "Impaired") {
    return Error{ErrorCode::ValidationFailed, "profile must be Volunteer, Admin or Impaired"};
  }
  out.fixtures = doc.value("fixtures", json::object());
  out.macros = doc.value("macros", json::object());
  out.tasks = doc.value("tasks", json::array());
  if (!out.fixtures.is_object() || !out.macros.is_object() || !out.tasks.is_array()) {
    return Error{ErrorCode::ValidationFailed, "fixtures and macros must be objects, tasks an array"};
  }
  std::set<std::string> names;
  for (const auto& t : out.tasks) {
    if (!t.is_object() || !t.contains("name") || !t["name"].is_string()) {
      return Error{ErrorCode::ValidationFailed, "every task needs a name"};
    }
    if (!names.insert(t["name"].get<std::string>()).second) {
      return Error{ErrorCode::ValidationFailed, "duplicate task " + t["name"].get<std::string>()};
    }
    for (const char* block : {"setup", "steps", "verify"}) {
      if (t.contains(block) && !t[block].is_array()) {
        return Error{ErrorCode::ValidationFailed, t["name"].get<std::string>() + ": " + block + " must be an array"};
      }
    }
  }
  for (const auto& [name, steps] : out.macros.items()) {
    if (!steps.is_array()) return Error{ErrorCode::ValidationFailed, "macro " + name + " must be an array"};
  }
  return out;
}

Result<ScenarioDocument> load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return Error{ErrorCode::NotFound, "cannot read " + file.string()};
  json doc = json::parse(in, nullptr, false, true);
  if (doc.is_discarded()) return Error{ErrorCode::ValidationFailed, file.string() + " is not valid JSON"};
  // shared fixtures and macros; the document's own entries win
  if (doc.is_object() && doc.contains("include")) {
    for (const auto& inc : doc["include"]) {
      std::ifstream sub(file.parent_path() / inc.get<std::string>());
      if (!sub) return Error{ErrorCode::NotFound, "cannot read include " + inc.get<std::string>()};
      json common = json::parse(sub, nullptr, false, true);
      if (!common.is_object()) return Error{ErrorCode::ValidationFailed, inc.get<std::string>() + " is not a JSON object"};
      for (const char* key : {"fixtures", "macros"}) {
        json merged = common.value(key, json::object());
        for (const auto& [k, v] : member(doc, key).items()) merged[k] = v;
        doc[key] = merged;
      }
    }
  }
  auto parsed = parse_scenario(doc);
  if (!parsed) return Error{parsed.code(), file.string() + ": " + parsed.error().detail};
  return parsed;
}

std::vector<std::filesystem::path> default_scenario_files(const std::filesystem::path& dir) {
  return {dir / "volunteer.json", dir / "admin.json", dir / "impaired.json"};
}

Result<RunReport> run_scenarios(const std::vector<ScenarioDocument>& scenarios, const RunOptions& options_in) {
  RunOptions options = options_in;
  if (options.run_id.empty()) options.run_id = fresh_run_id();
  if (options.actors < 1) return Error{ErrorCode::ValidationFailed, "at least one actor is needed"};

  {
    ApiClient probe(options.server_url);
    auto r = probe.send("GET", "/api/items");
    if (!r) return r.error();
  }

  Shared shared{options, {}, {}};
  RunReport report;
  const auto wall_start = std::chrono::steady_clock::now();

  for (const auto& doc : scenarios) {
    auto fixtures = build_fixtures(doc.fixtures);
    if (!fixtures) return fixtures.error();

    ProfileResult profile;
    profile.profile = doc.profile;
    for (int i = 0; i < options.actors; ++i) profile.actor_labels.push_back(actor_label(static_cast<std::size_t>(i)));
    for (const auto& t : doc.tasks) {
      profile.tasks.push_back(TaskResult{t["name"].get<std::string>(),
                                         std::vector<ActorOutcome>(static_cast<std::size_t>(options.actors))});
    }

    std::mutex abort_mutex;
    std::optional<Error> aborted;
    auto run_actor = [&](std::size_t index) {
      Actor actor(shared, doc, *fixtures, index);
      try {
        actor.prepare();
      } catch (const StepFailure& f) {
        for (auto& task : profile.tasks) task.actors[index].failure = "admin login: " + f.what;
        return;
      } catch (const Error& e) {
        std::lock_guard lock(abort_mutex);
        if (!aborted) aborted = e;
        return;
      }
      for (std::size_t t = 0; t < doc.tasks.size(); ++t) {
        try {
          profile.tasks[t].actors[index] = actor.run_task(doc.tasks[t]);
        } catch (const Error& e) {
          std::lock_guard lock(abort_mutex);
          if (!aborted) aborted = e;
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    for (int i = 0; i < options.actors; ++i) threads.emplace_back(run_actor, static_cast<std::size_t>(i));
    for (auto& t : threads) t.join();
    if (aborted) return *aborted;
    report.profiles.push_back(std::move(profile));
  }

  report.wall_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - wall_start).count();
  for (const auto& e : api::endpoint_table()) {
    (shared.hits.count(std::string(e.id)) ? report.endpoints_hit : report.endpoints_missed).emplace_back(e.id);
  }
  return report;
}

}  // namespace audiolib::harness
