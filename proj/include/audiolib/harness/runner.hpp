#pragma once

// Runs the usability task lists against a live server.
//
// A scenario document describes one profile: fixtures (synthesized audio),
// reusable macros and the ordered tasks. Each task has untimed setup steps,
// timed steps and verify steps; the task counts as completed for an actor
// when all three run without a failed expectation. Every actor of a profile
// runs its task list on its own thread; profiles run one after another.
//
// Step vocabulary (all strings undergo ${var} substitution):
//   {"call": "POST /api/...", "as": identity, "body": {...}, "expect": 201,
//    "save": {"var": "/json/pointer"}, "check": [...], "find": {...},
//    "login_as": identity, "range": "bytes=0-99", "multipart": {...},
//    "attach": fixture, "header": {"Name": "value"},
//    "bytes_match": {"fixture": f, "offset": n}, "digest_match": fixture,
//    "expect_error": "Code", "untimed": true}
//   {"do": "credentials", "username": u, "save": var}   password from the outbox
//   {"do": "transfer", "as": identity, "session": id, "fixture": f, "chunk_size": n}
//   {"use": macro, "with": {"var": value}}
// Checks: {"at": pointer, "equals" | "contains" | "lacks" | "at_least" | "not_empty": ...}

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "audiolib/harness/report.hpp"
#include "audiolib/result.hpp"

namespace audiolib::harness {

struct ScenarioDocument {
  std::string profile;
  nlohmann::json fixtures = nlohmann::json::object();
  nlohmann::json macros = nlohmann::json::object();
  nlohmann::json tasks = nlohmann::json::array();
};

Result<ScenarioDocument> parse_scenario(const nlohmann::json& doc);
Result<ScenarioDocument> load_scenario(const std::filesystem::path& file);

/// The checked-in documents, in table order (volunteer, admin, impaired).
std::vector<std::filesystem::path> default_scenario_files(const std::filesystem::path& dir);

struct RunOptions {
  std::string server_url;
  std::filesystem::path outbox_path;
  std::string admin_username;
  std::string admin_password;
  int actors = 5;
  /// Distinguishes names created by this run from earlier runs on the same
  /// server. Generated when empty.
  std::string run_id;
};

/// Aborts with ConnectFailed when the server cannot be reached at all;
/// individual task failures are recorded in the report.
Result<RunReport> run_scenarios(const std::vector<ScenarioDocument>& scenarios, const RunOptions& options);

/// Maps "METHOD /path" to the endpoint id it hits, or empty.
std::string endpoint_for(const std::string& method, const std::string& path);

}  // namespace audiolib::harness
