#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "audiolib/harness/runner.hpp"
#include "audiolib/harness/spawn.hpp"

#ifndef AUDIOLIB_SCENARIO_DIR
#define AUDIOLIB_SCENARIO_DIR "scenarios"
#endif

int main(int argc, char** argv) {
  using namespace audiolib;
  CLI::App app{"Runs the usability task lists against a server", "audiolib-scenarios"};
  bool spawn = false;
  std::string server, outbox, admin_user = "admin", admin_password, format = "text", out_file, run_id;
  std::string scenario_dir = AUDIOLIB_SCENARIO_DIR;
  std::vector<std::string> files;
  std::vector<std::string> disabled;
  int actors = 5;
  app.add_flag("--spawn", spawn, "Start a throwaway in-process server and run against it");
  app.add_option("--server", server, "Base URL of a running server");
  app.add_option("--outbox", outbox, "That server's notification outbox file (new members' passwords are read from it)");
  app.add_option("--admin-user", admin_user, "Admin account used by the scenarios");
  app.add_option("--admin-password", admin_password, "Password of --admin-user");
  app.add_option("--actors", actors, "Actors per profile")->check(CLI::Range(1, 26));
  app.add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--out", out_file, "Write the report here instead of standard output");
  app.add_option("--scenarios", scenario_dir, "Directory holding volunteer.json, admin.json and impaired.json");
  app.add_option("--file", files, "Run only these scenario documents");
  app.add_option("--run-id", run_id, "Suffix for names created by this run");
  app.add_option("--disable-endpoint", disabled, "With --spawn: leave this endpoint id unregistered");
  CLI11_PARSE(app, argc, argv);

  if (!spawn && server.empty()) {
    std::cerr << "either --spawn or --server is required\n";
    return 2;
  }
  if (!spawn && (outbox.empty() || admin_password.empty())) {
    std::cerr << "--server needs --outbox and --admin-password\n";
    return 2;
  }

  std::vector<harness::ScenarioDocument> docs;
  std::vector<std::filesystem::path> paths(files.begin(), files.end());
  if (paths.empty()) paths = harness::default_scenario_files(scenario_dir);
  for (const auto& p : paths) {
    auto doc = harness::load_scenario(p);
    if (!doc) {
      std::cerr << doc.error().describe() << "\n";
      return 2;
    }
    docs.push_back(std::move(doc).value());
  }

  std::unique_ptr<harness::SpawnedServer> spawned;
  harness::RunOptions options;
  options.actors = actors;
  options.run_id = run_id;
  if (spawn) {
    harness::SpawnOptions so;
    so.disabled_endpoints = {disabled.begin(), disabled.end()};
    auto s = harness::SpawnedServer::start(so);
    if (!s) {
      std::cerr << "spawn: " << s.error().describe() << "\n";
      return 1;
    }
    spawned = std::move(s).value();
    options.server_url = spawned->url();
    options.outbox_path = spawned->outbox();
    options.admin_username = spawned->options().admin_username;
    options.admin_password = spawned->options().admin_password;
  } else {
    options.server_url = server;
    options.outbox_path = outbox;
    options.admin_username = admin_user;
    options.admin_password = admin_password;
  }

  auto report = harness::run_scenarios(docs, options);
  if (!report) {
    std::cerr << report.error().describe() << "\n";
    return report.code() == ErrorCode::ConnectFailed ? 3 : 1;
  }
  const std::string text =
      harness::render_report(*report, format == "json" ? harness::ReportFormat::Json : harness::ReportFormat::Text);
  if (out_file.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_file);
    out << text;
    if (!out) {
      std::cerr << "cannot write " << out_file << "\n";
      return 1;
    }
  }
  return report->fully_completed() == report->task_count() ? 0 : 1;
}
