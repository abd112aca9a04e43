#include <gtest/gtest.h>

#include "audiolib/harness/report.hpp"
#include "audiolib/harness/runner.hpp"
#include "audiolib/harness/spawn.hpp"

using namespace audiolib;
using namespace audiolib::harness;

namespace {

std::vector<ScenarioDocument> load_all() {
  std::vector<ScenarioDocument> docs;
  for (const auto& p : default_scenario_files(AUDIOLIB_SCENARIO_DIR)) docs.push_back(load_scenario(p).value());
  return docs;
}

RunReport run_spawned(int actors, std::set<std::string> disabled = {}) {
  SpawnOptions so;
  so.password_iterations = 1000;
  so.disabled_endpoints = std::move(disabled);
  auto server = SpawnedServer::start(so).value();
  RunOptions o;
  o.server_url = server->url();
  o.outbox_path = server->outbox();
  o.admin_username = so.admin_username;
  o.admin_password = so.admin_password;
  o.actors = actors;
  return run_scenarios(load_all(), o).value();
}

const TaskResult* task_named(const RunReport& r, const std::string& name) {
  for (const auto& p : r.profiles) {
    for (const auto& t : p.tasks) {
      if (t.name == name) return &t;
    }
  }
  return nullptr;
}

}  // namespace

TEST(Report, CompletionAndAverage) {
  TaskResult t{"x", {{true, 10, ""}, {true, 20, ""}, {false, 30, "no"}, {true, 40, ""}, {true, 51, ""}}};
  EXPECT_EQ(t.completion_percent(), 80);
  EXPECT_EQ(t.average_ms(), 30);  // 151 / 5 = 30.2
  TaskResult thirds{"y", {{true, 1, ""}, {true, 1, ""}, {false, 1, ""}}};
  EXPECT_EQ(thirds.completion_percent(), 67);
}

TEST(Report, ActorLabels) {
  EXPECT_EQ(actor_label(0), "A");
  EXPECT_EQ(actor_label(4), "E");
  EXPECT_EQ(actor_label(25), "Z");
  EXPECT_EQ(actor_label(26), "AA");
}

TEST(Report, TextAndJsonCarryTheSameNumbers) {
  RunReport r;
  ProfileResult p{"volunteer", {"A", "B"}, {}};
  p.tasks.push_back(TaskResult{"Logging in", {{true, 120, ""}, {false, 80, "boom"}}});
  r.profiles.push_back(p);
  auto j = report_json(r);
  EXPECT_EQ(j["profiles"][0]["tasks"][0]["completion_percent"], 50);
  EXPECT_EQ(j["profiles"][0]["tasks"][0]["average_ms"], 100);
  EXPECT_EQ(j["profiles"][0]["tasks"][0]["failures"]["B"], "boom");
  EXPECT_EQ(nlohmann::json::parse(render_report(r, ReportFormat::Json)), j);
  const auto text = render_report(r, ReportFormat::Text);
  EXPECT_NE(text.find("Logging in"), std::string::npos);
  EXPECT_NE(text.find("120"), std::string::npos);
  EXPECT_NE(text.find("50"), std::string::npos);
}

TEST(Scenarios, DocumentsHoldTheTaskLists) {
  auto docs = load_all();
  ASSERT_EQ(docs.size(), 3u);
  EXPECT_EQ(docs[0].tasks.size(), 12u);
  EXPECT_EQ(docs[1].tasks.size(), 10u);
  EXPECT_EQ(docs[2].tasks.size(), 8u);
}

TEST(Scenarios, MalformedDocumentRejected) {
  EXPECT_FALSE(parse_scenario(nlohmann::json::array()).ok());
  EXPECT_FALSE(parse_scenario(nlohmann::json{{"profile", "x"}, {"tasks", 3}}).ok());
}

TEST(Scenarios, EndpointResolution) {
  EXPECT_EQ(endpoint_for("POST", "/api/login"), "login");
  EXPECT_EQ(endpoint_for("GET", "/api/parts/300110/audio"), "part_audio");
  EXPECT_EQ(endpoint_for("DELETE", "/api/login"), "");
  EXPECT_EQ(endpoint_for("GET", "/nowhere"), "");
}

TEST(Scenarios, RunsAreRepeatable) {
  auto first = run_spawned(1);
  auto second = run_spawned(1);
  ASSERT_EQ(first.task_count(), 30u);
  EXPECT_EQ(first.fully_completed(), 30u);
  EXPECT_EQ(second.fully_completed(), first.fully_completed());
  EXPECT_EQ(first.endpoints_hit, second.endpoints_hit);
}

TEST(Scenarios, DisabledEndpointFailsItsTask) {
  auto r = run_spawned(1, {"part_decision"});
  const auto* t = task_named(r, "The procedures for the approval of the recorded books");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->completion_percent(), 0);
  EXPECT_FALSE(t->actors[0].failure.empty());
  EXPECT_LT(r.fully_completed(), r.task_count());
  // tasks that never touch part review still pass
  const auto* login = task_named(r, "Logging in to admins’ panel");
  ASSERT_NE(login, nullptr);
  EXPECT_EQ(login->completion_percent(), 100);
}
