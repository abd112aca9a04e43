#pragma once

// Per-task completion grid: one row per task, one column per actor,
// average time and completion percentage.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace audiolib::harness {

struct ActorOutcome {
  bool completed = false;
  std::int64_t elapsed_ms = 0;  // timed steps only
  std::string failure;          // empty when completed
};

struct TaskResult {
  std::string name;
  std::vector<ActorOutcome> actors;

  /// Mean time of all actors, rounded to the nearest millisecond.
  std::int64_t average_ms() const;
  /// Completed actors as a whole percentage (4 of 5 -> 80).
  int completion_percent() const;
};

struct ProfileResult {
  std::string profile;
  std::vector<std::string> actor_labels;  // "A".."E"
  std::vector<TaskResult> tasks;
};

struct RunReport {
  std::vector<ProfileResult> profiles;
  std::int64_t wall_ms = 0;
  std::vector<std::string> endpoints_hit;
  std::vector<std::string> endpoints_missed;  // declared endpoints never called

  std::size_t task_count() const;
  /// Tasks every actor completed.
  std::size_t fully_completed() const;
};

enum class ReportFormat { Text, Json };

nlohmann::json report_json(const RunReport& report);
std::string render_report(const RunReport& report, ReportFormat format);

/// "A", "B", ..., "Z", "AA", ...
std::string actor_label(std::size_t index);

}  // namespace audiolib::harness
