#include "audiolib/harness/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace audiolib::harness {

using nlohmann::json;

std::int64_t TaskResult::average_ms() const {
  if (actors.empty()) return 0;
  std::int64_t sum = 0;
  for (const auto& a : actors) sum += a.elapsed_ms;
  const auto n = static_cast<std::int64_t>(actors.size());
  return (sum + n / 2) / n;
}

int TaskResult::completion_percent() const {
  if (actors.empty()) return 0;
  const auto done = std::count_if(actors.begin(), actors.end(), [](const ActorOutcome& a) { return a.completed; });
  const auto n = static_cast<long>(actors.size());
  return static_cast<int>((done * 100 + n / 2) / n);
}

std::size_t RunReport::task_count() const {
  std::size_t n = 0;
  for (const auto& p : profiles) n += p.tasks.size();
  return n;
}

std::size_t RunReport::fully_completed() const {
  std::size_t n = 0;
  for (const auto& p : profiles) {
    for (const auto& t : p.tasks) n += t.completion_percent() == 100 ? 1 : 0;
  }
  return n;
}

std::string actor_label(std::size_t index) {
  std::string out;
  ++index;
  while (index > 0) {
    --index;
    out.insert(out.begin(), static_cast<char>('A' + index % 26));
    index /= 26;
  }
  return out;
}

json report_json(const RunReport& report) {
  json profiles = json::array();
  for (const auto& p : report.profiles) {
    json tasks = json::array();
    for (const auto& t : p.tasks) {
      json times = json::array();
      json status = json::array();
      json failures = json::object();
      for (std::size_t i = 0; i < t.actors.size(); ++i) {
        times.push_back(t.actors[i].elapsed_ms);
        status.push_back(t.actors[i].completed ? "+" : "-");
        if (!t.actors[i].completed) failures[p.actor_labels.at(i)] = t.actors[i].failure;
      }
      tasks.push_back(json{{"task", t.name},
                           {"time_ms", times},
                           {"average_ms", t.average_ms()},
                           {"status", status},
                           {"completion_percent", t.completion_percent()},
                           {"failures", failures}});
    }
    profiles.push_back(json{{"profile", p.profile}, {"actors", p.actor_labels}, {"tasks", tasks}});
  }
  return json{{"profiles", profiles},
              {"task_count", report.task_count()},
              {"fully_completed", report.fully_completed()},
              {"wall_ms", report.wall_ms},
              {"endpoints_hit", report.endpoints_hit},
              {"endpoints_missed", report.endpoints_missed}};
}

namespace {

std::string pad(const std::string& s, std::size_t width) {
  // width in code points, so task names with curly quotes line up
  std::size_t cps = 0;
  for (unsigned char c : s) cps += (c & 0xC0) != 0x80 ? 1 : 0;
  return cps >= width ? s : s + std::string(width - cps, ' ');
}

std::string render_text(const RunReport& report) {
  std::ostringstream out;
  for (const auto& p : report.profiles) {
    std::size_t name_width = 5;
    for (const auto& t : p.tasks) {
      std::size_t cps = 0;
      for (unsigned char c : t.name) cps += (c & 0xC0) != 0x80 ? 1 : 0;
      name_width = std::max(name_width, cps);
    }
    out << p.profile << "\n";
    out << pad("Tasks", name_width) << "  Time (ms)";
    for (std::size_t i = 1; i < p.actor_labels.size(); ++i) out << "       ";
    out << "  Completion\n";
    out << pad("", name_width);
    for (const auto& l : p.actor_labels) {
      char buf[16];
      std::snprintf(buf, sizeof buf, " %6s", l.c_str());
      out << buf;
    }
    out << "     Avg ";
    for (const auto& l : p.actor_labels) out << " " << l;
    out << "    %\n";
    for (const auto& t : p.tasks) {
      out << pad(t.name, name_width);
      for (const auto& a : t.actors) {
        char buf[16];
        std::snprintf(buf, sizeof buf, " %6lld", static_cast<long long>(a.elapsed_ms));
        out << buf;
      }
      char avg[24];
      std::snprintf(avg, sizeof avg, " %7lld ", static_cast<long long>(t.average_ms()));
      out << avg;
      for (const auto& a : t.actors) out << " " << (a.completed ? '+' : '-');
      char pct[16];
      std::snprintf(pct, sizeof pct, " %4d\n", t.completion_percent());
      out << pct;
    }
    for (std::size_t ti = 0; ti < p.tasks.size(); ++ti) {
      const auto& t = p.tasks[ti];
      for (std::size_t i = 0; i < t.actors.size(); ++i) {
        if (!t.actors[i].completed) {
          out << "  ! " << t.name << " [" << p.actor_labels[i] << "]: " << t.actors[i].failure << "\n";
        }
      }
    }
    out << "\n";
  }
  out << "Tasks fully completed: " << report.fully_completed() << "/" << report.task_count() << "\n";
  out << "Wall time: " << report.wall_ms << " ms\n";
  out << "Endpoints exercised: " << report.endpoints_hit.size() << ", not exercised: " << report.endpoints_missed.size();
  for (const auto& m : report.endpoints_missed) out << " " << m;
  out << "\n";
  return out.str();
}

}  // namespace

std::string render_report(const RunReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) return report_json(report).dump(2) + "\n";
  return render_text(report);
}

}  // namespace audiolib::harness
