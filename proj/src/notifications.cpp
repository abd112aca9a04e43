#include "audiolib/notifications.hpp"

#include <fstream>
#include <json.hpp>

namespace audiolib {

std::string_view to_string(NotificationKind k) noexcept {
  switch (k) {
    case NotificationKind::CredentialsIssued: return "CredentialsIssued";
    case NotificationKind::ClaimDecided: return "ClaimDecided";
    case NotificationKind::PartDecided: return "PartDecided";
    case NotificationKind::PasswordReset: return "PasswordReset";
  }
  return "?";
}

std::optional<NotificationKind> parse_notification_kind(std::string_view s) noexcept {
  for (auto k : {NotificationKind::CredentialsIssued, NotificationKind::ClaimDecided,
                 NotificationKind::PartDecided, NotificationKind::PasswordReset}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string encode_line(const NotificationEvent& e) {
  nlohmann::json j{{"kind", to_string(e.kind)},
                   {"recipient_email", e.recipient_email},
                   {"payload", e.payload},
                   {"at", e.at}};
  return j.dump();
}

std::optional<NotificationEvent> decode_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    auto kind = parse_notification_kind(j.at("kind").get<std::string>());
    if (!kind) return std::nullopt;
    NotificationEvent e;
    e.kind = *kind;
    e.recipient_email = j.at("recipient_email").get<std::string>();
    e.payload = j.at("payload").get<std::map<std::string, std::string>>();
    e.at = j.value("at", Timestamp{0});
    return e;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

OutboxFile::OutboxFile(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
}

void OutboxFile::emit(const NotificationEvent& event) {
  const std::string line = encode_line(event) + "\n";
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  out << line;
  out.flush();
}

std::vector<NotificationEvent> OutboxFile::read_all(const std::filesystem::path& path) {
  std::vector<NotificationEvent> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (auto e = decode_line(line)) out.push_back(std::move(*e));
  }
  return out;
}

void MemorySink::emit(const NotificationEvent& event) {
  std::lock_guard lock(mutex_);
  events_.push_back(event);
}

std::vector<NotificationEvent> MemorySink::events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

}  // namespace audiolib
