#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "audiolib/domain.hpp"

namespace audiolib {

enum class NotificationKind { CredentialsIssued, ClaimDecided, PartDecided, PasswordReset };

std::string_view to_string(NotificationKind k) noexcept;
std::optional<NotificationKind> parse_notification_kind(std::string_view s) noexcept;

struct NotificationEvent {
  NotificationKind kind = NotificationKind::CredentialsIssued;
  std::string recipient_email;
  std::map<std::string, std::string> payload;
  Timestamp at = 0;

  bool operator==(const NotificationEvent&) const = default;
};

std::string encode_line(const NotificationEvent& e);
std::optional<NotificationEvent> decode_line(const std::string& line);

class NotificationSink {
 public:
  virtual ~NotificationSink() = default;
  virtual void emit(const NotificationEvent& event) = 0;
};

/// Append-only outbox file, one JSON event per line. Stands in for e-mail.
class OutboxFile final : public NotificationSink {
 public:
  explicit OutboxFile(std::filesystem::path path);
  void emit(const NotificationEvent& event) override;
  const std::filesystem::path& path() const noexcept { return path_; }

  static std::vector<NotificationEvent> read_all(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

class MemorySink final : public NotificationSink {
 public:
  void emit(const NotificationEvent& event) override;
  std::vector<NotificationEvent> events() const;

 private:
  mutable std::mutex mutex_;
  std::vector<NotificationEvent> events_;
};

}  // namespace audiolib
