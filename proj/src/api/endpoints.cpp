#include "audiolib/api/endpoints.hpp"

namespace audiolib::api {

namespace {
constexpr unsigned kMembers = kVolunteer | kImpaired | kAdmin;
}

const std::vector<EndpointSpec>& endpoint_table() {
  static const std::vector<EndpointSpec> table = {
      {"login", "POST", "/api/login", kPublic},
      {"logout", "POST", "/api/logout", kMembers},
      {"me", "GET", "/api/me", kMembers},
      {"apply", "POST", "/api/applications", kPublic},
      {"application_decision", "POST", "/api/applications/{id}/decision", kAdmin},
      {"application_trial", "GET", "/api/applications/{id}/trial", kAdmin},
      {"request_book", "POST", "/api/books", kImpaired},
      {"demanded_books", "GET", "/api/books/demanded", kVolunteer | kAdmin},
      {"my_requests", "GET", "/api/books/mine", kImpaired},
      {"book_details", "GET", "/api/books/{code}", kMembers},
      {"book_parts", "GET", "/api/books/{code}/parts", kMembers},
      {"claim", "POST", "/api/books/{code}/claims", kVolunteer},
      {"claim_decision", "POST", "/api/claims/{id}/decision", kAdmin},
      {"upload_begin", "POST", "/api/uploads", kVolunteer},
      {"upload_status", "GET", "/api/uploads/{id}", kVolunteer},
      {"upload_chunk", "PUT", "/api/uploads/{id}/chunks", kVolunteer},
      {"upload_commit", "POST", "/api/uploads/{id}/commit", kVolunteer},
      {"submit_part", "POST", "/api/books/{code}/parts", kVolunteer},
      {"part_decision", "POST", "/api/parts/{code}/decision", kAdmin},
      {"book_complete", "POST", "/api/books/{code}/complete", kAdmin},
      {"part_audio", "GET", "/api/parts/{code}/audio", kImpaired | kAdmin | kOwningVolunteer},
      {"catalog_recent", "GET", "/api/catalog/recent", kMembers},
      {"catalog_mostly_read", "GET", "/api/catalog/mostly-read", kMembers},
      {"catalog_search", "GET", "/api/catalog/search", kMembers},
      {"assignments", "GET", "/api/assignments", kVolunteer},
      {"pending_reviews", "GET", "/api/reviews/pending", kAdmin},
      {"send_message", "POST", "/api/messages", kMembers},
      {"inbox", "GET", "/api/messages", kMembers},
      {"add_friend", "POST", "/api/friends", kMembers},
      {"friends", "GET", "/api/friends", kMembers},
      {"guestbook_sign", "POST", "/api/guestbook", kPublic},
      {"guestbook_list", "GET", "/api/guestbook", kPublic},
      {"guestbook_visibility", "POST", "/api/guestbook/{id}/visibility", kAdmin},
      {"item_publish", "POST", "/api/items", kAdmin},
      {"item_retract", "DELETE", "/api/items/{id}", kAdmin},
      {"items", "GET", "/api/items", kPublic},
      {"account_update", "PATCH", "/api/account", kMembers},
      {"account_status", "POST", "/api/accounts/{id}/status", kAdmin},
      {"password_reset", "POST", "/api/password-reset", kPublic},
      {"password_reset_confirm", "POST", "/api/password-reset/confirm", kPublic},
  };
  return table;
}

const EndpointSpec* find_endpoint(std::string_view id) {
  for (const auto& e : endpoint_table()) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::string expand(std::string_view pattern, const std::vector<std::string>& args) {
  std::string out;
  std::size_t next = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '{') {
      const auto close = pattern.find('}', i);
      out += next < args.size() ? args[next] : std::string();
      ++next;
      i = close;
    } else {
      out.push_back(pattern[i]);
    }
  }
  return out;
}

std::string pattern_regex(std::string_view pattern) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '{') {
      const auto close = pattern.find('}', i);
      out += pattern.substr(i + 1, close - i - 1) == "code" ? "([0-9]+)" : "([A-Za-z0-9_-]+)";
      i = close;
    } else if (pattern[i] == '.') {
      out.push_back('\\');
      out.push_back(pattern[i]);
    } else {
      out.push_back(pattern[i]);
    }
  }
  return out;
}

bool role_admits(const EndpointSpec& e, std::optional<Role> role) noexcept {
  if (e.access & kPublic) return true;
  if (!role) return false;
  switch (*role) {
    case Role::Volunteer: return (e.access & (kVolunteer | kOwningVolunteer)) != 0;
    case Role::Impaired: return (e.access & kImpaired) != 0;
    case Role::Admin: return (e.access & kAdmin) != 0;
  }
  return false;
}

std::string access_label(unsigned access) {
  if (access & kPublic) return "P";
  std::string out;
  if (access & kVolunteer) out += "V";
  if (access & kImpaired) out += "I";
  if (access & kAdmin) out += "A";
  if (access & kOwningVolunteer) out += "+V(owner)";
  return out;
}

}  // namespace audiolib::api
