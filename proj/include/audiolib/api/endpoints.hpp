#pragma once

// The HTTP surface as data: every route with the roles that may call it.
// The server registers handlers from this table and enforces the role
// column before touching any resource; tests and the scenario harness read
// the same table.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "audiolib/domain.hpp"

namespace audiolib::api {

enum AccessBits : unsigned {
  kPublic = 1u << 0,
  kVolunteer = 1u << 1,
  kImpaired = 1u << 2,
  kAdmin = 1u << 3,
  // the volunteer who submitted the addressed resource
  kOwningVolunteer = 1u << 4,
};

struct EndpointSpec {
  std::string_view id;
  std::string_view method;
  std::string_view pattern;  // "{code}" numeric segment, "{id}" token segment
  unsigned access = 0;
};

const std::vector<EndpointSpec>& endpoint_table();
const EndpointSpec* find_endpoint(std::string_view id);

/// Fills the placeholders in order, e.g. expand("/api/parts/{code}/audio", {"300110"}).
std::string expand(std::string_view pattern, const std::vector<std::string>& args);

/// Regex source for the pattern with one capture per placeholder.
std::string pattern_regex(std::string_view pattern);

/// Whether a caller with the given role (nullopt: anonymous) passes the
/// role column. kOwningVolunteer admits volunteers here; ownership is
/// checked against the resource afterwards.
bool role_admits(const EndpointSpec& e, std::optional<Role> role) noexcept;

/// "P", "VIA", "IA+V(owner)" ...
std::string access_label(unsigned access);

}  // namespace audiolib::api
