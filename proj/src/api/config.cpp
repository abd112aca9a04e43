#include "audiolib/api/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "audiolib/text.hpp"

namespace audiolib::api {

namespace {

constexpr const char* kKeys[] = {"listen_address", "listen_port",  "data_dir",          "max_upload_bytes",
                                 "session_ttl_hours", "outbox_path", "static_dir", "password_iterations",
                                 "worker_threads"};

template <class Int>
Status parse_int(const std::string& key, const std::string& value, Int& out, Int min) {
  Int v{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || p != value.data() + value.size() || v < min) {
    return Error{ErrorCode::BadRequest, "bad value for " + key + ": " + value};
  }
  out = v;
  return ok_status();
}

Status set_key(ServiceConfig& c, const std::string& key, const std::string& value) {
  if (key == "listen_address") {
    c.listen_address = value;
  } else if (key == "listen_port") {
    return parse_int(key, value, c.listen_port, 0);
  } else if (key == "data_dir") {
    c.data_dir = value;
  } else if (key == "max_upload_bytes") {
    return parse_int<std::int64_t>(key, value, c.max_upload_bytes, 1);
  } else if (key == "session_ttl_hours") {
    return parse_int(key, value, c.session_ttl_hours, 1);
  } else if (key == "outbox_path") {
    c.outbox_path = value;
  } else if (key == "static_dir") {
    c.static_dir = value;
  } else if (key == "password_iterations") {
    return parse_int(key, value, c.password_iterations, 1);
  } else if (key == "worker_threads") {
    return parse_int(key, value, c.worker_threads, 1);
  } else {
    return Error{ErrorCode::BadRequest, "unknown config key: " + key};
  }
  return ok_status();
}

}  // namespace

Status apply_config_text(ServiceConfig& config, const std::string& content) {
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      return Error{ErrorCode::BadRequest, "line " + std::to_string(lineno) + ": expected key=value"};
    }
    if (auto s = set_key(config, text::trim(t.substr(0, eq)), text::trim(t.substr(eq + 1))); !s) return s;
  }
  return ok_status();
}

Status apply_config_file(ServiceConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return Error{ErrorCode::NotFound, "cannot read " + path.string()};
  std::stringstream ss;
  ss << in.rdbuf();
  return apply_config_text(config, ss.str());
}

Status apply_environment(ServiceConfig& config, EnvLookup lookup) {
  for (const char* key : kKeys) {
    std::string env;
    for (const char* p = key; *p; ++p) env.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(*p))));
    if (auto v = lookup(env.c_str())) {
      if (auto s = set_key(config, key, *v); !s) return s;
    }
  }
  return ok_status();
}

std::optional<std::string> getenv_lookup(const char* name) {
  if (const char* v = std::getenv(name)) return std::string(v);
  return std::nullopt;
}

}  // namespace audiolib::api
