#pragma once

// Everything one server instance owns, wired together over one data
// directory.

#include <memory>

#include "audiolib/api/config.hpp"
#include "audiolib/api/sessions.hpp"
#include "audiolib/catalog.hpp"
#include "audiolib/clock.hpp"
#include "audiolib/community.hpp"
#include "audiolib/delivery.hpp"
#include "audiolib/media.hpp"
#include "audiolib/notifications.hpp"
#include "audiolib/store.hpp"
#include "audiolib/workflow.hpp"

namespace audiolib::api {

class Service {
 public:
  /// Opens (or initializes) the data directory named by the config.
  static Result<std::unique_ptr<Service>> open(const ServiceConfig& config, Clock clock = system_clock());

  const ServiceConfig& config() const noexcept { return config_; }
  store::Store& store() noexcept { return *store_; }
  media::MediaStore& media() noexcept { return media_; }
  OutboxFile& outbox() noexcept { return outbox_; }
  WorkflowEngine& engine() noexcept { return engine_; }
  Catalog& catalog() noexcept { return catalog_; }
  Delivery& delivery() noexcept { return delivery_; }
  Community& community() noexcept { return community_; }
  SessionManager& sessions() noexcept { return sessions_; }
  const Clock& clock() const noexcept { return clock_; }

 private:
  Service(const ServiceConfig& config, Clock clock, std::unique_ptr<store::Store> store);

  ServiceConfig config_;
  Clock clock_;
  std::unique_ptr<store::Store> store_;
  media::MediaStore media_;
  OutboxFile outbox_;
  WorkflowEngine engine_;
  Catalog catalog_;
  Delivery delivery_;
  Community community_;
  SessionManager sessions_;
};

}  // namespace audiolib::api
