#include "audiolib/api/service.hpp"

#include <system_error>

namespace audiolib::api {

Result<std::unique_ptr<Service>> Service::open(const ServiceConfig& config, Clock clock) {
  std::error_code ec;
  std::filesystem::create_directories(config.records_path().parent_path(), ec);
  if (ec) return Error{ErrorCode::Internal, "cannot create " + config.records_path().parent_path().string()};
  auto store = store::Store::open(config.records_path());
  if (!store) return store.error();
  return std::unique_ptr<Service>(new Service(config, std::move(clock), std::move(*store)));
}

Service::Service(const ServiceConfig& config, Clock clock, std::unique_ptr<store::Store> store)
    : config_(config),
      clock_(std::move(clock)),
      store_(std::move(store)),
      media_(config.blob_root(), config.max_upload_bytes),
      outbox_(config.effective_outbox()),
      engine_(*store_, media_, outbox_, clock_, EngineOptions{config.password_iterations}),
      catalog_(*store_),
      delivery_(*store_, media_, clock_),
      community_(*store_, clock_),
      sessions_(clock_, static_cast<Timestamp>(config.session_ttl_hours) * 3'600'000) {}

}  // namespace audiolib::api
