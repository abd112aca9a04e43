#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>

#include "audiolib/domain.hpp"

namespace audiolib {

using Clock = std::function<Timestamp()>;

inline Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

/// Test clock; copies share the same underlying time.
class ManualClock {
 public:
  explicit ManualClock(Timestamp start = 1'334'912'400'000) : now_(std::make_shared<std::atomic<Timestamp>>(start)) {}

  Timestamp now() const { return now_->load(); }
  void advance(Timestamp ms) { now_->fetch_add(ms); }
  void set(Timestamp t) { now_->store(t); }

  Clock clock() const {
    auto shared = now_;
    return [shared] { return shared->load(); };
  }

 private:
  std::shared_ptr<std::atomic<Timestamp>> now_;
};

}  // namespace audiolib
