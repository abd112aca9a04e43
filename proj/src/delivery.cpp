#include "audiolib/delivery.hpp"

#include <algorithm>

#include "engine_support.hpp"

namespace audiolib {

PlaybackCounts count_playbacks(const store::State& state, std::optional<TimeWindow> window) {
  PlaybackCounts out;
  for (const auto& [key, v] : state.table<PlaybackEvent>()) {
    const auto& e = v.value;
    if (window && (e.at < window->from || e.at >= window->to)) continue;
    ++out.by_book[e.book];
    ++out.by_part[e.part];
  }
  return out;
}

Result<ByteRange> resolve_http_range(HttpRange r, std::int64_t total) {
  ByteRange out;
  if (r.first < 0 && r.last < 0) {
    out = ByteRange{0, total};
  } else if (r.first < 0) {
    out = ByteRange{std::max<std::int64_t>(0, total - r.last), total};
  } else if (r.last < 0) {
    out = ByteRange{r.first, total};
  } else if (r.last < r.first) {
    return Error{ErrorCode::RangeRejected, "last byte before first"};
  } else {
    // a last position past the end is clamped, as HTTP prescribes
    out = ByteRange{r.first, std::min(r.last + 1, total)};
  }
  if (out.begin < 0 || out.begin >= out.end || out.end > total) {
    return Error{ErrorCode::RangeRejected, to_string(out) + " outside [0," + std::to_string(total) + ")"};
  }
  return out;
}

Result<StreamGrant> Delivery::open_range(const AccountId& caller, PartCode code, std::optional<ByteRange> range) {
  return open(caller, code, range.has_value(), [&](std::int64_t total) -> Result<ByteRange> {
    ByteRange r = range.value_or(ByteRange{0, total});
    if (r.begin < 0 || r.begin >= r.end || r.end > total) {
      return Error{ErrorCode::RangeRejected, to_string(r) + " outside [0," + std::to_string(total) + ")"};
    }
    return r;
  });
}

Result<StreamGrant> Delivery::open_range(const AccountId& caller, PartCode code, HttpRange range) {
  return open(caller, code, true, [&](std::int64_t total) { return resolve_http_range(range, total); });
}

Result<StreamGrant> Delivery::open(const AccountId& caller, PartCode code, bool ranged, const Resolver& resolve) {
  auto snap = store_.snapshot();
  auto acc = detail::require_active(*snap, caller);
  if (!acc) return acc.error();
  const UserAccount& who = **acc;
  const Part* part = snap->part(code);

  // Volunteers only ever see their own uploads; whether some other part
  // exists is not revealed to them.
  if (who.role == Role::Volunteer && (!part || part->submitted_by != caller)) {
    return Error{ErrorCode::Forbidden, "not the submitting volunteer"};
  }
  if (!part) return Error{ErrorCode::NotFound, "part " + store::part_key(code)};
  const bool published = part->status == PartStatus::Approved;
  if (who.role == Role::Impaired && !published) {
    return Error{ErrorCode::NotPublished, "part " + store::part_key(code) + " is not published"};
  }

  auto size = media_.blob_size(part->audio);
  if (!size) return size.error();
  const std::int64_t total = *size;
  auto r = resolve(total);
  if (!r) return r.error();

  StreamGrant grant{code, part->audio, media_.path_of(part->audio), *r, total, std::nullopt};
  if (!published) return grant;

  const PlaybackMode mode = ranged ? PlaybackMode::Stream : PlaybackMode::Download;
  auto recorded = detail::retry_on_conflict([&]() -> Status {
    auto now = store_.snapshot();
    PlaybackEvent e{detail::next_id<PlaybackEvent>(*now, "play"), code, part->book, caller, clock_(), mode};
    store::TransactionScope scope;
    scope.create(e);
    return store_.commit(scope);
  });
  if (!recorded) return recorded.error();
  grant.recorded = mode;
  return grant;
}

Result<StreamResult> Delivery::stream_range(const AccountId& caller, PartCode part, std::optional<ByteRange> range) {
  auto grant = open_range(caller, part, range);
  if (!grant) return grant.error();
  auto bytes = media_.read_range(grant->blob_key, grant->range);
  if (!bytes) return bytes.error();
  return StreamResult{std::move(*bytes), grant->range, grant->total_size, grant->recorded};
}

PlaybackCounts Delivery::playback_counts(std::optional<TimeWindow> window) const {
  return count_playbacks(*store_.snapshot(), window);
}

}  // namespace audiolib
