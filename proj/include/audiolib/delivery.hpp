#pragma once

// Byte-range access to part audio, with the publication gate and playback
// accounting.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "audiolib/clock.hpp"
#include "audiolib/domain.hpp"
#include "audiolib/intervals.hpp"
#include "audiolib/media.hpp"
#include "audiolib/store.hpp"

namespace audiolib {

/// What the caller is allowed to read, resolved before any byte moves.
struct StreamGrant {
  PartCode part;
  std::string blob_key;
  std::filesystem::path path;
  ByteRange range;
  std::int64_t total_size = 0;
  std::optional<PlaybackMode> recorded;  // empty for auditions
};

struct StreamResult {
  std::vector<std::byte> bytes;
  ByteRange range;
  std::int64_t total_size = 0;
  std::optional<PlaybackMode> recorded;
};

/// One "bytes=first-last" range as sent over HTTP; -1 marks an omitted
/// bound ("bytes=500-" or the suffix form "bytes=-500").
struct HttpRange {
  std::int64_t first = -1;
  std::int64_t last = -1;
};

/// Resolves against the blob size into a half-open range.
Result<ByteRange> resolve_http_range(HttpRange r, std::int64_t total);

struct TimeWindow {
  Timestamp from = 0;  // inclusive
  Timestamp to = 0;    // exclusive
};

struct PlaybackCounts {
  std::map<BookCode, std::int64_t> by_book;
  std::map<PartCode, std::int64_t> by_part;
};

PlaybackCounts count_playbacks(const store::State& state, std::optional<TimeWindow> window = std::nullopt);

class Delivery {
 public:
  Delivery(store::Store& store, const media::MediaStore& media, Clock clock)
      : store_(store), media_(media), clock_(std::move(clock)) {}

  /// Checks access and the range, then records a PlaybackEvent for
  /// Approved parts: Download when no range was asked for, Stream for any
  /// ranged read. Admins may audition unpublished parts and volunteers
  /// their own; neither is counted.
  Result<StreamGrant> open_range(const AccountId& caller, PartCode part, std::optional<ByteRange> range);
  Result<StreamGrant> open_range(const AccountId& caller, PartCode part, HttpRange range);

  /// open_range followed by reading the granted bytes.
  Result<StreamResult> stream_range(const AccountId& caller, PartCode part, std::optional<ByteRange> range);

  PlaybackCounts playback_counts(std::optional<TimeWindow> window = std::nullopt) const;

 private:
  using Resolver = std::function<Result<ByteRange>(std::int64_t total)>;
  Result<StreamGrant> open(const AccountId& caller, PartCode part, bool ranged, const Resolver& resolve);

  store::Store& store_;
  const media::MediaStore& media_;
  Clock clock_;
};

}  // namespace audiolib
