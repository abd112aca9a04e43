#pragma once

// MPEG-1 Layer III frame walker for duration probing. No decoding; only
// frame headers are read.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "audiolib/result.hpp"

namespace audiolib::mp3 {

enum class Container { Mp3, Unknown };

struct AudioProbe {
  Container container = Container::Unknown;
  double duration_seconds = 0.0;
  std::int64_t frame_count = 0;
  int sample_rate = 0;
};

struct FrameHeader {
  int bitrate_kbps = 0;
  int sample_rate = 0;
  bool padding = false;
  std::size_t frame_length = 0;  // bytes, header included
};

inline constexpr int kSamplesPerFrame = 1152;
inline constexpr std::size_t kSyncSearchWindow = 64 * 1024;

/// Parses a 4-byte MPEG-1 Layer III header; nullopt for anything else
/// (other versions/layers, free-format or reserved fields).
std::optional<FrameHeader> parse_frame_header(std::span<const std::uint8_t> bytes);

/// Total length of the ID3v2 tag at the start of bytes, 0 if there is none.
std::size_t id3v2_tag_length(std::span<const std::uint8_t> bytes);

/// Skips leading ID3v2 tags, locates the first confirmed frame sync within
/// the first 64 KiB and walks frame headers to the end, summing 1152
/// samples per frame over each frame's sample rate. NotAudio when no frame
/// is found.
Result<AudioProbe> probe(std::span<const std::uint8_t> bytes);

}  // namespace audiolib::mp3
