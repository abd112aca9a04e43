#include "audiolib/mp3.hpp"

#include <array>

namespace audiolib::mp3 {
namespace {

constexpr std::array<int, 16> kBitratesKbps{0, 32, 40, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320, -1};
constexpr std::array<int, 4> kSampleRates{44100, 48000, 32000, -1};

std::optional<FrameHeader> header_at(std::span<const std::uint8_t> bytes, std::size_t pos) {
  if (pos + 4 > bytes.size()) return std::nullopt;
  return parse_frame_header(bytes.subspan(pos, 4));
}

// A sync is trusted only if the next frame also starts where this one says
// it ends (or the data ends exactly there).
bool confirmed_at(std::span<const std::uint8_t> bytes, std::size_t pos, const FrameHeader& h) {
  const std::size_t next = pos + h.frame_length;
  if (next == bytes.size()) return true;
  auto following = header_at(bytes, next);
  return following && following->sample_rate == h.sample_rate;
}

std::optional<std::size_t> find_sync(std::span<const std::uint8_t> bytes, std::size_t from, std::size_t limit) {
  const std::size_t stop = std::min(limit, bytes.size());
  for (std::size_t pos = from; pos + 4 <= stop; ++pos) {
    if (bytes[pos] != 0xFF) continue;
    auto h = header_at(bytes, pos);
    if (h && confirmed_at(bytes, pos, *h)) return pos;
  }
  return std::nullopt;
}

}  // namespace

std::optional<FrameHeader> parse_frame_header(std::span<const std::uint8_t> b) {
  if (b.size() < 4) return std::nullopt;
  if (b[0] != 0xFF || (b[1] & 0xE0) != 0xE0) return std::nullopt;  // 11-bit sync
  const int version = (b[1] >> 3) & 0x03;
  const int layer = (b[1] >> 1) & 0x03;
  if (version != 0x03 || layer != 0x01) return std::nullopt;  // MPEG-1, Layer III
  const int bitrate = kBitratesKbps[(b[2] >> 4) & 0x0F];
  const int rate = kSampleRates[(b[2] >> 2) & 0x03];
  if (bitrate <= 0 || rate <= 0) return std::nullopt;
  if ((b[3] & 0x03) == 0x02) return std::nullopt;  // reserved emphasis

  FrameHeader h;
  h.bitrate_kbps = bitrate;
  h.sample_rate = rate;
  h.padding = (b[2] & 0x02) != 0;
  h.frame_length = static_cast<std::size_t>(144 * bitrate * 1000 / rate) + (h.padding ? 1 : 0);
  return h;
}

std::size_t id3v2_tag_length(std::span<const std::uint8_t> b) {
  if (b.size() < 10) return 0;
  if (b[0] != 'I' || b[1] != 'D' || b[2] != '3') return 0;
  if (b[3] == 0xFF || b[4] == 0xFF) return 0;
  std::size_t size = 0;
  for (int i = 6; i < 10; ++i) {
    if (b[i] & 0x80) return 0;  // not syncsafe
    size = (size << 7) | b[i];
  }
  const bool footer = (b[5] & 0x10) != 0;
  return 10 + size + (footer ? 10 : 0);
}

Result<AudioProbe> probe(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t tag = id3v2_tag_length(bytes.subspan(pos));
    if (tag == 0) break;
    pos += tag;
  }
  if (pos >= bytes.size()) return Error{ErrorCode::NotAudio, "no audio frames"};

  auto first = find_sync(bytes, pos, pos + kSyncSearchWindow);
  if (!first) return Error{ErrorCode::NotAudio, "no MPEG-1 Layer III frame sync"};

  AudioProbe out;
  out.container = Container::Mp3;
  pos = *first;
  while (pos + 4 <= bytes.size()) {
    auto h = header_at(bytes, pos);
    if (h && pos + h->frame_length <= bytes.size()) {
      if (out.frame_count == 0) out.sample_rate = h->sample_rate;
      ++out.frame_count;
      out.duration_seconds += static_cast<double>(kSamplesPerFrame) / h->sample_rate;
      pos += h->frame_length;
      continue;
    }
    if (h) break;  // truncated final frame
    // trailing ID3v1 tag
    if (bytes.size() - pos == 128 && bytes[pos] == 'T' && bytes[pos + 1] == 'A' && bytes[pos + 2] == 'G') break;
    auto next = find_sync(bytes, pos + 1, bytes.size());
    if (!next) break;
    pos = *next;
  }
  if (out.frame_count == 0) return Error{ErrorCode::NotAudio, "no complete frames"};
  return out;
}

}  // namespace audiolib::mp3
