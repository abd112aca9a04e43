#include "audiolib/harness/fixtures.hpp"

#include <random>
#include <stdexcept>

namespace audiolib::harness {

namespace {

int bitrate_index(int kbps) {
  static const int table[] = {0, 32, 40, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320};
  for (int i = 1; i < 15; ++i) {
    if (table[i] == kbps) return i;
  }
  throw std::invalid_argument("unsupported bitrate");
}

int rate_index(int hz) {
  switch (hz) {
    case 44100: return 0;
    case 48000: return 1;
    case 32000: return 2;
  }
  throw std::invalid_argument("unsupported sample rate");
}

}  // namespace

std::string synth_mp3(const Mp3Spec& spec) {
  std::string out;
  std::mt19937 rng(spec.seed);
  if (spec.id3v2_bytes > 0) {
    if (spec.id3v2_bytes < 10) throw std::invalid_argument("tag too small");
    const std::size_t body = spec.id3v2_bytes - 10;
    out += "ID3";
    out.push_back('\x04');
    out.push_back('\x00');
    out.push_back('\x00');
    for (int shift = 21; shift >= 0; shift -= 7) out.push_back(static_cast<char>((body >> shift) & 0x7F));
    out.append(body, '\0');
  }
  const int bi = bitrate_index(spec.bitrate_kbps);
  const int ri = rate_index(spec.sample_rate);
  const std::int64_t numerator = 144LL * spec.bitrate_kbps * 1000;
  std::int64_t remainder = 0;
  for (int f = 0; f < spec.frames; ++f) {
    remainder += numerator % spec.sample_rate;
    int padding = 0;
    if (remainder >= spec.sample_rate) {
      remainder -= spec.sample_rate;
      padding = 1;
    }
    const std::size_t length = static_cast<std::size_t>(numerator / spec.sample_rate + padding);
    out.push_back('\xFF');
    out.push_back('\xFB');  // MPEG-1, Layer III, no CRC
    out.push_back(static_cast<char>((bi << 4) | (ri << 2) | (padding << 1)));
    out.push_back('\xC4');  // mono, original
    for (std::size_t i = 4; i < length; ++i) out.push_back(static_cast<char>(rng() & 0x7F));
  }
  return out;
}

}  // namespace audiolib::harness
