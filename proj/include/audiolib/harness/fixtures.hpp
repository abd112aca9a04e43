#pragma once

#include <cstdint>
#include <string>

namespace audiolib::harness {

struct Mp3Spec {
  int bitrate_kbps = 128;
  int sample_rate = 44100;
  int frames = 100;
  std::size_t id3v2_bytes = 0;  // total tag size including its 10-byte header; 0 for none
  std::uint32_t seed = 1;       // payload filler
};

/// MPEG-1 Layer III stream of silent-looking frames with valid headers,
/// padded the way an encoder keeps the average bitrate exact.
std::string synth_mp3(const Mp3Spec& spec);

}  // namespace audiolib::harness
