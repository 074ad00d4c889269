// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAPBEAM_WAV_HPP_
#define TAPBEAM_WAV_HPP_

#include <string>

#include "audio.hpp"

namespace tapbeam {

enum class WavFormat {
  Pcm16,
  Float32,
};

// Little-endian RIFF WAVE. Reads PCM16 and IEEE float32; writes either.
MultiChannelAudio read_wav(const std::string &path);
void write_wav(const std::string &path, const MultiChannelAudio &audio,
               WavFormat format = WavFormat::Float32);

}  // namespace tapbeam

#endif  // TAPBEAM_WAV_HPP_
