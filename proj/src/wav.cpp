// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wav.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace tapbeam {

namespace {

void put_u32(std::string &out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string &out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

uint32_t get_u32(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t get_u16(const unsigned char *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

MultiChannelAudio read_wav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Data, "cannot open WAV file: " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  require(buf.size() >= 44, ErrorKind::Data, "WAV too short: " + path);
  require(std::memcmp(buf.data(), "RIFF", 4) == 0 &&
              std::memcmp(buf.data() + 8, "WAVE", 4) == 0,
          ErrorKind::Data, "not a RIFF/WAVE file: " + path);

  uint16_t format_tag = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const unsigned char *data = nullptr;
  uint32_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    uint32_t chunk_len = get_u32(&buf[pos + 4]);
    const unsigned char *body = &buf[pos + 8];
    if (pos + 8 + chunk_len > buf.size()) chunk_len = static_cast<uint32_t>(buf.size() - pos - 8);
    if (std::memcmp(&buf[pos], "fmt ", 4) == 0 && chunk_len >= 16) {
      format_tag = get_u16(body);
      channels = get_u16(body + 2);
      sample_rate = get_u32(body + 4);
      bits = get_u16(body + 14);
    } else if (std::memcmp(&buf[pos], "data", 4) == 0) {
      data = body;
      data_len = chunk_len;
    }
    pos += 8 + chunk_len + (chunk_len & 1);
  }

  require(data != nullptr && channels > 0 && sample_rate > 0, ErrorKind::Data,
          "WAV missing fmt or data chunk: " + path);

  MultiChannelAudio audio;
  audio.sample_rate = static_cast<int>(sample_rate);

  if (format_tag == 1 && bits == 16) {
    int64_t frames = data_len / (2 * channels);
    audio.samples.resize(channels, frames);
    for (int64_t t = 0; t < frames; ++t) {
      for (int c = 0; c < channels; ++c) {
        int16_t s = static_cast<int16_t>(get_u16(data + 2 * (t * channels + c)));
        audio.samples(c, t) = static_cast<double>(s) / 32768.0;
      }
    }
  } else if (format_tag == 3 && bits == 32) {
    int64_t frames = data_len / (4 * channels);
    audio.samples.resize(channels, frames);
    for (int64_t t = 0; t < frames; ++t) {
      for (int c = 0; c < channels; ++c) {
        uint32_t raw = get_u32(data + 4 * (t * channels + c));
        float f;
        std::memcpy(&f, &raw, 4);
        audio.samples(c, t) = static_cast<double>(f);
      }
    }
  } else {
    throw Error(ErrorKind::Data,
                "unsupported WAV encoding (want PCM16 or float32): " + path);
  }
  return audio;
}

void write_wav(const std::string &path, const MultiChannelAudio &audio,
               WavFormat format) {
  audio.validate();
  const int channels = audio.channels();
  const int64_t frames = audio.num_samples();
  const int bytes_per_sample = format == WavFormat::Pcm16 ? 2 : 4;
  const uint32_t data_len =
      static_cast<uint32_t>(frames * channels * bytes_per_sample);

  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  put_u32(out, 36 + data_len);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, format == WavFormat::Pcm16 ? 1 : 3);
  put_u16(out, static_cast<uint16_t>(channels));
  put_u32(out, static_cast<uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<uint32_t>(audio.sample_rate * channels * bytes_per_sample));
  put_u16(out, static_cast<uint16_t>(channels * bytes_per_sample));
  put_u16(out, static_cast<uint16_t>(8 * bytes_per_sample));
  out += "data";
  put_u32(out, data_len);

  for (int64_t t = 0; t < frames; ++t) {
    for (int c = 0; c < channels; ++c) {
      double v = audio.samples(c, t);
      if (format == WavFormat::Pcm16) {
        double scaled = v * 32768.0;
        if (scaled > 32767.0) scaled = 32767.0;
        if (scaled < -32768.0) scaled = -32768.0;
        int16_t s = static_cast<int16_t>(std::lrint(scaled));
        put_u16(out, static_cast<uint16_t>(s));
      } else {
        float f = static_cast<float>(v);
        uint32_t raw;
        std::memcpy(&raw, &f, 4);
        put_u32(out, raw);
      }
    }
  }

  std::ofstream of(path, std::ios::binary | std::ios::trunc);
  require(of.good(), ErrorKind::Data, "cannot write WAV file: " + path);
  of.write(out.data(), static_cast<std::streamsize>(out.size()));
  require(of.good(), ErrorKind::Data, "short write on WAV file: " + path);
}

}  // namespace tapbeam
