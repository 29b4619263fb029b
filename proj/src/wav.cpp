// Copyright 2026 The csskit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "csskit/io/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace csskit {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

template <typename T>
T read_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(bytes[i]) << (8 * i);
  }
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

}  // namespace

MultichannelWaveform wav_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open wav file: ", path);

  char tag[4];
  in.read(tag, 4);
  require(in.good() && std::memcmp(tag, "RIFF", 4) == 0, ErrorCode::kFormat,
          path, ": not a RIFF file");
  read_le<std::uint32_t>(in);  // riff size
  in.read(tag, 4);
  require(in.good() && std::memcmp(tag, "WAVE", 4) == 0, ErrorCode::kFormat,
          path, ": not a WAVE file");

  std::uint16_t audio_format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  std::vector<char> data;

  while (in.peek() != EOF) {
    in.read(tag, 4);
    if (!in.good()) break;
    const std::uint32_t size = read_le<std::uint32_t>(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      audio_format = read_le<std::uint16_t>(in);
      channels = read_le<std::uint16_t>(in);
      sample_rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      bits = read_le<std::uint16_t>(in);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(size);
      in.read(data.data(), size);
      require(in.good(), ErrorCode::kFormat, path, ": truncated data chunk");
      if (size % 2) in.seekg(1, std::ios::cur);
    } else {
      in.seekg(size + (size % 2), std::ios::cur);
    }
  }
  require(have_fmt, ErrorCode::kFormat, path, ": missing fmt chunk");
  require(!data.empty(), ErrorCode::kFormat, path, ": missing data chunk");
  require(channels > 0 && sample_rate > 0, ErrorCode::kFormat, path,
          ": malformed fmt chunk");
  const bool pcm16 = audio_format == kFormatPcm && bits == 16;
  const bool f32 = audio_format == kFormatFloat && bits == 32;
  require(pcm16 || f32, ErrorCode::kFormat, path, ": unsupported codec (format ",
          audio_format, ", ", bits, " bits); expected PCM16 or float32");

  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::size_t frames = data.size() / (bytes_per_sample * channels);
  MultichannelWaveform wave(static_cast<int>(sample_rate), channels, frames);
  const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data());
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::uint16_t c = 0; c < channels; ++c) {
      if (pcm16) {
        const auto raw = static_cast<std::int16_t>(
            static_cast<std::uint16_t>(p[0]) | (static_cast<std::uint16_t>(p[1]) << 8));
        wave.channels[c][i] = static_cast<double>(raw) / 32768.0;
        p += 2;
      } else {
        std::uint32_t raw = 0;
        for (int b = 0; b < 4; ++b) raw |= static_cast<std::uint32_t>(p[b]) << (8 * b);
        float f;
        std::memcpy(&f, &raw, 4);
        wave.channels[c][i] = static_cast<double>(f);
        p += 4;
      }
    }
  }
  return wave;
}

void wav_write(const std::string& path, const MultichannelWaveform& wave,
               WavFormat format) {
  wave.validate();
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::kIo, "cannot open for writing: ", path);

  const auto channels = static_cast<std::uint16_t>(wave.num_channels());
  const std::size_t frames = wave.num_samples();
  const bool pcm16 = format == WavFormat::kPcm16;
  const std::uint16_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(frames * channels * bytes_per_sample);
  const bool fact = !pcm16;
  const std::uint32_t riff_size = 4 + (8 + 16) + (fact ? 12 : 0) + 8 + data_size;

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, riff_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, pcm16 ? kFormatPcm : kFormatFloat);
  write_le<std::uint16_t>(out, channels);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(wave.sample_rate));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(wave.sample_rate) *
                                   channels * bytes_per_sample);
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(channels * bytes_per_sample));
  write_le<std::uint16_t>(out, pcm16 ? 16 : 32);
  if (fact) {
    out.write("fact", 4);
    write_le<std::uint32_t>(out, 4);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(frames));
  }
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_size);
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::uint16_t c = 0; c < channels; ++c) {
      const double v = wave.channels[c][i];
      if (pcm16) {
        double scaled = v * 32768.0;
        scaled = std::max(-32768.0, std::min(32767.0, scaled));
        write_le<std::uint16_t>(out, static_cast<std::uint16_t>(
                                         static_cast<std::int16_t>(std::lrint(scaled))));
      } else {
        const float f = static_cast<float>(v);
        std::uint32_t raw;
        std::memcpy(&raw, &f, 4);
        write_le<std::uint32_t>(out, raw);
      }
    }
  }
  require(out.good(), ErrorCode::kIo, "write failed: ", path);
}

}  // namespace csskit
