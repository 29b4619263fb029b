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

#ifndef CSSKIT_DSP_HPP_
#define CSSKIT_DSP_HPP_

#include <complex>
#include <cstddef>
#include <vector>

#include "csskit/common.hpp"
#include "csskit/wave.hpp"

namespace csskit {

enum class WindowKind { kSqrtHann };

// Analysis/synthesis parameters. The same config must be used for stft and
// the matching istft. Defaults: 16 kHz, 32 ms window, 16 ms hop, 512-point
// FFT, sqrt-Hann on both sides (constant overlap-add holds for any hop that
// divides the window length).
struct StftConfig {
  int sample_rate = 16000;
  int window_len = 512;
  int hop = 256;
  int fft_size = 512;
  WindowKind window_kind = WindowKind::kSqrtHann;

  int bins() const { return fft_size / 2 + 1; }
  void validate() const;
};

// Complex STFT tensor, laid out channel-major: data[(c*bins + f)*frames + n].
struct Spectrogram {
  int channels = 0;
  int bins = 0;
  int frames = 0;
  std::vector<std::complex<double>> data;

  Spectrogram() = default;
  Spectrogram(int c, int f, int n)
      : channels(c),
        bins(f),
        frames(n),
        data(static_cast<std::size_t>(c) * f * n, {0.0, 0.0}) {}

  std::size_t index(int c, int f, int n) const {
    return (static_cast<std::size_t>(c) * bins + f) * frames + n;
  }
  std::complex<double>& at(int c, int f, int n) { return data[index(c, f, n)]; }
  const std::complex<double>& at(int c, int f, int n) const {
    return data[index(c, f, n)];
  }

  // Single-channel view copy.
  Spectrogram channel(int c) const;
  // Frame range [begin, end) across all channels.
  Spectrogram slice_frames(int begin, int end) const;
};

// Windowed DFT analysis. Signals are reflect-padded so that every input
// sample has full overlap coverage; deterministic for fixed input.
Spectrogram stft(const MultichannelWaveform& wave, const StftConfig& cfg);

// Overlap-add synthesis with the sqrt-Hann synthesis window, truncated to
// out_len samples. istft(stft(x)) reconstructs x up to numerical precision.
MultichannelWaveform istft(const Spectrogram& spec, const StftConfig& cfg,
                           std::size_t out_len);

// Elementwise complex modulus, same (channel, bin, frame) layout.
std::vector<double> magnitude(const Spectrogram& spec);

// Magnitude of one channel as a bins x frames row-major matrix.
std::vector<double> channel_magnitude(const Spectrogram& spec, int channel);

// The analysis window (also used for synthesis).
std::vector<double> make_window(const StftConfig& cfg);

namespace fft {

// In-place iterative radix-2 transform; size must be a power of two.
// The inverse applies the 1/n factor.
void transform(std::vector<std::complex<double>>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

}  // namespace fft

}  // namespace csskit

#endif  // CSSKIT_DSP_HPP_
