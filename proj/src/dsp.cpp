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

#include "csskit/dsp.hpp"

#include <algorithm>
#include <cmath>

namespace csskit {

namespace fft {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void transform(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  require(n > 0 && (n & (n - 1)) == 0, ErrorCode::kInvalidArgument,
          "fft size must be a power of two, got ", n);
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double pi = 3.14159265358979323846264338327950288;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

}  // namespace fft

void StftConfig::validate() const {
  require(sample_rate > 0, ErrorCode::kConfig, "stft: sample_rate must be > 0");
  require(window_len > 0 && hop > 0, ErrorCode::kConfig,
          "stft: window_len and hop must be > 0");
  require(window_len % hop == 0, ErrorCode::kConfig, "stft: hop (", hop,
          ") must divide window_len (", window_len, ")");
  require(hop < window_len, ErrorCode::kConfig,
          "stft: hop must be smaller than window_len for overlap-add");
  require(fft_size >= window_len, ErrorCode::kConfig, "stft: fft_size (", fft_size,
          ") must be >= window_len (", window_len, ")");
  require((fft_size & (fft_size - 1)) == 0, ErrorCode::kConfig,
          "stft: fft_size must be a power of two, got ", fft_size);
}

std::vector<double> make_window(const StftConfig& cfg) {
  cfg.validate();
  std::vector<double> w(static_cast<std::size_t>(cfg.window_len));
  const double pi = 3.14159265358979323846264338327950288;
  // Periodic Hann; the sqrt split puts one half on analysis, one on synthesis.
  for (int n = 0; n < cfg.window_len; ++n) {
    const double hann =
        0.5 * (1.0 - std::cos(2.0 * pi * n / static_cast<double>(cfg.window_len)));
    w[static_cast<std::size_t>(n)] = std::sqrt(hann);
  }
  return w;
}

namespace {

struct PadLayout {
  std::size_t pad_left = 0;
  std::size_t pad_right = 0;
  std::size_t padded_len = 0;
  int frames = 0;
};

PadLayout pad_layout(std::size_t len, const StftConfig& cfg) {
  const auto window = static_cast<std::size_t>(cfg.window_len);
  const auto hop = static_cast<std::size_t>(cfg.hop);
  PadLayout lay;
  lay.pad_left = window - hop;
  // Right padding rounds the signal up to a whole number of hops, so the
  // last frame ends exactly at the padded end and every real sample keeps
  // full overlap-add coverage.
  lay.pad_right = (window - hop) + ((hop - len % hop) % hop);
  lay.padded_len = lay.pad_left + len + lay.pad_right;
  lay.frames = static_cast<int>((lay.padded_len - window) / hop) + 1;
  return lay;
}

std::vector<double> reflect_pad(const std::vector<double>& x, const PadLayout& lay) {
  const std::size_t len = x.size();
  std::vector<double> out(lay.padded_len, 0.0);
  for (std::size_t i = 0; i < lay.pad_left; ++i) {
    out[i] = x[lay.pad_left - i];
  }
  std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(lay.pad_left));
  for (std::size_t i = 0; i < lay.pad_right; ++i) {
    out[lay.pad_left + len + i] = x[len - 2 - i];
  }
  return out;
}

}  // namespace

Spectrogram Spectrogram::channel(int c) const {
  require(c >= 0 && c < channels, ErrorCode::kInvalidArgument,
          "Spectrogram::channel: index ", c, " out of range [0,", channels, ")");
  Spectrogram out(1, bins, frames);
  std::copy(data.begin() + static_cast<std::ptrdiff_t>(index(c, 0, 0)),
            data.begin() + static_cast<std::ptrdiff_t>(index(c, 0, 0) +
                                                       static_cast<std::size_t>(bins) * frames),
            out.data.begin());
  return out;
}

Spectrogram Spectrogram::slice_frames(int begin, int end) const {
  require(begin >= 0 && begin < end && end <= frames, ErrorCode::kInvalidArgument,
          "Spectrogram::slice_frames: bad range [", begin, ",", end, ") of ", frames);
  Spectrogram out(channels, bins, end - begin);
  for (int c = 0; c < channels; ++c) {
    for (int f = 0; f < bins; ++f) {
      for (int n = begin; n < end; ++n) {
        out.at(c, f, n - begin) = at(c, f, n);
      }
    }
  }
  return out;
}

Spectrogram stft(const MultichannelWaveform& wave, const StftConfig& cfg) {
  cfg.validate();
  wave.validate();
  const std::size_t len = wave.num_samples();
  require(len >= static_cast<std::size_t>(cfg.window_len), ErrorCode::kInvalidArgument,
          "stft: signal (", len, " samples) shorter than window_len (", cfg.window_len,
          ") after padding policy");

  const PadLayout lay = pad_layout(len, cfg);
  const std::vector<double> window = make_window(cfg);
  const int bins = cfg.bins();
  Spectrogram spec(wave.num_channels(), bins, lay.frames);

  std::vector<std::complex<double>> buf(static_cast<std::size_t>(cfg.fft_size));
  for (int c = 0; c < wave.num_channels(); ++c) {
    const std::vector<double> padded =
        reflect_pad(wave.channels[static_cast<std::size_t>(c)], lay);
    for (int t = 0; t < lay.frames; ++t) {
      const std::size_t start = static_cast<std::size_t>(t) * cfg.hop;
      std::fill(buf.begin(), buf.end(), std::complex<double>{0.0, 0.0});
      for (int n = 0; n < cfg.window_len; ++n) {
        buf[static_cast<std::size_t>(n)] =
            padded[start + static_cast<std::size_t>(n)] * window[static_cast<std::size_t>(n)];
      }
      fft::transform(buf, false);
      for (int f = 0; f < bins; ++f) {
        spec.at(c, f, t) = buf[static_cast<std::size_t>(f)];
      }
    }
  }
  return spec;
}

MultichannelWaveform istft(const Spectrogram& spec, const StftConfig& cfg,
                           std::size_t out_len) {
  cfg.validate();
  require(spec.bins == cfg.bins(), ErrorCode::kShapeMismatch,
          "istft: spectrogram has ", spec.bins, " bins but config implies ",
          cfg.bins());
  require(spec.channels > 0 && spec.frames > 0, ErrorCode::kInvalidArgument,
          "istft: empty spectrogram");

  const auto window_len = static_cast<std::size_t>(cfg.window_len);
  const auto hop = static_cast<std::size_t>(cfg.hop);
  const std::size_t pad_left = window_len - hop;
  const std::size_t padded_len =
      static_cast<std::size_t>(spec.frames - 1) * hop + window_len;
  require(pad_left + out_len <= padded_len, ErrorCode::kInvalidArgument,
          "istft: out_len ", out_len, " exceeds synthesizable range ",
          padded_len - pad_left);

  const std::vector<double> window = make_window(cfg);
  MultichannelWaveform wave(cfg.sample_rate, spec.channels, out_len);

  std::vector<std::complex<double>> buf(static_cast<std::size_t>(cfg.fft_size));
  std::vector<double> acc(padded_len);
  std::vector<double> wsum(padded_len);
  for (int c = 0; c < spec.channels; ++c) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::fill(wsum.begin(), wsum.end(), 0.0);
    for (int t = 0; t < spec.frames; ++t) {
      for (int f = 0; f < spec.bins; ++f) {
        buf[static_cast<std::size_t>(f)] = spec.at(c, f, t);
      }
      // Conjugate symmetry restores the full spectrum of the real frame.
      for (int f = spec.bins; f < cfg.fft_size; ++f) {
        buf[static_cast<std::size_t>(f)] =
            std::conj(spec.at(c, cfg.fft_size - f, t));
      }
      fft::transform(buf, true);
      const std::size_t start = static_cast<std::size_t>(t) * hop;
      for (std::size_t n = 0; n < window_len; ++n) {
        acc[start + n] += buf[n].real() * window[n];
        wsum[start + n] += window[n] * window[n];
      }
    }
    for (std::size_t i = 0; i < out_len; ++i) {
      const double d = wsum[pad_left + i];
      wave.channels[static_cast<std::size_t>(c)][i] =
          d > 1e-12 ? acc[pad_left + i] / d : 0.0;
    }
  }
  return wave;
}

std::vector<double> magnitude(const Spectrogram& spec) {
  std::vector<double> out(spec.data.size());
  for (std::size_t i = 0; i < spec.data.size(); ++i) out[i] = std::abs(spec.data[i]);
  return out;
}

std::vector<double> channel_magnitude(const Spectrogram& spec, int channel) {
  require(channel >= 0 && channel < spec.channels, ErrorCode::kInvalidArgument,
          "channel_magnitude: channel ", channel, " out of range [0,",
          spec.channels, ")");
  std::vector<double> out(static_cast<std::size_t>(spec.bins) * spec.frames);
  for (int f = 0; f < spec.bins; ++f) {
    for (int n = 0; n < spec.frames; ++n) {
      out[static_cast<std::size_t>(f) * spec.frames + n] =
          std::abs(spec.at(channel, f, n));
    }
  }
  return out;
}

}  // namespace csskit
