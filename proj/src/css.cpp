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

#include "csskit/css.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "csskit/threading.hpp"

namespace csskit {

void CssConfig::validate() const {
  require(window_sec > 0.0 && shift_sec > 0.0, ErrorCode::kConfig,
          "css: window and shift must be positive");
  require(shift_sec <= window_sec, ErrorCode::kConfig, "css: shift (", shift_sec,
          " s) must not exceed the window (", window_sec, " s)");
}

MaskEstimator make_mask_estimator(const MaskNet& net) {
  return [&net](const Spectrogram& window) { return net.infer(window); };
}

StitchChoice stitch(const MaskSet& prev_overlap, const MaskSet& cur_overlap,
                    const std::vector<double>& y_mag_overlap) {
  require(prev_overlap.bins == cur_overlap.bins &&
              prev_overlap.frames == cur_overlap.frames,
          ErrorCode::kShapeMismatch, "stitch: mask grids differ");
  const std::size_t n = static_cast<std::size_t>(prev_overlap.bins) * prev_overlap.frames;
  require(n > 0, ErrorCode::kInvalidArgument, "stitch: empty overlap");
  require(y_mag_overlap.size() == n, ErrorCode::kShapeMismatch,
          "stitch: magnitude grid does not match the masks");

  auto dist = [&](int a, int b) {
    double acc = 0.0;
    const auto& pa = prev_overlap.masks[static_cast<std::size_t>(a)];
    const auto& cb = cur_overlap.masks[static_cast<std::size_t>(b)];
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (pa[i] - cb[i]) * y_mag_overlap[i];
      acc += d * d;
    }
    return std::sqrt(acc);
  };
  StitchChoice out;
  out.loss_identity = dist(kSpeech0, kSpeech0) + dist(kSpeech1, kSpeech1);
  out.loss_swap = dist(kSpeech0, kSpeech1) + dist(kSpeech1, kSpeech0);
  out.swap = out.loss_swap < out.loss_identity;
  return out;
}

std::array<Spectrogram, 2> apply_masks(const Spectrogram& spec, const MaskSet& masks) {
  require(masks.bins == spec.bins && masks.frames == spec.frames,
          ErrorCode::kShapeMismatch, "apply_masks: mask grid ", masks.bins, "x",
          masks.frames, " vs spectrogram ", spec.bins, "x", spec.frames);
  std::array<Spectrogram, 2> out;
  for (int s = 0; s < 2; ++s) {
    out[static_cast<std::size_t>(s)] = Spectrogram(1, spec.bins, spec.frames);
    for (int f = 0; f < spec.bins; ++f) {
      for (int n = 0; n < spec.frames; ++n) {
        out[static_cast<std::size_t>(s)].at(0, f, n) =
            spec.at(0, f, n) * masks.at(s, f, n);
      }
    }
  }
  return out;
}

SpatialCovariances estimate_scm(const Spectrogram& spec, const std::vector<double>& mask) {
  require(spec.channels >= 2, ErrorCode::kInvalidArgument,
          "estimate_scm: needs at least 2 channels, got ", spec.channels);
  require(mask.size() == static_cast<std::size_t>(spec.bins) * spec.frames,
          ErrorCode::kShapeMismatch, "estimate_scm: mask size ", mask.size(),
          " vs grid ", spec.bins, "x", spec.frames);
  const int m = spec.channels;
  SpatialCovariances out;
  out.bins = spec.bins;
  out.channels = m;
  out.phi.assign(static_cast<std::size_t>(spec.bins) * m * m, {0.0, 0.0});
  out.unweighted_fallback.assign(static_cast<std::size_t>(spec.bins), false);

  for (int f = 0; f < spec.bins; ++f) {
    double weight_sum = 0.0;
    for (int n = 0; n < spec.frames; ++n) {
      weight_sum += mask[static_cast<std::size_t>(f) * spec.frames + n];
    }
    const bool fallback = weight_sum <= 0.0;
    out.unweighted_fallback[static_cast<std::size_t>(f)] = fallback;
    const double denom = fallback ? static_cast<double>(spec.frames) : weight_sum;
    for (int n = 0; n < spec.frames; ++n) {
      const double w =
          fallback ? 1.0 : mask[static_cast<std::size_t>(f) * spec.frames + n];
      if (w == 0.0) continue;
      for (int i = 0; i < m; ++i) {
        const std::complex<double> yi = spec.at(i, f, n);
        for (int j = 0; j < m; ++j) {
          out.at(f, i, j) += w * yi * std::conj(spec.at(j, f, n));
        }
      }
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) out.at(f, i, j) /= denom;
    }
  }
  return out;
}

MvdrWeights mvdr_weights(const SpatialCovariances& phi_target,
                         const SpatialCovariances& phi_interference) {
  require(phi_target.bins == phi_interference.bins &&
              phi_target.channels == phi_interference.channels,
          ErrorCode::kShapeMismatch, "mvdr_weights: covariance grids differ");
  const int m = phi_target.channels;
  MvdrWeights out;
  out.bins = phi_target.bins;
  out.channels = m;
  out.w.assign(static_cast<std::size_t>(out.bins) * m, {0.0, 0.0});
  out.steer.assign(static_cast<std::size_t>(out.bins) * m, {0.0, 0.0});

  Eigen::MatrixXcd phi_t(m, m), phi_n(m, m);
  for (int f = 0; f < out.bins; ++f) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        phi_t(i, j) = phi_target.at(f, i, j);
        phi_n(i, j) = phi_interference.at(f, i, j);
      }
    }
    // Steering vector: principal eigenvector, reference channel 0 scaling.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(phi_t);
    require(eig.info() == Eigen::Success, ErrorCode::kInternal,
            "mvdr_weights: eigen decomposition failed at bin ", f);
    Eigen::VectorXcd d = eig.eigenvectors().col(m - 1);
    if (std::abs(d(0)) > 1e-12 * d.norm()) {
      d /= d(0);
    }

    const double trace = phi_n.real().trace();
    const double load = std::max(1e-6 * trace / m, 1e-12);
    Eigen::MatrixXcd loaded = phi_n + load * Eigen::MatrixXcd::Identity(m, m);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(loaded);
    require(lu.isInvertible(), ErrorCode::kInternal,
            "mvdr_weights: interference covariance singular after loading at bin ", f);
    Eigen::VectorXcd num = lu.solve(d);
    const std::complex<double> denom = d.adjoint() * num;
    require(std::abs(denom) > 0.0, ErrorCode::kInternal,
            "mvdr_weights: degenerate steering at bin ", f);
    Eigen::VectorXcd w = num / denom;
    for (int c = 0; c < m; ++c) {
      out.wat(f, c) = w(c);
      out.steer[static_cast<std::size_t>(f) * m + c] = d(c);
    }
  }
  return out;
}

Spectrogram apply_beamformer(const Spectrogram& spec, const MvdrWeights& weights) {
  require(weights.bins == spec.bins && weights.channels == spec.channels,
          ErrorCode::kShapeMismatch, "apply_beamformer: weight grid mismatch");
  Spectrogram out(1, spec.bins, spec.frames);
  for (int f = 0; f < spec.bins; ++f) {
    for (int n = 0; n < spec.frames; ++n) {
      std::complex<double> acc(0.0, 0.0);
      for (int c = 0; c < spec.channels; ++c) {
        acc += std::conj(weights.wat(f, c)) * spec.at(c, f, n);
      }
      out.at(0, f, n) = acc;
    }
  }
  return out;
}

namespace {

MaskSet slice_masks(const MaskSet& masks, int begin, int end) {
  MaskSet out(masks.bins, end - begin);
  for (int m = 0; m < NetConfig::kMaskOutputs; ++m) {
    for (int f = 0; f < masks.bins; ++f) {
      for (int n = begin; n < end; ++n) {
        out.at(m, f, n - begin) = masks.at(m, f, n);
      }
    }
  }
  return out;
}

std::vector<double> interference_mask(const MaskSet& masks, int speaker) {
  const int other = speaker == kSpeech0 ? kSpeech1 : kSpeech0;
  const std::size_t n = static_cast<std::size_t>(masks.bins) * masks.frames;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::clamp(masks.masks[static_cast<std::size_t>(other)][i] +
                            masks.masks[kNoiseStationary][i] +
                            masks.masks[kNoiseTransient][i],
                        0.0, 1.0);
  }
  return out;
}

}  // namespace

CssResult css_separate(const MultichannelWaveform& audio, const MaskEstimator& model,
                       const StftConfig& stft_cfg, const CssConfig& css_cfg) {
  stft_cfg.validate();
  css_cfg.validate();
  audio.validate();
  require(model != nullptr, ErrorCode::kInvalidArgument, "css_separate: null model");
  if (css_cfg.method == OutputMethod::kMvdr) {
    require(audio.num_channels() >= 2, ErrorCode::kConfig,
            "css_separate: the mvdr method needs at least 2 channels");
  }

  const std::size_t in_len = audio.num_samples();
  const auto window_samples =
      static_cast<std::size_t>(css_cfg.window_sec * stft_cfg.sample_rate);
  const auto shift_samples =
      static_cast<std::size_t>(css_cfg.shift_sec * stft_cfg.sample_rate);

  // Shorter inputs are processed as a single zero-padded window.
  MultichannelWaveform padded = audio;
  if (in_len < window_samples) {
    for (auto& ch : padded.channels) ch.resize(window_samples, 0.0);
  }
  const std::size_t len = padded.num_samples();

  const Spectrogram spec = stft(padded, stft_cfg);
  const std::vector<double> y_mag0 = channel_magnitude(spec, 0);
  const int frames = spec.frames;
  const int win_frames = static_cast<int>(window_samples / stft_cfg.hop);
  const int shift_frames =
      std::max(1, static_cast<int>(shift_samples / stft_cfg.hop));

  // Window count follows the sample timeline; the last window stretches to
  // cover the remaining frames.
  int num_windows = 1;
  if (len > window_samples) {
    num_windows = static_cast<int>(
                      (len - window_samples + shift_samples - 1) / shift_samples) +
                  1;
  }

  struct WindowState {
    int begin = 0;
    int end = 0;
    MaskSet masks;
  };
  std::vector<WindowState> windows(static_cast<std::size_t>(num_windows));
  for (int k = 0; k < num_windows; ++k) {
    auto& w = windows[static_cast<std::size_t>(k)];
    w.begin = std::min(k * shift_frames, std::max(0, frames - win_frames));
    w.end = k == num_windows - 1 ? frames : std::min(frames, w.begin + win_frames);
  }
  parallel_for(num_windows, [&](int k) {
    auto& w = windows[static_cast<std::size_t>(k)];
    w.masks = model(spec.slice_frames(w.begin, w.end));
  });

  // Stitch: align each window's speaker order with the previous one.
  CssResult result;
  result.sample_rate = stft_cfg.sample_rate;
  for (int k = 0; k < num_windows; ++k) {
    auto& w = windows[static_cast<std::size_t>(k)];
    WindowDiag diag;
    diag.index = k;
    diag.begin_frame = w.begin;
    diag.end_frame = w.end;
    if (k > 0) {
      const auto& prev = windows[static_cast<std::size_t>(k - 1)];
      const int ov_begin = w.begin;
      const int ov_end = std::min(prev.end, w.end);
      if (ov_end > ov_begin) {
        const MaskSet prev_ov = slice_masks(prev.masks, ov_begin - prev.begin,
                                            ov_end - prev.begin);
        const MaskSet cur_ov =
            slice_masks(w.masks, ov_begin - w.begin, ov_end - w.begin);
        std::vector<double> mag_ov(static_cast<std::size_t>(spec.bins) *
                                   (ov_end - ov_begin));
        for (int f = 0; f < spec.bins; ++f) {
          for (int n = ov_begin; n < ov_end; ++n) {
            mag_ov[static_cast<std::size_t>(f) * (ov_end - ov_begin) + (n - ov_begin)] =
                y_mag0[static_cast<std::size_t>(f) * frames + n];
          }
        }
        const StitchChoice choice = stitch(prev_ov, cur_ov, mag_ov);
        if (choice.swap) {
          std::swap(w.masks.masks[kSpeech0], w.masks.masks[kSpeech1]);
        }
        diag.swapped = choice.swap;
        diag.stitch_loss = choice.swap ? choice.loss_swap : choice.loss_identity;
      }
    }
    result.windows.push_back(diag);
  }

  // Per-window separated spectra, cross-faded into two full-length streams.
  std::array<Spectrogram, 2> full;
  for (auto& s : full) s = Spectrogram(1, spec.bins, frames);
  std::vector<double> frame_weight(static_cast<std::size_t>(frames), 0.0);
  std::vector<std::array<Spectrogram, 2>> outs(static_cast<std::size_t>(num_windows));
  parallel_for(num_windows, [&](int k) {
    const auto& w = windows[static_cast<std::size_t>(k)];
    const Spectrogram win_spec = spec.slice_frames(w.begin, w.end);
    if (css_cfg.method == OutputMethod::kMasking) {
      outs[static_cast<std::size_t>(k)] = apply_masks(win_spec, w.masks);
    } else {
      for (int s = 0; s < 2; ++s) {
        const auto& target_mask = w.masks.masks[static_cast<std::size_t>(s)];
        const SpatialCovariances phi_t = estimate_scm(win_spec, target_mask);
        const SpatialCovariances phi_n =
            estimate_scm(win_spec, interference_mask(w.masks, s));
        const MvdrWeights mvdr = mvdr_weights(phi_t, phi_n);
        outs[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] =
            apply_beamformer(win_spec, mvdr);
      }
    }
  });
  for (int k = 0; k < num_windows; ++k) {
    const auto& w = windows[static_cast<std::size_t>(k)];
    const int wlen = w.end - w.begin;
    for (int n = 0; n < wlen; ++n) {
      const double weight = std::min(n + 1, wlen - n);
      frame_weight[static_cast<std::size_t>(w.begin + n)] += weight;
      for (int s = 0; s < 2; ++s) {
        for (int f = 0; f < spec.bins; ++f) {
          full[static_cast<std::size_t>(s)].at(0, f, w.begin + n) +=
              weight * outs[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)].at(0, f, n);
        }
      }
    }
  }
  for (int n = 0; n < frames; ++n) {
    const double d = frame_weight[static_cast<std::size_t>(n)];
    if (d <= 0.0) continue;
    for (int s = 0; s < 2; ++s) {
      for (int f = 0; f < spec.bins; ++f) {
        full[static_cast<std::size_t>(s)].at(0, f, n) /= d;
      }
    }
  }

  for (int s = 0; s < 2; ++s) {
    const MultichannelWaveform wave =
        istft(full[static_cast<std::size_t>(s)], stft_cfg, in_len);
    result.streams[static_cast<std::size_t>(s)] = wave.channels[0];
  }
  return result;
}

}  // namespace csskit
