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

#ifndef CSSKIT_NET_HPP_
#define CSSKIT_NET_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "csskit/dsp.hpp"
#include "csskit/ops.hpp"
#include "csskit/params.hpp"
#include "csskit/rng.hpp"
#include "csskit/tape.hpp"

namespace csskit {

enum class FeatureKind { kLogMagUnitPhase };

// Mask-estimation model: conformer blocks over each channel's frame sequence,
// one transform-average-concatenate (TAC) layer ahead of every block for
// cross-channel exchange, channel mean pooling, then four sigmoid mask heads
// (speech x2, stationary noise, transient noise). Any channel count runs on
// one parameter set, and the output is invariant to channel permutations.
struct NetConfig {
  int num_blocks = 3;
  int layers_per_block = 2;
  int model_dim = 48;
  int attention_heads = 3;
  int conv_kernel = 33;
  int bins = 257;
  static constexpr int kMaskOutputs = 4;
  FeatureKind feature_kind = FeatureKind::kLogMagUnitPhase;

  // Frames needed so the depthwise-conv padding never swallows a window.
  int min_frames() const { return (conv_kernel + 1) / 2; }
  void validate() const;
  bool operator==(const NetConfig&) const = default;
};

// Mask index conventions shared across the toolkit.
inline constexpr int kSpeech0 = 0;
inline constexpr int kSpeech1 = 1;
inline constexpr int kNoiseStationary = 2;
inline constexpr int kNoiseTransient = 3;

// Plain (non-autodiff) mask container: four bins x frames matrices in [0, 1].
struct MaskSet {
  int bins = 0;
  int frames = 0;
  std::array<std::vector<double>, NetConfig::kMaskOutputs> masks;

  MaskSet() = default;
  MaskSet(int f, int n)
      : bins(f), frames(n) {
    for (auto& m : masks) m.assign(static_cast<std::size_t>(f) * n, 0.0);
  }
  double& at(int mask, int f, int n) {
    return masks[static_cast<std::size_t>(mask)][static_cast<std::size_t>(f) * frames + n];
  }
  double at(int mask, int f, int n) const {
    return masks[static_cast<std::size_t>(mask)][static_cast<std::size_t>(f) * frames + n];
  }
};

// Per-channel input features: (channels, frames, 3*bins) holding
// log1p-magnitude plus unit-normalized real/imag parts. Zero bins use the
// (1, 0) phase convention. Purely per-channel, so channel order is preserved.
template <typename S>
TensorT<S> featurize(const Spectrogram& spec);

// Uniform channel subset without replacement; relative order preserved.
Spectrogram select_channels(const Spectrogram& spec, int k, Rng& rng);
Spectrogram select_channels(const Spectrogram& spec, int k, std::uint64_t seed);

// One TAC layer on (channels, frames, dim) features: per-channel transform,
// cross-channel mean, concat(mean, channel), projection, residual add.
template <typename S>
TensorT<S> tac_layer(TapeT<S>& tape, const TensorT<S>& x,
                     const TensorT<S>& transform_w, const TensorT<S>& transform_b,
                     const TensorT<S>& proj_w, const TensorT<S>& proj_b);

// (name, shape) of every trainable tensor, in checkpoint order.
std::vector<std::pair<std::string, Shape>> param_shapes(const NetConfig& cfg);
std::size_t param_count(const NetConfig& cfg);

template <typename S>
class MaskNetT {
 public:
  MaskNetT() = default;
  MaskNetT(NetConfig cfg, ParamSetT<S> params);

  static MaskNetT random_init(const NetConfig& cfg, std::uint64_t seed);

  const NetConfig& config() const { return cfg_; }
  ParamSetT<S>& params() { return params_; }
  const ParamSetT<S>& params() const { return params_; }

  // Tape-tracked forward; each mask tensor is (bins, frames) in (0, 1).
  std::array<TensorT<S>, NetConfig::kMaskOutputs> forward(
      TapeT<S>& tape, const Spectrogram& spec) const;

  // Inference convenience: no tape, plain masks.
  MaskSet infer(const Spectrogram& spec) const;

 private:
  NetConfig cfg_;
  ParamSetT<S> params_;
};

using MaskNet = MaskNetT<float>;

// Casts a float model to double, e.g. for high-precision gradient checks.
MaskNetT<double> to_double(const MaskNetT<float>& net);

}  // namespace csskit

#endif  // CSSKIT_NET_HPP_
