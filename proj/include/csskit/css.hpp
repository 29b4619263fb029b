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

#ifndef CSSKIT_CSS_HPP_
#define CSSKIT_CSS_HPP_

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "csskit/dsp.hpp"
#include "csskit/net.hpp"

namespace csskit {

enum class OutputMethod { kMasking, kMvdr };

// Long-form separation parameters. Windows advance by shift_sec; overlapping
// window outputs are cross-faded after the stitcher aligns speaker order.
struct CssConfig {
  double window_sec = 1.6;
  double shift_sec = 0.4;
  OutputMethod method = OutputMethod::kMasking;
  void validate() const;
};

// Pluggable mask source: the trained model in production, an oracle in tests.
using MaskEstimator = std::function<MaskSet(const Spectrogram& window)>;

MaskEstimator make_mask_estimator(const MaskNet& net);

struct WindowDiag {
  int index = 0;
  int begin_frame = 0;
  int end_frame = 0;
  bool swapped = false;      // speech permutation applied to this window
  double stitch_loss = 0.0;  // overlap distance of the chosen permutation
};

struct CssResult {
  // Two overlap-free output streams, each exactly the input length.
  std::array<std::vector<double>, 2> streams;
  int sample_rate = 16000;
  std::vector<WindowDiag> windows;
};

CssResult css_separate(const MultichannelWaveform& audio, const MaskEstimator& model,
                       const StftConfig& stft_cfg, const CssConfig& css_cfg);

struct StitchChoice {
  bool swap = false;
  double loss_identity = 0.0;
  double loss_swap = 0.0;
};

// Chooses the permutation of the current window's speech masks that best
// continues the previous window over the overlap region (L2 on masked
// magnitudes; ties go to identity). Inputs cover only the overlap frames.
StitchChoice stitch(const MaskSet& prev_overlap, const MaskSet& cur_overlap,
                    const std::vector<double>& y_mag_overlap);

// out_i = M_i (x) Y[channel 0], for the two speech masks.
std::array<Spectrogram, 2> apply_masks(const Spectrogram& spec, const MaskSet& masks);

// Per-frequency channel covariance matrices, Hermitian PSD.
struct SpatialCovariances {
  int bins = 0;
  int channels = 0;
  std::vector<std::complex<double>> phi;  // [f][i][j], row-major per frequency
  std::vector<bool> unweighted_fallback;  // true where the mask summed to zero

  std::complex<double>& at(int f, int i, int j) {
    return phi[(static_cast<std::size_t>(f) * channels + i) * channels + j];
  }
  const std::complex<double>& at(int f, int i, int j) const {
    return phi[(static_cast<std::size_t>(f) * channels + i) * channels + j];
  }
};

// phi(f) = sum_n m(f,n) y(f,n) y(f,n)^H / sum_n m(f,n). A frequency whose
// mask weights sum to zero falls back to the unweighted average and is
// flagged.
SpatialCovariances estimate_scm(const Spectrogram& spec, const std::vector<double>& mask);

struct MvdrWeights {
  int bins = 0;
  int channels = 0;
  std::vector<std::complex<double>> w;      // [f][channel]
  std::vector<std::complex<double>> steer;  // steering vector per frequency

  std::complex<double>& wat(int f, int c) {
    return w[static_cast<std::size_t>(f) * channels + c];
  }
  const std::complex<double>& wat(int f, int c) const {
    return w[static_cast<std::size_t>(f) * channels + c];
  }
};

// w = Phi_n^-1 d / (d^H Phi_n^-1 d) with d the principal eigenvector of the
// target covariance, scaled to reference channel 0. Diagonal loading
// 1e-6 * trace/M is applied to the interference covariance before inversion.
MvdrWeights mvdr_weights(const SpatialCovariances& phi_target,
                         const SpatialCovariances& phi_interference);

// Beamformer output w^H y for every frame.
Spectrogram apply_beamformer(const Spectrogram& spec, const MvdrWeights& weights);

}  // namespace csskit

#endif  // CSSKIT_CSS_HPP_
