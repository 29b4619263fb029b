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

#ifndef CSSKIT_OBJECTIVES_HPP_
#define CSSKIT_OBJECTIVES_HPP_

#include <array>

#include "csskit/net.hpp"
#include "csskit/ops.hpp"

namespace csskit {

// The two speech outputs carry a permutation ambiguity resolved by taking the
// minimum over both assignments; the two noise outputs keep a fixed order
// (stationary first, transient second).
//
// Distances are L2 over all T-F bins, root-sum-square per source and summed
// over sources; no normalization by bin count. squared_norm switches to the
// squared distance for experimentation.
struct LossWeights {
  double noise_weight = 0.1;
  bool squared_norm = false;
};

template <typename S>
struct Stage1RefsT {
  std::array<TensorT<S>, 2> speech_mag;  // |X1|, |X2|
  std::array<TensorT<S>, 2> noise_mag;   // |N_stationary|, |N_transient|
};

using Stage1Refs = Stage1RefsT<float>;

template <typename S>
struct PitLossT {
  TensorT<S> loss;
  bool swapped = false;  // chosen speech assignment; false = identity
};

// min over the two speech permutations of sum_i ||M_i (x) |Y| - |X_j||.
// Ties resolve to the identity assignment.
template <typename S>
PitLossT<S> upit_speech_loss(TapeT<S>& tape,
                             const std::array<TensorT<S>, 2>& speech_masks,
                             const TensorT<S>& y_mag,
                             const std::array<TensorT<S>, 2>& speech_refs,
                             bool squared_norm = false);

// uPIT speech term plus fixed-order weighted noise terms.
template <typename S>
PitLossT<S> stage1_loss(TapeT<S>& tape,
                        const std::array<TensorT<S>, NetConfig::kMaskOutputs>& masks,
                        const TensorT<S>& y_mag, const Stage1RefsT<S>& refs,
                        const LossWeights& weights);

// Teacher-student loss: the teacher's masked magnitudes act as constant
// regression targets; gradients reach only the student masks.
template <typename S>
PitLossT<S> stage2_loss(TapeT<S>& tape, const MaskSet& teacher,
                        const std::array<TensorT<S>, NetConfig::kMaskOutputs>& student,
                        const TensorT<S>& y_mag, const LossWeights& weights);

// Constant (bins, frames) tensor from a row-major double matrix.
template <typename S>
TensorT<S> matrix_tensor(const std::vector<double>& values, int bins, int frames);

}  // namespace csskit

#endif  // CSSKIT_OBJECTIVES_HPP_
