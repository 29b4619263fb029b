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

#include "csskit/objectives.hpp"

namespace csskit {

namespace {

namespace op = csskit::ops;

template <typename S>
TensorT<S> distance(TapeT<S>& tape, const TensorT<S>& a, const TensorT<S>& b,
                    bool squared) {
  auto diff = op::sub(tape, a, b);
  if (squared) return op::sum_all(tape, op::mul(tape, diff, diff));
  return op::l2_norm(tape, diff);
}

template <typename S>
void check_grid(const TensorT<S>& t, const TensorT<S>& y_mag, const char* what) {
  require(t.shape() == y_mag.shape(), ErrorCode::kShapeMismatch, what, " shape ",
          shape_str(t.shape()), " does not match mixture magnitude ",
          shape_str(y_mag.shape()));
}

}  // namespace

template <typename S>
PitLossT<S> upit_speech_loss(TapeT<S>& tape,
                             const std::array<TensorT<S>, 2>& speech_masks,
                             const TensorT<S>& y_mag,
                             const std::array<TensorT<S>, 2>& speech_refs,
                             bool squared_norm) {
  for (const auto& m : speech_masks) check_grid(m, y_mag, "speech mask");
  for (const auto& r : speech_refs) check_grid(r, y_mag, "speech reference");

  std::array<TensorT<S>, 2> masked;
  for (int i = 0; i < 2; ++i) {
    masked[static_cast<std::size_t>(i)] =
        op::mul(tape, speech_masks[static_cast<std::size_t>(i)], y_mag);
  }
  auto identity = op::add(tape, distance(tape, masked[0], speech_refs[0], squared_norm),
                          distance(tape, masked[1], speech_refs[1], squared_norm));
  auto swapped = op::add(tape, distance(tape, masked[0], speech_refs[1], squared_norm),
                         distance(tape, masked[1], speech_refs[0], squared_norm));
  PitLossT<S> out;
  out.swapped = swapped.item() < identity.item();
  out.loss = out.swapped ? swapped : identity;
  return out;
}

template <typename S>
PitLossT<S> stage1_loss(TapeT<S>& tape,
                        const std::array<TensorT<S>, NetConfig::kMaskOutputs>& masks,
                        const TensorT<S>& y_mag, const Stage1RefsT<S>& refs,
                        const LossWeights& weights) {
  require(weights.noise_weight >= 0.0, ErrorCode::kInvalidArgument,
          "noise_weight must be >= 0, got ", weights.noise_weight);
  PitLossT<S> pit = upit_speech_loss(tape, {masks[kSpeech0], masks[kSpeech1]}, y_mag,
                                     refs.speech_mag, weights.squared_norm);
  auto total = pit.loss;
  const std::array<int, 2> noise_idx = {kNoiseStationary, kNoiseTransient};
  for (int q = 0; q < 2; ++q) {
    const auto& ref = refs.noise_mag[static_cast<std::size_t>(q)];
    check_grid(ref, y_mag, "noise reference");
    auto masked = op::mul(tape, masks[static_cast<std::size_t>(noise_idx[static_cast<std::size_t>(q)])], y_mag);
    auto term = distance(tape, masked, ref, weights.squared_norm);
    total = op::add(tape, total,
                    op::scale(tape, term, static_cast<S>(weights.noise_weight)));
  }
  return PitLossT<S>{total, pit.swapped};
}

template <typename S>
PitLossT<S> stage2_loss(TapeT<S>& tape, const MaskSet& teacher,
                        const std::array<TensorT<S>, NetConfig::kMaskOutputs>& student,
                        const TensorT<S>& y_mag, const LossWeights& weights) {
  require(teacher.bins * teacher.frames > 0, ErrorCode::kInvalidArgument,
          "stage2_loss: empty teacher mask set");
  require(y_mag.ndim() == 2 && y_mag.dim(0) == teacher.bins &&
              y_mag.dim(1) == teacher.frames,
          ErrorCode::kShapeMismatch, "stage2_loss: teacher masks are ", teacher.bins,
          "x", teacher.frames, " but mixture magnitude is ", shape_str(y_mag.shape()));

  // Teacher targets are plain constants: M_tea (x) |Y| off-tape.
  std::array<TensorT<S>, NetConfig::kMaskOutputs> targets;
  const auto& yv = y_mag.values();
  for (int m = 0; m < NetConfig::kMaskOutputs; ++m) {
    std::vector<S> data(yv.size());
    const auto& tm = teacher.masks[static_cast<std::size_t>(m)];
    require(tm.size() == yv.size(), ErrorCode::kShapeMismatch,
            "stage2_loss: teacher mask size mismatch");
    for (std::size_t i = 0; i < yv.size(); ++i) {
      data[i] = static_cast<S>(tm[i]) * yv[i];
    }
    targets[static_cast<std::size_t>(m)] =
        TensorT<S>::from_data(y_mag.shape(), std::move(data));
  }

  std::array<TensorT<S>, NetConfig::kMaskOutputs> masked;
  for (int m = 0; m < NetConfig::kMaskOutputs; ++m) {
    check_grid(student[static_cast<std::size_t>(m)], y_mag, "student mask");
    masked[static_cast<std::size_t>(m)] =
        op::mul(tape, student[static_cast<std::size_t>(m)], y_mag);
  }

  auto identity = op::add(
      tape, distance(tape, targets[kSpeech0], masked[kSpeech0], weights.squared_norm),
      distance(tape, targets[kSpeech1], masked[kSpeech1], weights.squared_norm));
  auto swapped = op::add(
      tape, distance(tape, targets[kSpeech0], masked[kSpeech1], weights.squared_norm),
      distance(tape, targets[kSpeech1], masked[kSpeech0], weights.squared_norm));
  PitLossT<S> out;
  out.swapped = swapped.item() < identity.item();
  auto total = out.swapped ? swapped : identity;

  for (int q : {kNoiseStationary, kNoiseTransient}) {
    auto term = distance(tape, targets[static_cast<std::size_t>(q)],
                         masked[static_cast<std::size_t>(q)], weights.squared_norm);
    total = op::add(tape, total,
                    op::scale(tape, term, static_cast<S>(weights.noise_weight)));
  }
  out.loss = total;
  return out;
}

template <typename S>
TensorT<S> matrix_tensor(const std::vector<double>& values, int bins, int frames) {
  require(values.size() == static_cast<std::size_t>(bins) * frames,
          ErrorCode::kShapeMismatch, "matrix_tensor: ", values.size(),
          " values for shape (", bins, ",", frames, ")");
  std::vector<S> data(values.begin(), values.end());
  return TensorT<S>::from_data({bins, frames}, std::move(data));
}

#define CSSKIT_INSTANTIATE_OBJECTIVES(S)                                          \
  template PitLossT<S> upit_speech_loss<S>(TapeT<S>&, const std::array<TensorT<S>, 2>&, \
                                           const TensorT<S>&,                     \
                                           const std::array<TensorT<S>, 2>&, bool); \
  template PitLossT<S> stage1_loss<S>(                                            \
      TapeT<S>&, const std::array<TensorT<S>, NetConfig::kMaskOutputs>&,           \
      const TensorT<S>&, const Stage1RefsT<S>&, const LossWeights&);               \
  template PitLossT<S> stage2_loss<S>(                                            \
      TapeT<S>&, const MaskSet&,                                                   \
      const std::array<TensorT<S>, NetConfig::kMaskOutputs>&, const TensorT<S>&,   \
      const LossWeights&);                                                         \
  template TensorT<S> matrix_tensor<S>(const std::vector<double>&, int, int);

CSSKIT_INSTANTIATE_OBJECTIVES(float)
CSSKIT_INSTANTIATE_OBJECTIVES(double)

#undef CSSKIT_INSTANTIATE_OBJECTIVES

}  // namespace csskit
